#include "gridpack/cells.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <utility>

#include "json.hpp"

#include "binio.hpp"
#include "gridpack/errors.hpp"

namespace gridpack {

namespace {

inline float sigf(float x) { return 1.0f / (1.0f + std::exp(-x)); }
inline double sigd(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_mat(const Mat& m, int rows, int cols, const char* name) {
  if (m.rows != rows || m.cols != cols ||
      m.v.size() != static_cast<std::size_t>(rows) * cols) {
    throw ShapeError(std::string("cell params: bad shape for ") + name);
  }
  for (float x : m.v) {
    if (!std::isfinite(x)) {
      throw ArgumentError(std::string("cell params: non-finite value in ") +
                          name);
    }
  }
}

void check_vec(const std::vector<float>& v, int n, const char* name) {
  if (v.size() != static_cast<std::size_t>(n)) {
    throw ShapeError(std::string("cell params: bad length for ") + name);
  }
  for (float x : v) {
    if (!std::isfinite(x)) {
      throw ArgumentError(std::string("cell params: non-finite value in ") +
                          name);
    }
  }
}

struct GatePre {
  // Per-row scratch: five gate pre-activations plus the mixed memory.
  float* g;
  float* i;
  float* f1;
  float* f2;
  float* o;
  float* sp;
};

// pre = bias + x Wx + h1 U1 + h2 U2
inline void gate_pre(const float* x, const float* h1, const float* h2,
                     const Mat& wx, const Mat& u1, const Mat& u2,
                     const std::vector<float>& bias, float* pre) {
  const int n = wx.cols;
  for (int j = 0; j < n; ++j) pre[j] = bias[j];
  add_vec_mat(x, wx, pre);
  add_vec_mat(h1, u1, pre);
  add_vec_mat(h2, u2, pre);
}

template <CellKind Kind>
inline void scan_cell(const CellParams& p, const SkewedGrid& s, int r, int c,
                      int n, const float* prev_h, const float* prev_s,
                      float* cur_h, float* cur_s, const float* zeros,
                      float* scratch, ScanResult& out) {
  float* hr = cur_h + static_cast<std::size_t>(r) * n;
  float* sr = cur_s + static_cast<std::size_t>(r) * n;
  if (!s.mask.at(r, c)) {
    for (int j = 0; j < n; ++j) {
      hr[j] = 0.0f;
      sr[j] = 0.0f;
    }
    return;
  }
  const float* x =
      s.data.data() +
      (static_cast<std::size_t>(r) * s.skewed_width + c) * s.channels;
  const float* h1 = prev_h + static_cast<std::size_t>(r) * n;
  const float* s1 = prev_s + static_cast<std::size_t>(r) * n;
  const float* h2 = r > 0 ? prev_h + static_cast<std::size_t>(r - 1) * n : zeros;
  const float* s2 = r > 0 ? prev_s + static_cast<std::size_t>(r - 1) * n : zeros;

  float* base = scratch + static_cast<std::size_t>(r) * 6 * n;
  GatePre pre{base, base + n, base + 2 * n, base + 3 * n, base + 4 * n,
              base + 5 * n};
  gate_pre(x, h1, h2, p.w_g, p.u1_g, p.u2_g, p.b_g, pre.g);
  gate_pre(x, h1, h2, p.w_i, p.u1_i, p.u2_i, p.b_i, pre.i);
  gate_pre(x, h1, h2, p.w_f1, p.u1_f1, p.u2_f1, p.b_f1, pre.f1);
  gate_pre(x, h1, h2, p.w_f2, p.u1_f2, p.u2_f2, p.b_f2, pre.f2);
  gate_pre(x, h1, h2, p.w_o, p.u1_o, p.u2_o, p.b_o, pre.o);

  if constexpr (Kind == CellKind::Plain) {
    for (int j = 0; j < n; ++j) {
      const float a = std::tanh(pre.g[j]);
      const float i = sigf(pre.i[j]);
      const float f1 = sigf(pre.f1[j]);
      const float f2 = sigf(pre.f2[j]);
      const float sv = i * a + f1 * s1[j] + f2 * s2[j];
      const float o = sigf(pre.o[j]);
      sr[j] = sv;
      hr[j] = o * std::tanh(sv);
    }
  } else {
    for (int j = 0; j < n; ++j) {
      const float ls = sigf(pre.f1[j]);
      pre.sp[j] = ls * s1[j] + (1.0f - ls) * s2[j];
    }
    add_vec_mat(pre.sp, p.v1, pre.i);
    add_vec_mat(pre.sp, p.v2, pre.o);
    for (int j = 0; j < n; ++j) {
      const float a = std::tanh(pre.g[j]);
      const float lu = sigf(pre.f2[j]);
      const float sv = lu * pre.sp[j] + (1.0f - lu) * a;
      const float o1 = sigf(pre.i[j]);
      const float o2 = sigf(pre.o[j]);
      sr[j] = sv;
      hr[j] = o1 * std::tanh(sv) + o2 * std::tanh(pre.sp[j]);
    }
  }
  const int orig_c = c - r;  // in [0, original_width) inside the band
  for (int j = 0; j < n; ++j) {
    out.hidden.at(r, orig_c, j) = hr[j];
    out.memory.at(r, orig_c, j) = sr[j];
  }
}

template <CellKind Kind>
ScanResult scan_impl(const CellParams& p, const SkewedGrid& s) {
  validate(p);
  if (s.channels != p.input_channels) {
    throw ShapeError("scan: input channels " + std::to_string(s.channels) +
                     " != params input_channels " +
                     std::to_string(p.input_channels));
  }
  const int height = s.height;
  const int n = p.hidden_size;

  ScanResult out;
  out.hidden = grid_create(height, s.original_width, n, 0.0f);
  out.memory = grid_create(height, s.original_width, n, 0.0f);

  const std::size_t state_len = static_cast<std::size_t>(height) * n;
  std::vector<float> state_a(2 * state_len, 0.0f), state_b(2 * state_len, 0.0f);
  const std::vector<float> zeros(n, 0.0f);
  std::vector<float> scratch(static_cast<std::size_t>(height) * 6 * n);

  // Columns whose rows are too small a front to amortize the per-column
  // barrier run the plain serial sweep.
  const long long column_work = static_cast<long long>(height) * n *
                                (p.input_channels + 2 * n) * 5;
  if (column_work < (1 << 18)) {
    float* prev_h = state_a.data();
    float* prev_s = state_a.data() + state_len;
    float* cur_h = state_b.data();
    float* cur_s = state_b.data() + state_len;
    for (int c = 0; c < s.skewed_width; ++c) {
      const int row_lo = std::max(0, c - s.original_width + 1);
      const int row_hi = std::min(height - 1, c);
      for (int r = row_lo; r <= row_hi; ++r) {
        scan_cell<Kind>(p, s, r, c, n, prev_h, prev_s, cur_h, cur_s,
                        zeros.data(), scratch.data(), out);
      }
      std::swap(prev_h, cur_h);
      std::swap(prev_s, cur_s);
    }
    return out;
  }

  // One persistent parallel region; threads sweep the skewed columns in
  // lockstep (the barrier of the row loop orders column c before c+1) and
  // keep private pointers to the ping-pong state buffers. All rows of one
  // skewed column are independent given the previous column; that front is
  // what the skewing buys.
#pragma omp parallel
  {
    float* prev_h = state_a.data();
    float* prev_s = state_a.data() + state_len;
    float* cur_h = state_b.data();
    float* cur_s = state_b.data() + state_len;
    for (int c = 0; c < s.skewed_width; ++c) {
      const int row_lo = std::max(0, c - s.original_width + 1);
      const int row_hi = std::min(height - 1, c);
#pragma omp for schedule(static)
      for (int r = row_lo; r <= row_hi; ++r) {
        scan_cell<Kind>(p, s, r, c, n, prev_h, prev_s, cur_h, cur_s,
                        zeros.data(), scratch.data(), out);
      }
      // Every thread swaps its private views the same way.
      std::swap(prev_h, cur_h);
      std::swap(prev_s, cur_s);
    }
  }
  return out;
}

CellParams canonical_trace_params(double forget_bias) {
  CellParams p = zero_cell_params(1, 1);
  p.w_g.at(0, 0) = 1.0f;
  p.b_f1[0] = static_cast<float>(forget_bias);
  p.b_f2[0] = static_cast<float>(forget_bias);
  return p;
}

void append_mat_block(nlohmann::json& blocks, const char* name, const Mat& m,
                      std::size_t& offset) {
  blocks.push_back({{"name", name},
                    {"rows", m.rows},
                    {"cols", m.cols},
                    {"offset_bytes", offset},
                    {"count", m.v.size()}});
  offset += m.v.size() * 4;
}

void append_vec_block(nlohmann::json& blocks, const char* name,
                      const std::vector<float>& v, std::size_t& offset) {
  blocks.push_back({{"name", name},
                    {"rows", 1},
                    {"cols", v.size()},
                    {"offset_bytes", offset},
                    {"count", v.size()}});
  offset += v.size() * 4;
}

template <typename CP, typename Fn>
void for_each_block(CP& p, Fn&& fn) {
  fn("w_g", p.w_g.v);
  fn("w_i", p.w_i.v);
  fn("w_f1", p.w_f1.v);
  fn("w_f2", p.w_f2.v);
  fn("w_o", p.w_o.v);
  fn("u1_g", p.u1_g.v);
  fn("u1_i", p.u1_i.v);
  fn("u1_f1", p.u1_f1.v);
  fn("u1_f2", p.u1_f2.v);
  fn("u1_o", p.u1_o.v);
  fn("u2_g", p.u2_g.v);
  fn("u2_i", p.u2_i.v);
  fn("u2_f1", p.u2_f1.v);
  fn("u2_f2", p.u2_f2.v);
  fn("u2_o", p.u2_o.v);
  fn("v1", p.v1.v);
  fn("v2", p.v2.v);
  fn("b_g", p.b_g);
  fn("b_i", p.b_i);
  fn("b_f1", p.b_f1);
  fn("b_f2", p.b_f2);
  fn("b_o", p.b_o);
}

}  // namespace

std::string cell_kind_name(CellKind kind) {
  return kind == CellKind::Plain ? "plain" : "leaky_lp";
}

CellKind cell_kind_from_name(const std::string& name) {
  if (name == "plain") return CellKind::Plain;
  if (name == "leaky_lp") return CellKind::LeakyLp;
  throw ArgumentError("unknown cell kind: " + name);
}

CellParams zero_cell_params(int hidden_size, int input_channels) {
  if (hidden_size < 1 || input_channels < 1) {
    throw ShapeError("cell params: hidden_size and input_channels must be >= 1");
  }
  CellParams p;
  p.hidden_size = hidden_size;
  p.input_channels = input_channels;
  for (Mat* m : {&p.w_g, &p.w_i, &p.w_f1, &p.w_f2, &p.w_o}) {
    *m = Mat(input_channels, hidden_size);
  }
  for (Mat* m : {&p.u1_g, &p.u1_i, &p.u1_f1, &p.u1_f2, &p.u1_o, &p.u2_g,
                 &p.u2_i, &p.u2_f1, &p.u2_f2, &p.u2_o, &p.v1, &p.v2}) {
    *m = Mat(hidden_size, hidden_size);
  }
  for (std::vector<float>* v : {&p.b_g, &p.b_i, &p.b_f1, &p.b_f2, &p.b_o}) {
    v->assign(hidden_size, 0.0f);
  }
  return p;
}

CellParams random_cell_params(int hidden_size, int input_channels, Rng& rng) {
  CellParams p = zero_cell_params(hidden_size, input_channels);
  for_each_block(p, [&rng](const char*, std::vector<float>& v) {
    for (float& x : v) x = rng.uniform_float(-0.1f, 0.1f);
  });
  return p;
}

void validate(const CellParams& p) {
  if (p.hidden_size < 1 || p.input_channels < 1) {
    throw ShapeError("cell params: hidden_size and input_channels must be >= 1");
  }
  const int n = p.hidden_size;
  const int c = p.input_channels;
  check_mat(p.w_g, c, n, "w_g");
  check_mat(p.w_i, c, n, "w_i");
  check_mat(p.w_f1, c, n, "w_f1");
  check_mat(p.w_f2, c, n, "w_f2");
  check_mat(p.w_o, c, n, "w_o");
  check_mat(p.u1_g, n, n, "u1_g");
  check_mat(p.u1_i, n, n, "u1_i");
  check_mat(p.u1_f1, n, n, "u1_f1");
  check_mat(p.u1_f2, n, n, "u1_f2");
  check_mat(p.u1_o, n, n, "u1_o");
  check_mat(p.u2_g, n, n, "u2_g");
  check_mat(p.u2_i, n, n, "u2_i");
  check_mat(p.u2_f1, n, n, "u2_f1");
  check_mat(p.u2_f2, n, n, "u2_f2");
  check_mat(p.u2_o, n, n, "u2_o");
  check_mat(p.v1, n, n, "v1");
  check_mat(p.v2, n, n, "v2");
  check_vec(p.b_g, n, "b_g");
  check_vec(p.b_i, n, "b_i");
  check_vec(p.b_f1, n, "b_f1");
  check_vec(p.b_f2, n, "b_f2");
  check_vec(p.b_o, n, "b_o");
}

ScanResult mdlstm_scan_full(const CellParams& params, const SkewedGrid& s) {
  return scan_impl<CellKind::Plain>(params, s);
}

ImageGrid mdlstm_scan(const CellParams& params, const SkewedGrid& s) {
  return scan_impl<CellKind::Plain>(params, s).hidden;
}

ScanResult leakylp_scan_full(const CellParams& params, const SkewedGrid& s) {
  return scan_impl<CellKind::LeakyLp>(params, s);
}

ImageGrid leakylp_scan(const CellParams& params, const SkewedGrid& s) {
  return scan_impl<CellKind::LeakyLp>(params, s).hidden;
}

ImageGrid cell_scan(CellKind kind, const CellParams& params,
                    const SkewedGrid& s) {
  return kind == CellKind::Plain ? mdlstm_scan(params, s)
                                 : leakylp_scan(params, s);
}

ImageGrid mdlstm_4dir(CellKind kind, const std::array<CellParams, 4>& params,
                      const ImageGrid& g) {
  validate(g);
  const int n = params[0].hidden_size;
  for (const auto& p : params) {
    if (p.hidden_size != n) {
      throw ShapeError("mdlstm_4dir: directions disagree on hidden_size");
    }
  }
  ImageGrid out = grid_create(g.height, g.width, 4 * n, 0.0f);
  for (int d = 0; d < 4; ++d) {
    const bool fh = d == 1 || d == 3;
    const bool fv = d == 2 || d == 3;
    ImageGrid in = g;
    if (fh) in = flip_horizontal(in);
    if (fv) in = flip_vertical(in);
    ImageGrid hidden = cell_scan(kind, params[d], skew(in));
    if (fh) hidden = flip_horizontal(hidden);
    if (fv) hidden = flip_vertical(hidden);
    for (int r = 0; r < g.height; ++r) {
      for (int c = 0; c < g.width; ++c) {
        for (int j = 0; j < n; ++j) {
          out.at(r, c, d * n + j) = hidden.at(r, c, j);
        }
      }
    }
  }
  return out;
}

std::vector<double> stability_trace(CellKind kind, const CellParams& params,
                                    int length, double input_value) {
  validate(params);
  if (length < 1) throw ArgumentError("stability_trace: length must be >= 1");
  if (params.input_channels != 1) {
    throw ShapeError("stability_trace: chain expects input_channels == 1");
  }
  const int n = params.hidden_size;
  auto matd = [n](const Mat& m, const std::vector<double>& v, int j) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += static_cast<double>(m.at(k, j)) * v[k];
    return acc;
  };
  std::vector<double> h(n, 0.0), s(n, 0.0);
  std::vector<double> trace;
  trace.reserve(length);
  for (int t = 0; t < length; ++t) {
    std::vector<double> nh(n), ns(n), sp(n);
    std::vector<double> pg(n), pi(n), pf1(n), pf2(n), po(n);
    for (int j = 0; j < n; ++j) {
      // Both predecessors alias the previous step.
      pg[j] = params.b_g[j] + params.w_g.at(0, j) * input_value +
              matd(params.u1_g, h, j) + matd(params.u2_g, h, j);
      pi[j] = params.b_i[j] + params.w_i.at(0, j) * input_value +
              matd(params.u1_i, h, j) + matd(params.u2_i, h, j);
      pf1[j] = params.b_f1[j] + params.w_f1.at(0, j) * input_value +
               matd(params.u1_f1, h, j) + matd(params.u2_f1, h, j);
      pf2[j] = params.b_f2[j] + params.w_f2.at(0, j) * input_value +
               matd(params.u1_f2, h, j) + matd(params.u2_f2, h, j);
      po[j] = params.b_o[j] + params.w_o.at(0, j) * input_value +
              matd(params.u1_o, h, j) + matd(params.u2_o, h, j);
    }
    if (kind == CellKind::Plain) {
      for (int j = 0; j < n; ++j) {
        const double a = std::tanh(pg[j]);
        const double i = sigd(pi[j]);
        const double f1 = sigd(pf1[j]);
        const double f2 = sigd(pf2[j]);
        ns[j] = i * a + f1 * s[j] + f2 * s[j];
        nh[j] = sigd(po[j]) * std::tanh(ns[j]);
      }
    } else {
      for (int j = 0; j < n; ++j) {
        const double ls = sigd(pf1[j]);
        sp[j] = ls * s[j] + (1.0 - ls) * s[j];
      }
      for (int j = 0; j < n; ++j) {
        const double a = std::tanh(pg[j]);
        const double lu = sigd(pf2[j]);
        ns[j] = lu * sp[j] + (1.0 - lu) * a;
        const double o1 = sigd(pi[j] + matd(params.v1, sp, j));
        const double o2 = sigd(po[j] + matd(params.v2, sp, j));
        nh[j] = o1 * std::tanh(ns[j]) + o2 * std::tanh(sp[j]);
      }
    }
    h.swap(nh);
    s.swap(ns);
    double peak = 0.0;
    for (double v : s) peak = std::max(peak, std::abs(v));
    trace.push_back(peak);
  }
  return trace;
}

std::vector<double> stability_trace(CellKind kind, int length,
                                    double forget_bias) {
  return stability_trace(kind, canonical_trace_params(forget_bias), length,
                         1.0);
}

void save_cell_params(const CellParams& p, CellKind kind,
                      const std::string& path) {
  validate(p);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ParseError("cannot open " + path + " for writing");
  os.write("GPCP", 4);
  binio::put_u32(os, 1);  // version
  binio::put_u32(os, static_cast<std::uint32_t>(p.hidden_size));
  binio::put_u32(os, static_cast<std::uint32_t>(p.input_channels));
  binio::put_u32(os, static_cast<std::uint32_t>(kind));

  nlohmann::json blocks = nlohmann::json::array();
  std::size_t offset = 20;  // header bytes
  for_each_block(p, [&os](const char*, const std::vector<float>& v) {
    binio::put_f32_block(os, v);
  });
  append_mat_block(blocks, "w_g", p.w_g, offset);
  append_mat_block(blocks, "w_i", p.w_i, offset);
  append_mat_block(blocks, "w_f1", p.w_f1, offset);
  append_mat_block(blocks, "w_f2", p.w_f2, offset);
  append_mat_block(blocks, "w_o", p.w_o, offset);
  append_mat_block(blocks, "u1_g", p.u1_g, offset);
  append_mat_block(blocks, "u1_i", p.u1_i, offset);
  append_mat_block(blocks, "u1_f1", p.u1_f1, offset);
  append_mat_block(blocks, "u1_f2", p.u1_f2, offset);
  append_mat_block(blocks, "u1_o", p.u1_o, offset);
  append_mat_block(blocks, "u2_g", p.u2_g, offset);
  append_mat_block(blocks, "u2_i", p.u2_i, offset);
  append_mat_block(blocks, "u2_f1", p.u2_f1, offset);
  append_mat_block(blocks, "u2_f2", p.u2_f2, offset);
  append_mat_block(blocks, "u2_o", p.u2_o, offset);
  append_mat_block(blocks, "v1", p.v1, offset);
  append_mat_block(blocks, "v2", p.v2, offset);
  append_vec_block(blocks, "b_g", p.b_g, offset);
  append_vec_block(blocks, "b_i", p.b_i, offset);
  append_vec_block(blocks, "b_f1", p.b_f1, offset);
  append_vec_block(blocks, "b_f2", p.b_f2, offset);
  append_vec_block(blocks, "b_o", p.b_o, offset);

  nlohmann::json sidecar = {{"format", "GPCP"},
                            {"version", 1},
                            {"hidden_size", p.hidden_size},
                            {"input_channels", p.input_channels},
                            {"cell_kind", cell_kind_name(kind)},
                            {"blocks", blocks}};
  std::ofstream js(path + ".json");
  if (!js) throw ParseError("cannot open " + path + ".json for writing");
  js << sidecar.dump(2) << "\n";
}

void write_cell_blocks(std::ostream& os, const CellParams& p) {
  for_each_block(p, [&os](const char*, const std::vector<float>& v) {
    binio::put_f32_block(os, v);
  });
}

void read_cell_blocks(std::istream& is, CellParams& p) {
  for_each_block(p, [&is](const char*, std::vector<float>& v) {
    binio::get_f32_block(is, v);
  });
}

CellParams load_cell_params(const std::string& path, CellKind* kind) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "GPCP") {
    throw ParseError(path + ": not a cell parameter container");
  }
  const std::uint32_t version = binio::get_u32(is);
  if (version != 1) {
    throw ParseError(path + ": unsupported container version " +
                     std::to_string(version));
  }
  const int hidden = static_cast<int>(binio::get_u32(is));
  const int in_ch = static_cast<int>(binio::get_u32(is));
  const std::uint32_t kind_tag = binio::get_u32(is);
  if (kind_tag > 1) throw ParseError(path + ": bad cell kind tag");
  if (kind) *kind = static_cast<CellKind>(kind_tag);
  CellParams p = zero_cell_params(hidden, in_ch);
  for_each_block(p, [&is](const char*, std::vector<float>& v) {
    binio::get_f32_block(is, v);
  });
  validate(p);
  return p;
}

}  // namespace gridpack
