#include "gridpack/network.hpp"

#include <fstream>
#include <string>

#include "json.hpp"

#include "binio.hpp"
#include "gridpack/chunk.hpp"
#include "gridpack/errors.hpp"
#include "gridpack/pack.hpp"

namespace gridpack {

namespace {

using json = nlohmann::json;

ImageGrid add_grids(const ImageGrid& a, const ImageGrid& b) {
  if (!same_shape(a, b)) throw ShapeError("direction sum: shape mismatch");
  ImageGrid out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
  return out;
}

// Width/height progression through the conv stages; throws naming the stage.
std::pair<int, int> stage_dims(const NetworkConfig& cfg, int height, int width,
                               const char* what) {
  int h = height, w = width;
  for (std::size_t i = 0; i < cfg.conv_strides.size(); ++i) {
    const auto [sh, sw] = cfg.conv_strides[i];
    if (h < sh) {
      throw StageUnderflowError(std::string(what) + ": conv stage " +
                                std::to_string(i + 1) + ": height " +
                                std::to_string(h) + " < stride height " +
                                std::to_string(sh));
    }
    if (w < sw) {
      throw StageUnderflowError(std::string(what) + ": conv stage " +
                                std::to_string(i + 1) + ": width " +
                                std::to_string(w) + " < stride width " +
                                std::to_string(sw));
    }
    h = (h + sh - 1) / sh;
    w = (w + sw - 1) / sw;
  }
  return {h, w};
}

// One multi-directional recurrent stage over a whole example list: flip,
// pack, skew, scan, unpack, flip back, per direction.
std::array<std::vector<ImageGrid>, 4> recurrent_stage(
    CellKind kind, const std::array<CellParams, 4>& params,
    const std::vector<ImageGrid>& inputs) {
  std::array<std::vector<ImageGrid>, 4> dir_out;
  for (int d = 0; d < 4; ++d) {
    const bool fh = d == 1 || d == 3;
    const bool fv = d == 2 || d == 3;
    std::vector<ImageGrid> flipped;
    flipped.reserve(inputs.size());
    for (const auto& g : inputs) {
      ImageGrid f = g;
      if (fh) f = flip_horizontal(f);
      if (fv) f = flip_vertical(f);
      flipped.push_back(std::move(f));
    }
    PackedSkewed ps = pack_and_skew(flipped);
    ImageGrid hidden = cell_scan(kind, params[d], ps.grid);
    std::vector<ImageGrid> outs =
        unpack_activations(hidden, ps.layout, Scale{1, 1}, Scale{1, 1});
    for (auto& o : outs) {
      if (fh) o = flip_horizontal(o);
      if (fv) o = flip_vertical(o);
    }
    dir_out[d] = std::move(outs);
  }
  return dir_out;
}

}  // namespace

NetworkConfig default_network_config() {
  NetworkConfig cfg;
  cfg.hidden_sizes = {4, 20, 100};
  cfg.conv_strides = {{2, 2}, {2, 2}};
  cfg.conv_channels = {6, 20};
  cfg.alphabet.push_back("");  // blank
  for (char c = 'a'; c <= 'z'; ++c) cfg.alphabet.push_back(std::string(1, c));
  cfg.alphabet.push_back(" ");
  cfg.alphabet.push_back("'");
  cfg.cell_kind = CellKind::LeakyLp;
  return cfg;
}

void validate(const NetworkConfig& cfg) {
  if (cfg.hidden_sizes.size() != 3) {
    throw ShapeError("config: expected 3 recurrent stages");
  }
  if (cfg.conv_strides.size() != 2 || cfg.conv_channels.size() != 2) {
    throw ShapeError("config: expected 2 intermediate convolutions");
  }
  for (int h : cfg.hidden_sizes) {
    if (h < 1) throw ShapeError("config: hidden sizes must be >= 1");
  }
  for (auto [sh, sw] : cfg.conv_strides) {
    if (sh < 1 || sw < 1) throw ShapeError("config: strides must be >= 1");
  }
  for (int c : cfg.conv_channels) {
    if (c < 1) throw ShapeError("config: conv channels must be >= 1");
  }
  if (cfg.alphabet.empty()) throw ShapeError("config: empty alphabet");
  if (cfg.input_channels < 1) {
    throw ShapeError("config: input_channels must be >= 1");
  }
}

std::string config_to_json(const NetworkConfig& cfg) {
  json strides = json::array();
  for (auto [h, w] : cfg.conv_strides) strides.push_back({h, w});
  json j = {{"hidden_sizes", cfg.hidden_sizes},
            {"conv_strides", strides},
            {"conv_channels", cfg.conv_channels},
            {"alphabet", cfg.alphabet},
            {"cell_kind", cell_kind_name(cfg.cell_kind)},
            {"input_channels", cfg.input_channels}};
  return j.dump(2);
}

NetworkConfig config_from_json(const std::string& text) {
  NetworkConfig cfg;
  try {
    json j = json::parse(text);
    cfg.hidden_sizes = j.at("hidden_sizes").get<std::vector<int>>();
    for (const auto& s : j.at("conv_strides")) {
      cfg.conv_strides.emplace_back(s.at(0).get<int>(), s.at(1).get<int>());
    }
    cfg.conv_channels = j.at("conv_channels").get<std::vector<int>>();
    cfg.alphabet = j.at("alphabet").get<std::vector<std::string>>();
    cfg.cell_kind = cell_kind_from_name(j.at("cell_kind").get<std::string>());
    cfg.input_channels = j.value("input_channels", 1);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config JSON: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

NetworkParams init_network_params(const NetworkConfig& cfg,
                                  std::uint64_t seed) {
  validate(cfg);
  Rng rng(seed);
  NetworkParams params;
  for (int s = 0; s < 3; ++s) {
    const int in_ch = s == 0 ? cfg.input_channels : cfg.conv_channels[s - 1];
    std::array<CellParams, 4> dirs{};
    for (auto& d : dirs) {
      d = random_cell_params(cfg.hidden_sizes[s], in_ch, rng);
    }
    params.recurrent.push_back(std::move(dirs));
    if (s < 2) {
      const auto [kh, kw] = cfg.conv_strides[s];
      std::array<ConvParams, 4> convs{};
      for (auto& c : convs) {
        c = random_conv_params(cfg.hidden_sizes[s], cfg.conv_channels[s], kh,
                               kw, rng);
      }
      params.convs.push_back(std::move(convs));
    }
  }
  params.projection =
      random_conv_params(cfg.hidden_sizes[2],
                         static_cast<int>(cfg.alphabet.size()), 1, 1, rng);
  return params;
}

void validate_params(const NetworkConfig& cfg, const NetworkParams& params) {
  validate(cfg);
  if (params.recurrent.size() != 3 || params.convs.size() != 2) {
    throw ShapeError("params: stage counts do not match config");
  }
  for (int s = 0; s < 3; ++s) {
    const int in_ch = s == 0 ? cfg.input_channels : cfg.conv_channels[s - 1];
    for (const auto& d : params.recurrent[s]) {
      validate(d);
      if (d.hidden_size != cfg.hidden_sizes[s] || d.input_channels != in_ch) {
        throw ShapeError("params: recurrent stage " + std::to_string(s + 1) +
                         " does not match config");
      }
    }
    if (s < 2) {
      const auto [kh, kw] = cfg.conv_strides[s];
      for (const auto& c : params.convs[s]) {
        validate(c);
        if (c.in_channels != cfg.hidden_sizes[s] ||
            c.out_channels != cfg.conv_channels[s] || c.kernel_h != kh ||
            c.kernel_w != kw) {
          throw ShapeError("params: conv stage " + std::to_string(s + 1) +
                           " does not match config");
        }
      }
    }
  }
  validate(params.projection);
  if (params.projection.in_channels != cfg.hidden_sizes[2] ||
      params.projection.out_channels !=
          static_cast<int>(cfg.alphabet.size()) ||
      params.projection.kernel_h != 1 || params.projection.kernel_w != 1) {
    throw ShapeError("params: projection does not match config");
  }
}

std::vector<LogitSequence> network_forward(
    const NetworkConfig& cfg, const NetworkParams& params,
    const std::vector<ImageGrid>& examples) {
  validate_params(cfg, params);
  if (examples.empty()) return {};
  for (std::size_t i = 0; i < examples.size(); ++i) {
    validate(examples[i]);
    if (examples[i].channels != cfg.input_channels) {
      throw ShapeError("forward: example " + std::to_string(i) + " has " +
                       std::to_string(examples[i].channels) +
                       " channels, config expects " +
                       std::to_string(cfg.input_channels));
    }
    stage_dims(cfg, examples[i].height, examples[i].width,
               ("example " + std::to_string(i)).c_str());
  }

  std::vector<ImageGrid> lists = examples;
  for (int s = 0; s < 3; ++s) {
    auto dir_out = recurrent_stage(cfg.cell_kind, params.recurrent[s], lists);
    if (s < 2) {
      std::array<std::vector<ImageGrid>, 4> conv_out;
      for (int d = 0; d < 4; ++d) {
        conv_out[d] = conv_tensor_list(params.convs[s][d], dir_out[d]);
      }
      std::vector<ImageGrid> next;
      next.reserve(lists.size());
      for (std::size_t i = 0; i < lists.size(); ++i) {
        ImageGrid sum = conv_out[0][i];
        for (int d = 1; d < 4; ++d) sum = add_grids(sum, conv_out[d][i]);
        next.push_back(std::move(sum));
      }
      lists = std::move(next);
    } else {
      std::vector<ImageGrid> summed;
      summed.reserve(lists.size());
      for (std::size_t i = 0; i < lists.size(); ++i) {
        ImageGrid sum = dir_out[0][i];
        for (int d = 1; d < 4; ++d) sum = add_grids(sum, dir_out[d][i]);
        summed.push_back(std::move(sum));
      }
      lists = std::move(summed);
    }
  }

  // Shared projection, then the remaining height is sum-pooled so every
  // example yields one score row per timestep.
  std::vector<ImageGrid> projected = conv_tensor_list(params.projection, lists);
  const int a_size = static_cast<int>(cfg.alphabet.size());
  std::vector<LogitSequence> out;
  out.reserve(projected.size());
  for (const auto& g : projected) {
    LogitSequence seq;
    seq.timesteps = g.width;
    seq.alphabet_size = a_size;
    seq.values.assign(static_cast<std::size_t>(g.width) * a_size, 0.0f);
    for (int t = 0; t < g.width; ++t) {
      for (int a = 0; a < a_size; ++a) {
        float acc = 0.0f;
        for (int r = 0; r < g.height; ++r) acc += g.at(r, t, a);
        seq.at(t, a) = acc;
      }
    }
    out.push_back(std::move(seq));
  }
  return out;
}

int sequence_length(const NetworkConfig& cfg, int width) {
  validate(cfg);
  if (width < 1) throw ShapeError("sequence_length: width must be >= 1");
  // Height never limits the timestep count; probe with a tall dummy.
  int tall = 1;
  for (auto [sh, sw] : cfg.conv_strides) tall *= sh;
  return stage_dims(cfg, tall, width, "sequence_length").second;
}

std::string greedy_ctc_decode(const LogitSequence& logits,
                              const std::vector<std::string>& alphabet) {
  if (logits.alphabet_size != static_cast<int>(alphabet.size())) {
    throw ShapeError("decode: logits alphabet size does not match alphabet");
  }
  std::string out;
  int prev = -1;
  for (int t = 0; t < logits.timesteps; ++t) {
    int best = 0;
    float best_v = logits.at(t, 0);
    for (int a = 1; a < logits.alphabet_size; ++a) {
      if (logits.at(t, a) > best_v) {
        best_v = logits.at(t, a);
        best = a;
      }
    }
    if (best != prev) {
      if (best != 0) out += alphabet[best];
      prev = best;
    }
  }
  return out;
}

void save_network_params(const NetworkConfig& cfg, const NetworkParams& params,
                         const std::string& path) {
  validate_params(cfg, params);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ParseError("cannot open " + path + " for writing");
  os.write("GPNW", 4);
  binio::put_u32(os, 1);  // version
  binio::put_u32(os, static_cast<std::uint32_t>(cfg.cell_kind));
  for (int h : cfg.hidden_sizes) {
    binio::put_u32(os, static_cast<std::uint32_t>(h));
  }
  for (auto [sh, sw] : cfg.conv_strides) {
    binio::put_u32(os, static_cast<std::uint32_t>(sh));
    binio::put_u32(os, static_cast<std::uint32_t>(sw));
  }
  for (int c : cfg.conv_channels) {
    binio::put_u32(os, static_cast<std::uint32_t>(c));
  }
  binio::put_u32(os, static_cast<std::uint32_t>(cfg.alphabet.size()));
  binio::put_u32(os, static_cast<std::uint32_t>(cfg.input_channels));
  for (int s = 0; s < 3; ++s) {
    for (const auto& d : params.recurrent[s]) write_cell_blocks(os, d);
    if (s < 2) {
      for (const auto& c : params.convs[s]) {
        binio::put_f32_block(os, c.weights);
        binio::put_f32_block(os, c.bias);
      }
    }
  }
  binio::put_f32_block(os, params.projection.weights);
  binio::put_f32_block(os, params.projection.bias);
}

NetworkParams load_network_params(const NetworkConfig& cfg,
                                  const std::string& path) {
  validate(cfg);
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "GPNW") {
    throw ParseError(path + ": not a network parameter container");
  }
  if (binio::get_u32(is) != 1) {
    throw ParseError(path + ": unsupported container version");
  }
  const auto kind = static_cast<CellKind>(binio::get_u32(is));
  if (kind != cfg.cell_kind) {
    throw ParseError(path + ": cell kind does not match config");
  }
  for (int h : cfg.hidden_sizes) {
    if (binio::get_u32(is) != static_cast<std::uint32_t>(h)) {
      throw ParseError(path + ": hidden sizes do not match config");
    }
  }
  for (auto [sh, sw] : cfg.conv_strides) {
    if (binio::get_u32(is) != static_cast<std::uint32_t>(sh) ||
        binio::get_u32(is) != static_cast<std::uint32_t>(sw)) {
      throw ParseError(path + ": conv strides do not match config");
    }
  }
  for (int c : cfg.conv_channels) {
    if (binio::get_u32(is) != static_cast<std::uint32_t>(c)) {
      throw ParseError(path + ": conv channels do not match config");
    }
  }
  if (binio::get_u32(is) != static_cast<std::uint32_t>(cfg.alphabet.size())) {
    throw ParseError(path + ": alphabet size does not match config");
  }
  if (binio::get_u32(is) != static_cast<std::uint32_t>(cfg.input_channels)) {
    throw ParseError(path + ": input channels do not match config");
  }
  // Build zero-shaped params, then fill blocks in container order.
  NetworkParams params;
  for (int s = 0; s < 3; ++s) {
    const int in_ch = s == 0 ? cfg.input_channels : cfg.conv_channels[s - 1];
    std::array<CellParams, 4> dirs{};
    for (auto& d : dirs) {
      d = zero_cell_params(cfg.hidden_sizes[s], in_ch);
      read_cell_blocks(is, d);
    }
    params.recurrent.push_back(std::move(dirs));
    if (s < 2) {
      const auto [kh, kw] = cfg.conv_strides[s];
      std::array<ConvParams, 4> convs{};
      for (auto& c : convs) {
        c = zero_conv_params(cfg.hidden_sizes[s], cfg.conv_channels[s], kh, kw);
        binio::get_f32_block(is, c.weights);
        binio::get_f32_block(is, c.bias);
      }
      params.convs.push_back(std::move(convs));
    }
  }
  params.projection = zero_conv_params(
      cfg.hidden_sizes[2], static_cast<int>(cfg.alphabet.size()), 1, 1);
  binio::get_f32_block(is, params.projection.weights);
  binio::get_f32_block(is, params.projection.bias);
  validate_params(cfg, params);
  return params;
}

}  // namespace gridpack
