#include "gridpack/ref/naive.hpp"

#include <cmath>
#include <vector>

#include "gridpack/errors.hpp"

namespace gridpack::ref {

namespace {

inline float sigf(float x) { return 1.0f / (1.0f + std::exp(-x)); }

// bias + x.W + h1.U1 + h2.U2 for one gate, one cell.
void cell_pre(const std::vector<float>& x, const std::vector<float>& h1,
              const std::vector<float>& h2, const Mat& w, const Mat& u1,
              const Mat& u2, const std::vector<float>& b,
              std::vector<float>& pre) {
  const int n = w.cols;
  pre.assign(n, 0.0f);
  for (int j = 0; j < n; ++j) pre[j] = b[j];
  for (int k = 0; k < w.rows; ++k) {
    for (int j = 0; j < n; ++j) pre[j] += x[k] * w.at(k, j);
  }
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) pre[j] += h1[k] * u1.at(k, j);
  }
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) pre[j] += h2[k] * u2.at(k, j);
  }
}

}  // namespace

ImageGrid naive_cell_scan(CellKind kind, const CellParams& params,
                          const ImageGrid& input, const MaskGrid* mask) {
  validate(params);
  validate(input);
  if (input.channels != params.input_channels) {
    throw ShapeError("naive_cell_scan: channel mismatch");
  }
  if (mask && (mask->height != input.height || mask->width != input.width)) {
    throw ShapeError("naive_cell_scan: mask shape mismatch");
  }
  const int n = params.hidden_size;
  const std::vector<float> zeros(n, 0.0f);
  ImageGrid hidden = grid_create(input.height, input.width, n, 0.0f);
  // Memory states kept per cell so the top predecessor stays available.
  std::vector<std::vector<float>> mem(
      static_cast<std::size_t>(input.height) * input.width, zeros);
  std::vector<float> x(params.input_channels);
  std::vector<float> h1(n), h2(n), s1(n), s2(n);
  std::vector<float> pg, pi, pf1, pf2, po;

  for (int r = 0; r < input.height; ++r) {
    for (int c = 0; c < input.width; ++c) {
      const bool valid = !mask || mask->at(r, c) != 0;
      float* hout = &hidden.at(r, c, 0);
      std::vector<float>& sout = mem[static_cast<std::size_t>(r) * input.width + c];
      if (!valid) continue;  // grids start zeroed
      for (int ch = 0; ch < params.input_channels; ++ch) {
        x[ch] = input.at(r, c, ch);
      }
      if (c > 0) {
        for (int j = 0; j < n; ++j) h1[j] = hidden.at(r, c - 1, j);
        s1 = mem[static_cast<std::size_t>(r) * input.width + c - 1];
      } else {
        h1 = zeros;
        s1 = zeros;
      }
      if (r > 0) {
        for (int j = 0; j < n; ++j) h2[j] = hidden.at(r - 1, c, j);
        s2 = mem[static_cast<std::size_t>(r - 1) * input.width + c];
      } else {
        h2 = zeros;
        s2 = zeros;
      }
      cell_pre(x, h1, h2, params.w_g, params.u1_g, params.u2_g, params.b_g, pg);
      cell_pre(x, h1, h2, params.w_i, params.u1_i, params.u2_i, params.b_i, pi);
      cell_pre(x, h1, h2, params.w_f1, params.u1_f1, params.u2_f1, params.b_f1,
               pf1);
      cell_pre(x, h1, h2, params.w_f2, params.u1_f2, params.u2_f2, params.b_f2,
               pf2);
      cell_pre(x, h1, h2, params.w_o, params.u1_o, params.u2_o, params.b_o, po);

      if (kind == CellKind::Plain) {
        for (int j = 0; j < n; ++j) {
          const float a = std::tanh(pg[j]);
          const float i = sigf(pi[j]);
          const float f1 = sigf(pf1[j]);
          const float f2 = sigf(pf2[j]);
          const float s = i * a + f1 * s1[j] + f2 * s2[j];
          sout[j] = s;
          hout[j] = sigf(po[j]) * std::tanh(s);
        }
      } else {
        std::vector<float> sp(n);
        for (int j = 0; j < n; ++j) {
          const float ls = sigf(pf1[j]);
          sp[j] = ls * s1[j] + (1.0f - ls) * s2[j];
        }
        for (int k = 0; k < n; ++k) {
          for (int j = 0; j < n; ++j) pi[j] += sp[k] * params.v1.at(k, j);
        }
        for (int k = 0; k < n; ++k) {
          for (int j = 0; j < n; ++j) po[j] += sp[k] * params.v2.at(k, j);
        }
        for (int j = 0; j < n; ++j) {
          const float a = std::tanh(pg[j]);
          const float lu = sigf(pf2[j]);
          const float s = lu * sp[j] + (1.0f - lu) * a;
          sout[j] = s;
          hout[j] = sigf(pi[j]) * std::tanh(s) + sigf(po[j]) * std::tanh(sp[j]);
        }
      }
    }
  }
  return hidden;
}

ImageGrid grouped_conv_loop(const ConvParams& params, const ImageGrid& input) {
  validate(params);
  validate(input);
  if (params.kernel_h != 1 || params.kernel_w != 1) {
    throw ShapeError("grouped_conv_loop: kernel must be 1x1");
  }
  if (input.channels != params.in_channels) {
    throw ShapeError("grouped_conv_loop: channel mismatch");
  }
  const int n = params.groups_out;
  const int m = params.groups_in;
  const int in_per_group = params.in_channels / m;
  const int out_per_group = params.out_channels / n;
  ImageGrid out = grid_create(input.height, input.width, params.out_channels,
                              0.0f);
  // One small dense map per output group, sequentially.
  for (int j = 0; j < n; ++j) {
    const int in_group = j * m / n;
    for (int r = 0; r < input.height; ++r) {
      for (int c = 0; c < input.width; ++c) {
        for (int oo = 0; oo < out_per_group; ++oo) {
          const int o = j * out_per_group + oo;
          float acc = params.bias[o];
          for (int k = 0; k < in_per_group; ++k) {
            acc += params.weight(o, k, 0, 0) *
                   input.at(r, c, in_group * in_per_group + k);
          }
          out.at(r, c, o) = acc;
        }
      }
    }
  }
  return out;
}

ImageGrid block_conv_direct(const ConvParams& params, const ImageGrid& input) {
  validate(params);
  validate(input);
  if (params.kernel_h != params.stride_h || params.kernel_w != params.stride_w) {
    throw ShapeError("block_conv_direct: kernel must equal stride");
  }
  if (input.channels != params.in_channels) {
    throw ShapeError("block_conv_direct: channel mismatch");
  }
  const int out_h = (input.height + params.kernel_h - 1) / params.kernel_h;
  const int out_w = (input.width + params.kernel_w - 1) / params.kernel_w;
  const int in_per_group = params.in_channels / params.groups_in;
  const int out_per_in_group = params.out_channels / params.groups_in;
  ImageGrid out = grid_create(out_h, out_w, params.out_channels, 0.0f);
  for (int br = 0; br < out_h; ++br) {
    for (int bc = 0; bc < out_w; ++bc) {
      for (int o = 0; o < params.out_channels; ++o) {
        const int base = (o / out_per_in_group) * in_per_group;
        float acc = params.bias[o];
        for (int k = 0; k < in_per_group; ++k) {
          for (int kr = 0; kr < params.kernel_h; ++kr) {
            const int r = br * params.kernel_h + kr;
            if (r >= input.height) continue;
            for (int kc = 0; kc < params.kernel_w; ++kc) {
              const int c = bc * params.kernel_w + kc;
              if (c >= input.width) continue;
              acc += params.weight(o, k, kr, kc) * input.at(r, c, base + k);
            }
          }
        }
        out.at(br, bc, o) = acc;
      }
    }
  }
  return out;
}

}  // namespace gridpack::ref
