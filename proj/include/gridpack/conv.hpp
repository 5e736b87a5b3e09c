#ifndef GRIDPACK_CONV_HPP
#define GRIDPACK_CONV_HPP

#include <vector>

#include "gridpack/grid.hpp"
#include "gridpack/rng.hpp"

namespace gridpack {

// Convolution with m input groups and n output groups (n an exact multiple
// of m). Output group j reads only input group j*m/n. Weight layout:
// out_channels x (in_channels/m) x kernel_h x kernel_w, row-major.
struct ConvParams {
  int in_channels = 0;
  int out_channels = 0;
  int kernel_h = 1;
  int kernel_w = 1;
  int stride_h = 1;
  int stride_w = 1;
  int groups_in = 1;   // m
  int groups_out = 1;  // n
  std::vector<float> weights;
  std::vector<float> bias;

  float weight(int out, int in, int kr, int kc) const {
    const int in_per_group = in_channels / groups_in;
    return weights[((static_cast<std::size_t>(out) * in_per_group + in) *
                        kernel_h +
                    kr) *
                       kernel_w +
                   kc];
  }
};

ConvParams zero_conv_params(int in_channels, int out_channels, int kernel_h,
                            int kernel_w, int groups_in = 1,
                            int groups_out = 1);
ConvParams random_conv_params(int in_channels, int out_channels, int kernel_h,
                              int kernel_w, Rng& rng, int groups_in = 1,
                              int groups_out = 1);
// Grouping divisibility and weight/bias sizes; throws ShapeError.
void validate(const ConvParams& p);

// 1x1 kernel and stride; per-pixel grouped linear map.
ImageGrid grouped_pointwise_conv(const ConvParams& p, const ImageGrid& g);

// Repeat channel blocks (block i repeated replication[i] times, order kept).
// Lets one grouped call serve inputs that need different output counts.
ImageGrid replicate_inputs_for_groups(const ImageGrid& g,
                                      const std::vector<int>& replication);

// kernel == stride, so kernel applications never overlap. Input is
// zero-padded bottom/right to block multiples; output is
// ceil(H/kh) x ceil(W/kw) x out_channels.
ImageGrid block_strided_conv(const ConvParams& p, const ImageGrid& g);

}  // namespace gridpack

#endif
