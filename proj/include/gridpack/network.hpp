#ifndef GRIDPACK_NETWORK_HPP
#define GRIDPACK_NETWORK_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gridpack/cells.hpp"
#include "gridpack/conv.hpp"
#include "gridpack/grid.hpp"

namespace gridpack {

// Three multi-directional recurrent stages, two block-strided convolutions
// between them, one shared 1x1 projection at the end.
struct NetworkConfig {
  std::vector<int> hidden_sizes;                  // 3 entries
  std::vector<std::pair<int, int>> conv_strides;  // 2 entries, (h, w)
  std::vector<int> conv_channels;                 // 2 entries
  std::vector<std::string> alphabet;              // blank at index 0
  CellKind cell_kind = CellKind::LeakyLp;
  int input_channels = 1;  // channels of the raw input grids
};

// Demo configuration: Leaky LP cells sized [4, 20, 100].
NetworkConfig default_network_config();
void validate(const NetworkConfig& cfg);

std::string config_to_json(const NetworkConfig& cfg);
NetworkConfig config_from_json(const std::string& text);

// Pre-softmax character scores, one row per timestep.
struct LogitSequence {
  int timesteps = 0;
  int alphabet_size = 0;
  std::vector<float> values;  // timesteps x alphabet_size, row-major

  float& at(int t, int a) {
    return values[static_cast<std::size_t>(t) * alphabet_size + a];
  }
  float at(int t, int a) const {
    return values[static_cast<std::size_t>(t) * alphabet_size + a];
  }
};

struct NetworkParams {
  std::vector<std::array<CellParams, 4>> recurrent;  // per stage, 4 directions
  std::vector<std::array<ConvParams, 4>> convs;      // per stage, summed
  ConvParams projection;                             // 1x1, shared
};

NetworkParams init_network_params(const NetworkConfig& cfg,
                                  std::uint64_t seed);
void validate_params(const NetworkConfig& cfg, const NetworkParams& params);

// Full pipeline over a list of variable-size single-channel examples. Every
// recurrent stage packs the list, scans all four directions and unpacks;
// every convolution stage runs through tensor-list chunking; direction
// outputs are summed after each convolution and before the projection.
// Per-example results match single-example runs.
std::vector<LogitSequence> network_forward(
    const NetworkConfig& cfg, const NetworkParams& params,
    const std::vector<ImageGrid>& examples);

// Output timesteps for an input of the given width; matches network_forward.
int sequence_length(const NetworkConfig& cfg, int width);

// Argmax per timestep (ties to the lower index), collapse adjacent repeats,
// drop blanks.
std::string greedy_ctc_decode(const LogitSequence& logits,
                              const std::vector<std::string>& alphabet);

void save_network_params(const NetworkConfig& cfg, const NetworkParams& params,
                         const std::string& path);
NetworkParams load_network_params(const NetworkConfig& cfg,
                                  const std::string& path);

}  // namespace gridpack

#endif
