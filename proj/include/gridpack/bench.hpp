#ifndef GRIDPACK_BENCH_HPP
#define GRIDPACK_BENCH_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gridpack/manifest.hpp"
#include "gridpack/network.hpp"

namespace gridpack {

enum class Strategy { Lmbr, Packing };
std::string strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

// Abstract per-pixel cost model standing in for a device memory ceiling.
struct MemoryModel {
  double bytes_per_valid_pixel = 512.0;
  double bytes_per_padded_pixel = 512.0;
  std::int64_t fixed_overhead_bytes = 1 << 20;
  std::int64_t budget_bytes = 48000000;
};

void validate(const MemoryModel& mem);

struct BenchReport {
  std::string strategy;
  int batch_size = 0;
  double padded_fraction = 0.0;  // padded / (valid + padded)
  std::int64_t total_pixels = 0;  // processed pixels, valid + padded
  std::int64_t valid_pixels = 0;
  std::int64_t padded_pixels = 0;
  double peak_batch_memory_bytes = 0.0;
  // Extra waste the diagonal skew would add on top, reported separately.
  double skew_overhead_fraction = 0.0;
  std::vector<double> per_batch_padded_fraction;
  // Throughput mode only.
  int repetitions = 0;
  double wall_time_per_batch_s = 0.0;
  double examples_per_second = 0.0;
  double wall_min_s = 0.0;
  double wall_median_s = 0.0;
  double wall_max_s = 0.0;
  int threads = 0;
};

std::string report_to_json(const BenchReport& r);
std::string reports_to_json(const std::vector<BenchReport>& rs);

// Padding accounting over batches formed in manifest order. LMBR pads every
// batch to its own max height/width; PACKING uses the real greedy layout
// (separators count as padding). Pre-skew pixel counts; the skew triangles
// go into skew_overhead_fraction.
BenchReport padding_stats(const SizeManifest& m, int batch_size,
                          Strategy strategy,
                          const MemoryModel& mem = MemoryModel{});

// Batch memory cost under the model.
double batch_cost(const std::vector<GridExtent>& batch, Strategy strategy,
                  const MemoryModel& mem);

// Largest b such that every size-b batch (manifest order) fits the budget.
// Throws CapacityError when the largest single example does not fit.
int max_batch_under_budget(const SizeManifest& m, const MemoryModel& mem,
                           Strategy strategy);

// Runs network_forward over synthesized pixel data at each strategy's
// maximal batch size; wall times aggregated over repetitions. Batches run
// sequentially unless parallel_batches is set, in which case timings measure
// parallel throughput.
std::vector<BenchReport> throughput_bench(const NetworkConfig& cfg,
                                          const SizeManifest& m,
                                          const std::vector<Strategy>& strategies,
                                          int repetitions, std::uint64_t seed,
                                          const MemoryModel& mem = MemoryModel{},
                                          bool parallel_batches = false);

// Reorder records by descending pixel count (stable) before batching.
SizeManifest sort_by_size(const SizeManifest& m);

// CSV of step vs. max |memory| for both cell kinds at each forget bias.
void stability_report(int length, const std::vector<double>& biases,
                      std::ostream& os);

// Pads every example in the batch to the batch max height/width (bottom and
// right), the LMBR baseline preparation.
std::vector<ImageGrid> pad_batch_to_max(const std::vector<ImageGrid>& batch);

}  // namespace gridpack

#endif
