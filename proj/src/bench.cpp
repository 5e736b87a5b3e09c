#include "gridpack/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "json.hpp"

#include "gridpack/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gridpack {

namespace {

using json = nlohmann::json;

struct BatchPixels {
  std::int64_t valid = 0;
  std::int64_t padded = 0;
  std::int64_t skewed = 0;  // processed pixels after skewing the carrier
};

std::vector<std::vector<GridExtent>> form_batches(
    const std::vector<GridExtent>& sizes, int batch_size) {
  std::vector<std::vector<GridExtent>> out;
  for (std::size_t i = 0; i < sizes.size();
       i += static_cast<std::size_t>(batch_size)) {
    const std::size_t end =
        std::min(sizes.size(), i + static_cast<std::size_t>(batch_size));
    out.emplace_back(sizes.begin() + static_cast<std::ptrdiff_t>(i),
                     sizes.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

BatchPixels batch_pixels(const std::vector<GridExtent>& batch,
                         Strategy strategy) {
  BatchPixels px;
  for (const auto& e : batch) {
    px.valid += static_cast<std::int64_t>(e.height) * e.width;
  }
  if (strategy == Strategy::Lmbr) {
    int max_h = 0, max_w = 0;
    for (const auto& e : batch) {
      max_h = std::max(max_h, e.height);
      max_w = std::max(max_w, e.width);
    }
    const std::int64_t area =
        static_cast<std::int64_t>(batch.size()) * max_h * max_w;
    px.padded = area - px.valid;
    // Under LMBR every padded example is skewed individually.
    px.skewed = static_cast<std::int64_t>(batch.size()) * max_h *
                (max_w + max_h - 1);
  } else {
    const PackingLayout layout = plan_packing(batch);
    const std::int64_t area =
        static_cast<std::int64_t>(layout.total_height) * layout.total_width;
    px.padded = area - px.valid;
    px.skewed = static_cast<std::int64_t>(layout.total_height) *
                (layout.total_width + layout.total_height - 1);
  }
  return px;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void validate(const MemoryModel& mem) {
  if (mem.bytes_per_valid_pixel <= 0.0 || mem.bytes_per_padded_pixel < 0.0 ||
      mem.fixed_overhead_bytes < 0 || mem.budget_bytes <= 0) {
    throw ArgumentError("memory model: costs must be positive");
  }
}

SizeManifest sort_by_size(const SizeManifest& m) {
  SizeManifest out = m;
  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const SizeRecord& a, const SizeRecord& b) {
                     return static_cast<std::int64_t>(a.height) * a.width >
                            static_cast<std::int64_t>(b.height) * b.width;
                   });
  return out;
}

std::string strategy_name(Strategy s) {
  return s == Strategy::Lmbr ? "LMBR" : "PACKING";
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "LMBR" || name == "lmbr") return Strategy::Lmbr;
  if (name == "PACKING" || name == "packing") return Strategy::Packing;
  throw ArgumentError("unknown strategy: " + name);
}

std::string report_to_json(const BenchReport& r) {
  json j = {{"schema_version", 1},
            {"strategy", r.strategy},
            {"batch_size", r.batch_size},
            {"padded_fraction", r.padded_fraction},
            {"total_pixels", r.total_pixels},
            {"valid_pixels", r.valid_pixels},
            {"padded_pixels", r.padded_pixels},
            {"peak_batch_memory_bytes", r.peak_batch_memory_bytes},
            {"skew_overhead_fraction", r.skew_overhead_fraction},
            {"per_batch_padded_fraction", r.per_batch_padded_fraction}};
  if (r.repetitions > 0) {
    j["repetitions"] = r.repetitions;
    j["wall_time_per_batch_s"] = r.wall_time_per_batch_s;
    j["examples_per_second"] = r.examples_per_second;
    j["wall_time_s"] = {{"min", r.wall_min_s},
                        {"median", r.wall_median_s},
                        {"max", r.wall_max_s}};
    j["environment"] = {{"threads", r.threads}, {"compiler", __VERSION__}};
  }
  return j.dump(2);
}

std::string reports_to_json(const std::vector<BenchReport>& rs) {
  json arr = json::array();
  for (const auto& r : rs) arr.push_back(json::parse(report_to_json(r)));
  return arr.dump(2);
}

double batch_cost(const std::vector<GridExtent>& batch, Strategy strategy,
                  const MemoryModel& mem) {
  validate(mem);
  const BatchPixels px = batch_pixels(batch, strategy);
  return static_cast<double>(mem.fixed_overhead_bytes) +
         static_cast<double>(px.valid) * mem.bytes_per_valid_pixel +
         static_cast<double>(px.padded) * mem.bytes_per_padded_pixel;
}

BenchReport padding_stats(const SizeManifest& m, int batch_size,
                          Strategy strategy, const MemoryModel& mem) {
  if (batch_size < 1) throw ArgumentError("padding_stats: batch_size >= 1");
  if (m.records.empty()) throw ArgumentError("padding_stats: empty manifest");
  BenchReport r;
  r.strategy = strategy_name(strategy);
  r.batch_size = batch_size;
  std::int64_t skewed_total = 0;
  for (const auto& batch : form_batches(m.extents(), batch_size)) {
    const BatchPixels px = batch_pixels(batch, strategy);
    r.valid_pixels += px.valid;
    r.padded_pixels += px.padded;
    skewed_total += px.skewed;
    r.per_batch_padded_fraction.push_back(
        static_cast<double>(px.padded) /
        static_cast<double>(px.valid + px.padded));
    r.peak_batch_memory_bytes =
        std::max(r.peak_batch_memory_bytes, batch_cost(batch, strategy, mem));
  }
  r.total_pixels = r.valid_pixels + r.padded_pixels;
  r.padded_fraction =
      static_cast<double>(r.padded_pixels) / static_cast<double>(r.total_pixels);
  r.skew_overhead_fraction =
      static_cast<double>(skewed_total - r.total_pixels) /
      static_cast<double>(skewed_total);
  return r;
}

int max_batch_under_budget(const SizeManifest& m, const MemoryModel& mem,
                           Strategy strategy) {
  if (m.records.empty()) {
    throw ArgumentError("max_batch_under_budget: empty manifest");
  }
  const std::vector<GridExtent> sizes = m.extents();
  for (const auto& e : sizes) {
    if (batch_cost({e}, strategy, mem) >
        static_cast<double>(mem.budget_bytes)) {
      throw CapacityError("budget cannot hold example of " +
                          std::to_string(e.height) + "x" +
                          std::to_string(e.width));
    }
  }
  int best = 1;
  const int n = static_cast<int>(sizes.size());
  for (int b = 2; b <= n; ++b) {
    bool ok = true;
    for (const auto& batch : form_batches(sizes, b)) {
      if (batch_cost(batch, strategy, mem) >
          static_cast<double>(mem.budget_bytes)) {
        ok = false;
        break;
      }
    }
    if (ok) best = b;
  }
  return best;
}

std::vector<ImageGrid> pad_batch_to_max(const std::vector<ImageGrid>& batch) {
  int max_h = 0, max_w = 0;
  for (const auto& g : batch) {
    max_h = std::max(max_h, g.height);
    max_w = std::max(max_w, g.width);
  }
  std::vector<ImageGrid> out;
  out.reserve(batch.size());
  for (const auto& g : batch) {
    ImageGrid padded = grid_create(max_h, max_w, g.channels, 0.0f);
    for (int r = 0; r < g.height; ++r) {
      for (int c = 0; c < g.width; ++c) {
        for (int ch = 0; ch < g.channels; ++ch) {
          padded.at(r, c, ch) = g.at(r, c, ch);
        }
      }
    }
    out.push_back(std::move(padded));
  }
  return out;
}

std::vector<BenchReport> throughput_bench(const NetworkConfig& cfg,
                                          const SizeManifest& m,
                                          const std::vector<Strategy>& strategies,
                                          int repetitions, std::uint64_t seed,
                                          const MemoryModel& mem,
                                          bool parallel_batches) {
  validate(cfg);
  validate(mem);
  if (repetitions < 1) {
    throw ArgumentError("throughput_bench: repetitions must be >= 1");
  }
  if (strategies.empty()) return {};

  // Same synthesized pixel content for every strategy.
  Rng rng(seed);
  std::vector<ImageGrid> grids;
  grids.reserve(m.records.size());
  for (const auto& rec : m.records) {
    ImageGrid g = grid_create(rec.height, rec.width, 1, 0.0f);
    for (float& v : g.data) v = rng.uniform_float(0.0f, 1.0f);
    grids.push_back(std::move(g));
  }
  const NetworkParams params = init_network_params(cfg, seed);

  std::vector<BenchReport> out;
  for (Strategy strategy : strategies) {
    const int b = max_batch_under_budget(m, mem, strategy);
    BenchReport r = padding_stats(m, b, strategy, mem);
    r.repetitions = repetitions;

    std::vector<std::vector<ImageGrid>> batches;
    for (std::size_t i = 0; i < grids.size();
         i += static_cast<std::size_t>(b)) {
      const std::size_t end =
          std::min(grids.size(), i + static_cast<std::size_t>(b));
      std::vector<ImageGrid> batch(grids.begin() + static_cast<std::ptrdiff_t>(i),
                                   grids.begin() + static_cast<std::ptrdiff_t>(end));
      if (strategy == Strategy::Lmbr) batch = pad_batch_to_max(batch);
      batches.push_back(std::move(batch));
    }

    std::vector<double> walls;
    for (int rep = 0; rep < repetitions; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      if (parallel_batches) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t bi = 0;
             bi < static_cast<std::ptrdiff_t>(batches.size()); ++bi) {
          volatile float sink = 0.0f;
          const auto logits = network_forward(cfg, params, batches[bi]);
          if (!logits.empty() && !logits.front().values.empty()) {
            sink = logits.front().values.front();
          }
          (void)sink;
        }
      } else {
        for (const auto& batch : batches) {
          volatile float sink = 0.0f;
          const auto logits = network_forward(cfg, params, batch);
          if (!logits.empty() && !logits.front().values.empty()) {
            sink = logits.front().values.front();
          }
          (void)sink;
        }
      }
      const auto t1 = std::chrono::steady_clock::now();
      walls.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    r.wall_min_s = *std::min_element(walls.begin(), walls.end());
    r.wall_max_s = *std::max_element(walls.begin(), walls.end());
    r.wall_median_s = median(walls);
    r.wall_time_per_batch_s = r.wall_median_s / static_cast<double>(batches.size());
    r.examples_per_second =
        static_cast<double>(grids.size()) / r.wall_median_s;
#ifdef _OPENMP
    r.threads = omp_get_max_threads();
#else
    r.threads = 1;
#endif
    out.push_back(std::move(r));
  }
  return out;
}

void stability_report(int length, const std::vector<double>& biases,
                      std::ostream& os) {
  if (length < 1) throw ArgumentError("stability_report: length must be >= 1");
  std::vector<std::vector<double>> columns;
  os << "step";
  for (double b : biases) {
    os << ",plain_bias_" << b;
    columns.push_back(stability_trace(CellKind::Plain, length, b));
  }
  for (double b : biases) {
    os << ",leaky_lp_bias_" << b;
    columns.push_back(stability_trace(CellKind::LeakyLp, length, b));
  }
  os << "\n";
  for (int t = 0; t < length; ++t) {
    os << (t + 1);
    for (const auto& col : columns) os << "," << col[t];
    os << "\n";
  }
}

}  // namespace gridpack
