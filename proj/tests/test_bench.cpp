#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gridpack/bench.hpp"
#include "gridpack/errors.hpp"
#include "helpers.hpp"

#include "json.hpp"

using namespace gridpack;

namespace {

SizeManifest manifest_of(const std::vector<std::pair<int, int>>& hw) {
  SizeManifest m;
  int i = 0;
  for (auto [h, w] : hw) {
    m.records.push_back({"e" + std::to_string(i++), h, w});
  }
  return m;
}

}  // namespace

TEST_CASE("manifest CSV loading") {
  const std::string path = "manifest_test.csv";
  {
    std::ofstream os(path);
    os << "id,height,width\na,2,3\nb,4,5\nc,1,1\n";
  }
  SizeManifest m = load_manifest(path);
  REQUIRE(m.records.size() == 3);
  CHECK(m.records[0].id == "a");
  CHECK(m.records[1].height == 4);
  CHECK(m.records[2].width == 1);
  std::remove(path.c_str());
}

TEST_CASE("manifest CSV rejects malformed rows with line numbers") {
  const std::string path = "manifest_bad.csv";
  auto write_and_load = [&](const std::string& text) {
    std::ofstream os(path);
    os << text;
    os.close();
    return load_manifest(path);
  };
  CHECK_THROWS_WITH_AS(write_and_load("id,h,w\n"), doctest::Contains(":1"),
                       ParseError);
  CHECK_THROWS_WITH_AS(write_and_load("id,height,width\na,2\n"),
                       doctest::Contains(":2"), ParseError);
  CHECK_THROWS_WITH_AS(write_and_load("id,height,width\na,2,x\n"),
                       doctest::Contains(":2"), ParseError);
  CHECK_THROWS_WITH_AS(write_and_load("id,height,width\na,0,3\n"),
                       doctest::Contains("positive"), ParseError);
  CHECK_THROWS_WITH_AS(write_and_load("id,height,width\na,2,3\na,2,3\n"),
                       doctest::Contains("duplicate"), ParseError);
  std::remove(path.c_str());
}

TEST_CASE("synthetic manifests are deterministic and in range") {
  SizeManifest a = synth_manifest(SizePreset::WordLike, 200, 42);
  SizeManifest b = synth_manifest(SizePreset::WordLike, 200, 42);
  REQUIRE(a.records.size() == 200);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].height == b.records[i].height);
    CHECK(a.records[i].width == b.records[i].width);
  }
  for (const auto& r : a.records) {
    CHECK(r.width >= 4);
    CHECK(r.width <= 200);
    const bool bucketed = r.height == 12 || r.height == 16 || r.height == 20 ||
                          r.height == 24 || r.height == 28;
    CHECK(bucketed);
  }
  SizeManifest c = synth_manifest(SizePreset::WordLike, 200, 43);
  bool differs = false;
  for (std::size_t i = 0; i < c.records.size(); ++i) {
    differs |= c.records[i].width != a.records[i].width;
  }
  CHECK(differs);

  SizeManifest lines = synth_manifest(SizePreset::LineLike, 50, 1);
  for (const auto& r : lines.records) {
    CHECK(r.width >= 150);
    CHECK(r.width <= 220);
  }
}

TEST_CASE("padding stats: identical sizes give zero LMBR padding") {
  SizeManifest m = manifest_of({{4, 6}, {4, 6}, {4, 6}, {4, 6}});
  BenchReport r = padding_stats(m, 2, Strategy::Lmbr);
  CHECK(r.padded_fraction == 0.0);
  CHECK(r.total_pixels == 4 * 24);
  for (double f : r.per_batch_padded_fraction) CHECK(f == 0.0);
}

TEST_CASE("padding stats: two-example arithmetic") {
  SizeManifest m = manifest_of({{2, 4}, {2, 2}});
  BenchReport r = padding_stats(m, 2, Strategy::Lmbr);
  CHECK(r.padded_pixels == 4);  // 2*2*4 - (8+4)
  CHECK(r.padded_fraction == doctest::Approx(0.25));
  CHECK(r.total_pixels == 16);
}

TEST_CASE("packing padding never exceeds LMBR padding on preset batches") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    SizeManifest words = synth_manifest(SizePreset::WordLike, 120, seed);
    BenchReport lm = padding_stats(words, 20, Strategy::Lmbr);
    BenchReport pk = padding_stats(words, 20, Strategy::Packing);
    REQUIRE(lm.per_batch_padded_fraction.size() ==
            pk.per_batch_padded_fraction.size());
    for (std::size_t i = 0; i < lm.per_batch_padded_fraction.size(); ++i) {
      CHECK(pk.per_batch_padded_fraction[i] <=
            lm.per_batch_padded_fraction[i]);
    }
    CHECK(pk.padded_fraction < lm.padded_fraction);
  }
}

TEST_CASE("word-like LMBR padding sits near the three-quarters mark") {
  SizeManifest words = synth_manifest(SizePreset::WordLike, 400, 7);
  BenchReport lm = padding_stats(words, 20, Strategy::Lmbr);
  CHECK(lm.padded_fraction > 0.6);
  CHECK(lm.padded_fraction < 0.9);
}

TEST_CASE("max batch under budget: uniform sizes tie, tiny budgets cap at 1") {
  SizeManifest m = manifest_of({{10, 8}, {10, 8}, {10, 8}, {10, 8},
                                {10, 8}, {10, 8}, {10, 8}, {10, 8},
                                {10, 8}, {10, 8}, {10, 8}, {10, 8}});
  MemoryModel mem;
  mem.bytes_per_valid_pixel = 10.0;
  mem.bytes_per_padded_pixel = 10.0;
  mem.fixed_overhead_bytes = 100;
  // Budget covers six 10x8 examples plus the five packing separator rows;
  // height 10 > 6 keeps that overhead below the next example's cost.
  mem.budget_bytes = 100 + 6 * 80 * 10 + 5 * 8 * 10;
  const int lmbr = max_batch_under_budget(m, mem, Strategy::Lmbr);
  const int pack = max_batch_under_budget(m, mem, Strategy::Packing);
  CHECK(lmbr == 6);
  CHECK(pack == 6);

  mem.budget_bytes = 100 + 80 * 10;  // exactly one example
  CHECK(max_batch_under_budget(m, mem, Strategy::Lmbr) == 1);

  mem.budget_bytes = 800;  // below a single example
  CHECK_THROWS_AS(max_batch_under_budget(m, mem, Strategy::Lmbr),
                  CapacityError);
}

TEST_CASE("packing capacity dominates LMBR capacity on presets") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    SizeManifest words = synth_manifest(SizePreset::WordLike, 240, seed);
    MemoryModel mem;
    const int lmbr = max_batch_under_budget(words, mem, Strategy::Lmbr);
    const int pack = max_batch_under_budget(words, mem, Strategy::Packing);
    CHECK(pack >= lmbr);
    CHECK(static_cast<double>(pack) / lmbr >= 4.0);
  }
}

TEST_CASE("packing throughput keeps up with the padded baseline") {
  NetworkConfig cfg;
  cfg.hidden_sizes = {1, 2, 2};
  cfg.conv_strides = {{2, 2}, {2, 2}};
  cfg.conv_channels = {2, 2};
  cfg.alphabet = {"", "a"};
  cfg.cell_kind = CellKind::LeakyLp;

  // Sizes large enough that the ~4x pixel saving dwarfs per-batch overhead
  // and scheduler noise; compare best-of-3 walls.
  WidthDist wd;
  wd.kind = WidthDist::Kind::LogNormal;
  wd.a = 4.2;
  wd.b = 0.8;
  wd.min_w = 8;
  wd.max_w = 400;
  SizeManifest m = synth_manifest(16, {24, 32, 40, 48, 56}, wd, 5, "t");
  MemoryModel mem;
  mem.budget_bytes = 64000000;
  auto reports = throughput_bench(cfg, m, {Strategy::Lmbr, Strategy::Packing},
                                  3, 11, mem);
  REQUIRE(reports.size() == 2);
  CHECK(reports[1].wall_min_s <= reports[0].wall_min_s);
}

TEST_CASE("throughput bench aggregates repetitions") {
  NetworkConfig cfg;
  cfg.hidden_sizes = {1, 2, 2};
  cfg.conv_strides = {{2, 2}, {2, 2}};
  cfg.conv_channels = {2, 2};
  cfg.alphabet = {"", "a"};
  cfg.cell_kind = CellKind::LeakyLp;

  SizeManifest m = manifest_of({{6, 10}, {6, 6}, {8, 12}, {6, 8}, {8, 6},
                                {6, 14}, {8, 8}, {6, 6}});
  MemoryModel mem;
  mem.budget_bytes = 1 << 22;
  auto reports = throughput_bench(cfg, m, {Strategy::Lmbr, Strategy::Packing},
                                  3, 9, mem);
  REQUIRE(reports.size() == 2);
  for (const auto& r : reports) {
    CHECK(r.repetitions == 3);
    CHECK(r.wall_min_s <= r.wall_median_s);
    CHECK(r.wall_median_s <= r.wall_max_s);
    CHECK(r.examples_per_second > 0.0);
    CHECK(r.padded_fraction >= 0.0);
    CHECK(r.padded_fraction <= 1.0);
  }
  CHECK(throughput_bench(cfg, m, {}, 3, 9, mem).empty());
}

TEST_CASE("report JSON carries the schema fields") {
  SizeManifest m = manifest_of({{2, 4}, {2, 2}});
  BenchReport r = padding_stats(m, 2, Strategy::Lmbr);
  auto j = nlohmann::json::parse(report_to_json(r));
  CHECK(j.at("schema_version") == 1);
  CHECK(j.at("strategy") == "LMBR");
  CHECK(j.at("batch_size") == 2);
  CHECK(j.at("padded_fraction") == doctest::Approx(0.25));
  CHECK(j.at("total_pixels") == 16);
  CHECK(j.contains("peak_batch_memory_bytes"));
  CHECK(j.contains("skew_overhead_fraction"));
}

TEST_CASE("stability report CSV holds the demonstrator traces") {
  std::stringstream ss;
  stability_report(200, {3.0}, ss);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "step,plain_bias_3,leaky_lp_bias_3");
  double last_plain = 0.0, max_leaky = 0.0, final_plain = 0.0;
  std::string line;
  int rows = 0;
  while (std::getline(ss, line)) {
    ++rows;
    std::stringstream ls(line);
    std::string step, plain, leaky;
    std::getline(ls, step, ',');
    std::getline(ls, plain, ',');
    std::getline(ls, leaky, ',');
    const double p = std::stod(plain);
    CHECK(p > last_plain);  // strictly increasing
    last_plain = p;
    final_plain = p;
    max_leaky = std::max(max_leaky, std::stod(leaky));
  }
  CHECK(rows == 200);
  CHECK(final_plain > 1e6);
  CHECK(max_leaky <= 1.0);
}
