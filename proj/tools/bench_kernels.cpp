// Microbenchmarks: OpenMP column-scan and conv kernels against the serial
// reference implementations, plus packed vs padded end-to-end inference.

#include <benchmark/benchmark.h>

#include "gridpack/bench.hpp"
#include "gridpack/cells.hpp"
#include "gridpack/chunk.hpp"
#include "gridpack/conv.hpp"
#include "gridpack/manifest.hpp"
#include "gridpack/network.hpp"
#include "gridpack/pack.hpp"
#include "gridpack/ref/naive.hpp"
#include "gridpack/rng.hpp"

using namespace gridpack;

namespace {

ImageGrid bench_grid(int h, int w, int ch, std::uint64_t seed) {
  Rng rng(seed);
  ImageGrid g = grid_create(h, w, ch, 0.0f);
  for (float& v : g.data) v = rng.uniform_float(-1.0f, 1.0f);
  return g;
}

void BM_ScanSkewedOmp(benchmark::State& state) {
  Rng rng(1);
  const int hidden = static_cast<int>(state.range(0));
  CellParams p = random_cell_params(hidden, 1, rng);
  ImageGrid g = bench_grid(48, 160, 1, 2);
  SkewedGrid s = skew(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(leakylp_scan(p, s).data.data());
  }
}
BENCHMARK(BM_ScanSkewedOmp)->Arg(8)->Arg(32);

void BM_ScanNaiveSerial(benchmark::State& state) {
  Rng rng(1);
  const int hidden = static_cast<int>(state.range(0));
  CellParams p = random_cell_params(hidden, 1, rng);
  ImageGrid g = bench_grid(48, 160, 1, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ref::naive_cell_scan(CellKind::LeakyLp, p, g).data.data());
  }
}
BENCHMARK(BM_ScanNaiveSerial)->Arg(8)->Arg(32);

void BM_GroupedConvOmp(benchmark::State& state) {
  Rng rng(3);
  ConvParams p = random_conv_params(32, 64, 1, 1, rng, 2, 8);
  ImageGrid g = bench_grid(64, 64, 32, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(grouped_pointwise_conv(p, g).data.data());
  }
}
BENCHMARK(BM_GroupedConvOmp);

void BM_GroupedConvLoopSerial(benchmark::State& state) {
  Rng rng(3);
  ConvParams p = random_conv_params(32, 64, 1, 1, rng, 2, 8);
  ImageGrid g = bench_grid(64, 64, 32, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ref::grouped_conv_loop(p, g).data.data());
  }
}
BENCHMARK(BM_GroupedConvLoopSerial);

void BM_ChunkedConvList(benchmark::State& state) {
  Rng rng(5);
  ConvParams p = random_conv_params(4, 8, 2, 2, rng);
  std::vector<ImageGrid> tensors;
  for (int i = 0; i < 16; ++i) {
    tensors.push_back(
        bench_grid(8 + i % 5, 40 + 3 * (i % 7), 4, 100 + i));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(conv_tensor_list(p, tensors).data());
  }
}
BENCHMARK(BM_ChunkedConvList);

void BM_PerTensorConvSerial(benchmark::State& state) {
  Rng rng(5);
  ConvParams p = random_conv_params(4, 8, 2, 2, rng);
  std::vector<ImageGrid> tensors;
  for (int i = 0; i < 16; ++i) {
    tensors.push_back(
        bench_grid(8 + i % 5, 40 + 3 * (i % 7), 4, 100 + i));
  }
  for (auto _ : state) {
    for (const auto& t : tensors) {
      benchmark::DoNotOptimize(ref::block_conv_direct(p, t).data.data());
    }
  }
}
BENCHMARK(BM_PerTensorConvSerial);

NetworkConfig forward_bench_config() {
  NetworkConfig cfg;
  cfg.hidden_sizes = {2, 4, 8};
  cfg.conv_strides = {{2, 2}, {2, 2}};
  cfg.conv_channels = {4, 8};
  cfg.alphabet = {"", "a", "b", "c"};
  cfg.cell_kind = CellKind::LeakyLp;
  return cfg;
}

std::vector<ImageGrid> forward_bench_examples() {
  SizeManifest m = synth_manifest(SizePreset::WordLike, 16, 9);
  std::vector<ImageGrid> out;
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    out.push_back(
        bench_grid(m.records[i].height, m.records[i].width, 1, 50 + i));
  }
  return out;
}

void BM_ForwardPacked(benchmark::State& state) {
  NetworkConfig cfg = forward_bench_config();
  NetworkParams params = init_network_params(cfg, 7);
  auto examples = forward_bench_examples();
  for (auto _ : state) {
    benchmark::DoNotOptimize(network_forward(cfg, params, examples).data());
  }
}
BENCHMARK(BM_ForwardPacked);

void BM_ForwardPadded(benchmark::State& state) {
  NetworkConfig cfg = forward_bench_config();
  NetworkParams params = init_network_params(cfg, 7);
  auto examples = pad_batch_to_max(forward_bench_examples());
  for (auto _ : state) {
    benchmark::DoNotOptimize(network_forward(cfg, params, examples).data());
  }
}
BENCHMARK(BM_ForwardPadded);

}  // namespace

BENCHMARK_MAIN();
