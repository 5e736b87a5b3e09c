#include <algorithm>
#include <cstdio>

#include "doctest.h"
#include "gridpack/errors.hpp"
#include "gridpack/network.hpp"
#include "gridpack/pack.hpp"
#include "helpers.hpp"

using namespace gridpack;

namespace {

// Small configuration so forward passes stay cheap in tests.
NetworkConfig tiny_config(CellKind kind = CellKind::LeakyLp) {
  NetworkConfig cfg;
  cfg.hidden_sizes = {2, 3, 4};
  cfg.conv_strides = {{2, 2}, {2, 2}};
  cfg.conv_channels = {3, 4};
  cfg.alphabet = {"", "a", "b", "c"};
  cfg.cell_kind = kind;
  return cfg;
}

LogitSequence logits_from(const std::vector<std::vector<float>>& rows) {
  LogitSequence seq;
  seq.timesteps = static_cast<int>(rows.size());
  seq.alphabet_size = static_cast<int>(rows.front().size());
  for (const auto& row : rows) {
    seq.values.insert(seq.values.end(), row.begin(), row.end());
  }
  return seq;
}

}  // namespace

TEST_CASE("sequence_length applies the per-stage width rule") {
  NetworkConfig cfg = tiny_config();
  CHECK(sequence_length(cfg, 8) == 2);
  CHECK(sequence_length(cfg, 9) == 3);  // ceil(9/2)=5, ceil(5/2)=3
  CHECK(sequence_length(cfg, 4) == 1);
  CHECK_THROWS_WITH_AS(sequence_length(cfg, 1),
                       doctest::Contains("conv stage 1"), StageUnderflowError);
}

TEST_CASE("greedy decode collapses repeats and drops blanks") {
  std::vector<std::string> alphabet = {"", "a", "b"};
  // all-blank path
  CHECK(greedy_ctc_decode(
            logits_from({{1, 0, 0}, {1, 0, 0}, {1, 0, 0}}), alphabet) == "");
  // a a blank a -> "aa"
  CHECK(greedy_ctc_decode(logits_from({{0, 1, 0}, {0, 1, 0}, {1, 0, 0},
                                       {0, 1, 0}}),
                          alphabet) == "aa");
  // ties resolve to the lower index (blank here)
  CHECK(greedy_ctc_decode(logits_from({{1, 1, 1}}), alphabet) == "");

  std::vector<std::string> hello = {"", "h", "e", "l", "o"};
  auto one_hot = [](int idx) {
    std::vector<float> row(5, 0.0f);
    row[static_cast<std::size_t>(idx)] = 1.0f;
    return row;
  };
  CHECK(greedy_ctc_decode(
            logits_from({one_hot(1), one_hot(1), one_hot(2), one_hot(0),
                         one_hot(3), one_hot(3), one_hot(0), one_hot(3),
                         one_hot(4)}),
            hello) == "hello");
}

TEST_CASE("all-zero parameters produce all-zero logits") {
  NetworkConfig cfg = tiny_config();
  NetworkParams params = init_network_params(cfg, 1);
  for (auto& stage : params.recurrent) {
    for (auto& d : stage) d = zero_cell_params(d.hidden_size, d.input_channels);
  }
  for (auto& stage : params.convs) {
    for (auto& c : stage) {
      std::fill(c.weights.begin(), c.weights.end(), 0.0f);
      std::fill(c.bias.begin(), c.bias.end(), 0.0f);
    }
  }
  std::fill(params.projection.weights.begin(), params.projection.weights.end(),
            0.0f);
  std::fill(params.projection.bias.begin(), params.projection.bias.end(),
            0.0f);
  Rng rng(70);
  auto logits =
      network_forward(cfg, params, {test::random_grid(6, 10, 1, rng)});
  REQUIRE(logits.size() == 1);
  for (float v : logits[0].values) CHECK(v == 0.0f);
}

TEST_CASE("batch of one equals the example inside a larger batch") {
  NetworkConfig cfg = tiny_config(CellKind::Plain);
  NetworkParams params = init_network_params(cfg, 7);
  Rng rng(71);
  auto examples = test::random_grid_list(rng, 4, 4, 9, 4, 14, 1);
  auto batch = network_forward(cfg, params, examples);
  auto alone = network_forward(cfg, params, {examples[2]});
  REQUIRE(batch.size() == 4);
  REQUIRE(alone.size() == 1);
  REQUIRE(batch[2].values.size() == alone[0].values.size());
  for (std::size_t i = 0; i < alone[0].values.size(); ++i) {
    CHECK(batch[2].values[i] ==
          doctest::Approx(alone[0].values[i]).epsilon(1e-5));
  }
}

TEST_CASE("batched forward equals independent passes") {
  NetworkConfig cfg = tiny_config();
  NetworkParams params = init_network_params(cfg, 13);
  Rng rng(72);
  auto examples = test::random_grid_list(rng, 5, 4, 10, 4, 16, 1);
  auto batch = network_forward(cfg, params, examples);
  REQUIRE(batch.size() == 5);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto alone = network_forward(cfg, params, {examples[i]});
    REQUIRE(batch[i].timesteps == alone[0].timesteps);
    for (std::size_t v = 0; v < alone[0].values.size(); ++v) {
      CHECK(batch[i].values[v] ==
            doctest::Approx(alone[0].values[v]).epsilon(1e-5));
    }
  }
}

TEST_CASE("permuting the inputs permutes the outputs") {
  NetworkConfig cfg = tiny_config();
  NetworkParams params = init_network_params(cfg, 23);
  Rng rng(73);
  auto examples = test::random_grid_list(rng, 4, 4, 8, 4, 12, 1);
  auto base = network_forward(cfg, params, examples);
  std::vector<ImageGrid> shuffled = {examples[2], examples[0], examples[3],
                                     examples[1]};
  auto perm = network_forward(cfg, params, shuffled);
  const int order[4] = {2, 0, 3, 1};
  for (int i = 0; i < 4; ++i) {
    REQUIRE(perm[i].values.size() == base[order[i]].values.size());
    for (std::size_t v = 0; v < perm[i].values.size(); ++v) {
      CHECK(perm[i].values[v] == base[order[i]].values[v]);
    }
  }
}

TEST_CASE("output length obeys the shape law") {
  NetworkConfig cfg = tiny_config();
  NetworkParams params = init_network_params(cfg, 3);
  Rng rng(74);
  auto examples = test::random_grid_list(rng, 5, 4, 9, 4, 17, 1);
  auto logits = network_forward(cfg, params, examples);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    CHECK(logits[i].timesteps == sequence_length(cfg, examples[i].width));
    CHECK(logits[i].alphabet_size == 4);
  }
}

TEST_CASE("too-small examples fail naming the stage") {
  NetworkConfig cfg = tiny_config();
  NetworkParams params = init_network_params(cfg, 5);
  Rng rng(75);
  std::vector<ImageGrid> bad = {test::random_grid(1, 8, 1, rng)};
  CHECK_THROWS_WITH_AS(network_forward(cfg, params, bad),
                       doctest::Contains("conv stage 1"), StageUnderflowError);
  std::vector<ImageGrid> bad2 = {test::random_grid(8, 2, 1, rng)};
  CHECK_THROWS_WITH_AS(network_forward(cfg, params, bad2),
                       doctest::Contains("conv stage 2"), StageUnderflowError);
  std::vector<ImageGrid> multi = {test::random_grid(8, 8, 2, rng)};
  CHECK_THROWS_AS(network_forward(cfg, params, multi), ShapeError);
}

TEST_CASE("packing processes no more valid pixels than LMBR processes total") {
  Rng rng(76);
  for (int trial = 0; trial < 10; ++trial) {
    auto examples = test::random_grid_list(rng, rng.randint(1, 8), 2, 9, 2,
                                           14, 1);
    PackedBatch pb = pack_examples(examples);
    int max_h = 0, max_w = 0;
    for (const auto& g : examples) {
      max_h = std::max(max_h, g.height);
      max_w = std::max(max_w, g.width);
    }
    CHECK(pb.mask.sum() <= static_cast<std::size_t>(examples.size()) *
                               static_cast<std::size_t>(max_h) * max_w);
  }
}

TEST_CASE("network params container roundtrip") {
  NetworkConfig cfg = tiny_config();
  NetworkParams params = init_network_params(cfg, 77);
  const std::string path = "network_params_test.bin";
  save_network_params(cfg, params, path);
  NetworkParams back = load_network_params(cfg, path);
  CHECK(back.recurrent[1][2].w_f1.v == params.recurrent[1][2].w_f1.v);
  CHECK(back.convs[0][3].weights == params.convs[0][3].weights);
  CHECK(back.projection.bias == params.projection.bias);

  // Forward passes agree bit for bit.
  Rng rng(78);
  auto example = test::random_grid(5, 9, 1, rng);
  auto a = network_forward(cfg, params, {example});
  auto b = network_forward(cfg, back, {example});
  CHECK(a[0].values == b[0].values);

  NetworkConfig other = tiny_config(CellKind::Plain);
  CHECK_THROWS_AS(load_network_params(other, path), ParseError);
  std::remove(path.c_str());
}

TEST_CASE("config JSON roundtrip") {
  NetworkConfig cfg = default_network_config();
  NetworkConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.hidden_sizes == cfg.hidden_sizes);
  CHECK(back.conv_strides == cfg.conv_strides);
  CHECK(back.conv_channels == cfg.conv_channels);
  CHECK(back.alphabet == cfg.alphabet);
  CHECK(back.cell_kind == cfg.cell_kind);
  CHECK_THROWS_AS(config_from_json("{}"), ParseError);
}
