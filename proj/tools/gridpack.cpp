// Command-line front end: packing analysis, network inference and the
// padding/capacity/throughput benchmark harness.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gridpack/bench.hpp"
#include "gridpack/errors.hpp"
#include "gridpack/grid_io.hpp"
#include "gridpack/manifest.hpp"
#include "gridpack/network.hpp"
#include "gridpack/pack.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace gridpack;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitCapacity = 3;

struct ManifestOpts {
  std::string path;
  std::string preset;
  int n = 240;
  std::uint64_t seed = 0;
  bool sort_by_size_flag = false;
};

void add_manifest_opts(CLI::App* cmd, ManifestOpts& opts) {
  auto* file = cmd->add_option("--manifest", opts.path,
                               "size manifest CSV (id,height,width)");
  auto* synth = cmd->add_option("--synth", opts.preset,
                                "synthesize sizes: word | line");
  cmd->add_option("--n", opts.n, "synthetic manifest size");
  cmd->add_option("--seed", opts.seed, "synthetic manifest seed");
  cmd->add_flag("--sort-by-size", opts.sort_by_size_flag,
                "sort records by pixel count before batching");
  file->excludes(synth);
}

SizeManifest resolve_manifest(const ManifestOpts& opts) {
  SizeManifest m;
  if (!opts.path.empty()) {
    m = load_manifest(opts.path);
  } else if (!opts.preset.empty()) {
    m = synth_manifest(preset_from_name(opts.preset), opts.n, opts.seed);
  } else {
    throw ArgumentError("need --manifest or --synth");
  }
  return opts.sort_by_size_flag ? sort_by_size(m) : m;
}

struct MemoryOpts {
  MemoryModel model;
};

void add_memory_opts(CLI::App* cmd, MemoryOpts& opts) {
  cmd->add_option("--bytes-per-valid", opts.model.bytes_per_valid_pixel,
                  "memory model: bytes per valid pixel");
  cmd->add_option("--bytes-per-padded", opts.model.bytes_per_padded_pixel,
                  "memory model: bytes per padded pixel");
  cmd->add_option("--fixed-overhead", opts.model.fixed_overhead_bytes,
                  "memory model: fixed bytes per batch");
  cmd->add_option("--budget-bytes", opts.model.budget_bytes,
                  "memory model: batch budget in bytes");
}

std::vector<Strategy> resolve_strategies(const std::string& name) {
  if (name == "both") return {Strategy::Lmbr, Strategy::Packing};
  return {strategy_from_name(name)};
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open " + path + " for writing");
  os << text << "\n";
}

NetworkConfig load_config(const std::string& path) {
  if (path.empty()) return default_network_config();
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return config_from_json(ss.str());
}

int run_pack(const ManifestOpts& mopts, const std::string& out) {
  SizeManifest m = resolve_manifest(mopts);
  PackingLayout layout = plan_packing(m.extents());
  write_text(out, layout_to_json(layout));
  std::int64_t valid = 0;
  for (const auto& r : m.records) {
    valid += static_cast<std::int64_t>(r.height) * r.width;
  }
  const std::int64_t area =
      static_cast<std::int64_t>(layout.total_height) * layout.total_width;
  json stats = {
      {"examples", m.records.size()},
      {"packed_area", area},
      {"valid_pixels", valid},
      {"padding_fraction",
       static_cast<double>(area - valid) / static_cast<double>(area)},
      {"total_height", layout.total_height},
      {"total_width", layout.total_width},
      {"skewed_width", layout.total_width + layout.total_height - 1},
  };
  std::cout << stats.dump(2) << "\n";
  return kExitOk;
}

int run_forward(const std::string& config_path, const std::string& model_path,
                const std::string& images_dir, const std::string& out,
                bool emit_logits, std::uint64_t seed,
                const std::string& save_model) {
  NetworkConfig cfg = load_config(config_path);
  NetworkParams params = model_path.empty()
                             ? init_network_params(cfg, seed)
                             : load_network_params(cfg, model_path);
  if (!save_model.empty()) save_network_params(cfg, params, save_model);

  std::vector<std::string> ids;
  std::vector<ImageGrid> images;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(images_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".pgm" || ext == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw ArgumentError("no .pgm or .csv images under " + images_dir);
  }
  for (const auto& f : files) {
    ids.push_back(f.stem().string());
    images.push_back(f.extension() == ".pgm" ? read_pgm(f.string())
                                             : read_csv_grid(f.string()));
  }

  const auto logits = network_forward(cfg, params, images);
  std::ostringstream lines;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    json line = {{"id", ids[i]},
                 {"timesteps", logits[i].timesteps},
                 {"text", greedy_ctc_decode(logits[i], cfg.alphabet)}};
    if (emit_logits) {
      json rows = json::array();
      for (int t = 0; t < logits[i].timesteps; ++t) {
        json row = json::array();
        for (int a = 0; a < logits[i].alphabet_size; ++a) {
          row.push_back(logits[i].at(t, a));
        }
        rows.push_back(row);
      }
      line["logits"] = rows;
    }
    lines << line.dump() << "\n";
  }
  if (out == "-") {
    std::cout << lines.str();
  } else {
    std::ofstream os(out);
    if (!os) throw ParseError("cannot open " + out + " for writing");
    os << lines.str();
  }
  return kExitOk;
}

int run_decode(const std::string& config_path, const std::string& logits_path) {
  NetworkConfig cfg = load_config(config_path);
  std::ifstream is(logits_path);
  if (!is) throw ParseError("cannot open " + logits_path);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(logits_path + ":" + std::to_string(line_no) + ": " +
                       e.what());
    }
    if (!j.contains("logits")) {
      throw ParseError(logits_path + ":" + std::to_string(line_no) +
                       ": no logits field (re-run forward with --emit-logits)");
    }
    LogitSequence seq;
    seq.alphabet_size = static_cast<int>(cfg.alphabet.size());
    for (const auto& row : j["logits"]) {
      if (static_cast<int>(row.size()) != seq.alphabet_size) {
        throw ParseError(logits_path + ":" + std::to_string(line_no) +
                         ": logit row width does not match alphabet");
      }
      for (const auto& v : row) seq.values.push_back(v.get<float>());
      ++seq.timesteps;
    }
    std::cout << j.value("id", std::string("?")) << "\t"
              << greedy_ctc_decode(seq, cfg.alphabet) << "\n";
  }
  return kExitOk;
}

int run_bench_padding(const ManifestOpts& mopts, int batch_size,
                      const std::string& strategy, const MemoryOpts& mem,
                      const std::string& out) {
  SizeManifest m = resolve_manifest(mopts);
  std::vector<BenchReport> reports;
  for (Strategy s : resolve_strategies(strategy)) {
    reports.push_back(padding_stats(m, batch_size, s, mem.model));
  }
  write_text(out, reports_to_json(reports));
  return kExitOk;
}

int run_bench_capacity(const ManifestOpts& mopts, const std::string& strategy,
                       const MemoryOpts& mem, const std::string& out) {
  SizeManifest m = resolve_manifest(mopts);
  json arr = json::array();
  for (Strategy s : resolve_strategies(strategy)) {
    const int b = max_batch_under_budget(m, mem.model, s);
    arr.push_back({{"strategy", strategy_name(s)},
                   {"max_batch", b},
                   {"budget_bytes", mem.model.budget_bytes}});
  }
  write_text(out, arr.dump(2));
  return kExitOk;
}

int run_bench_throughput(const ManifestOpts& mopts,
                         const std::string& config_path,
                         const std::string& strategy, int repetitions,
                         std::uint64_t seed, const MemoryOpts& mem,
                         bool parallel_batches, const std::string& out) {
  SizeManifest m = resolve_manifest(mopts);
  NetworkConfig cfg = load_config(config_path);
  if (parallel_batches) {
    std::cerr << "warning: --parallel-batches measures parallel throughput, "
                 "not single-stream latency\n";
  }
  auto reports = throughput_bench(cfg, m, resolve_strategies(strategy),
                                  repetitions, seed, mem.model,
                                  parallel_batches);
  write_text(out, reports_to_json(reports));
  return kExitOk;
}

int run_stability(int length, std::vector<double> biases,
                  const std::string& out) {
  if (biases.empty()) biases = {3.0};
  std::ostringstream ss;
  stability_report(length, biases, ss);
  if (out == "-") {
    std::cout << ss.str();
  } else {
    std::ofstream os(out);
    if (!os) throw ParseError("cannot open " + out + " for writing");
    os << ss.str();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"example-packing toolkit for 2-D recurrent inference"};
  app.require_subcommand(1);

  // pack
  auto* pack_cmd = app.add_subcommand("pack", "pack a size manifest");
  ManifestOpts pack_m;
  add_manifest_opts(pack_cmd, pack_m);
  std::string pack_out = "layout.json";
  pack_cmd->add_option("--out", pack_out, "layout JSON path ('-' = stdout)");

  // forward
  auto* fwd_cmd = app.add_subcommand("forward", "run network inference");
  std::string fwd_config, fwd_model, fwd_images, fwd_save_model;
  std::string fwd_out = "logits.jsonl";
  bool fwd_emit = false;
  std::uint64_t fwd_seed = 0;
  fwd_cmd->add_option("--config", fwd_config, "network config JSON");
  fwd_cmd->add_option("--model", fwd_model, "model container (.bin)");
  fwd_cmd->add_option("--images", fwd_images, "directory of .pgm/.csv images")
      ->required();
  fwd_cmd->add_option("--out", fwd_out, "output JSONL ('-' = stdout)");
  fwd_cmd->add_flag("--emit-logits", fwd_emit, "include logit matrices");
  fwd_cmd->add_option("--seed", fwd_seed,
                      "random parameter seed when no --model is given");
  fwd_cmd->add_option("--save-model", fwd_save_model,
                      "write the (possibly fresh) parameters here");

  // decode
  auto* dec_cmd = app.add_subcommand("decode", "greedy-decode emitted logits");
  std::string dec_config, dec_logits;
  dec_cmd->add_option("--config", dec_config, "network config JSON");
  dec_cmd->add_option("--logits", dec_logits, "JSONL from forward --emit-logits")
      ->required();

  // bench-padding
  auto* bp_cmd = app.add_subcommand("bench-padding", "padding waste report");
  ManifestOpts bp_m;
  add_manifest_opts(bp_cmd, bp_m);
  MemoryOpts bp_mem;
  add_memory_opts(bp_cmd, bp_mem);
  int bp_batch = 20;
  std::string bp_strategy = "both";
  std::string bp_out = "-";
  bp_cmd->add_option("--batch-size", bp_batch, "batch size");
  bp_cmd->add_option("--strategy", bp_strategy, "LMBR | PACKING | both");
  bp_cmd->add_option("--out", bp_out, "report JSON ('-' = stdout)");

  // bench-capacity
  auto* bc_cmd = app.add_subcommand("bench-capacity",
                                    "max batch size under a memory budget");
  ManifestOpts bc_m;
  add_manifest_opts(bc_cmd, bc_m);
  MemoryOpts bc_mem;
  add_memory_opts(bc_cmd, bc_mem);
  std::string bc_strategy = "both";
  std::string bc_out = "-";
  bc_cmd->add_option("--strategy", bc_strategy, "LMBR | PACKING | both");
  bc_cmd->add_option("--out", bc_out, "report JSON ('-' = stdout)");

  // bench-throughput
  auto* bt_cmd = app.add_subcommand("bench-throughput",
                                    "forward-pass throughput comparison");
  ManifestOpts bt_m;
  add_manifest_opts(bt_cmd, bt_m);
  MemoryOpts bt_mem;
  add_memory_opts(bt_cmd, bt_mem);
  std::string bt_config;
  std::string bt_strategy = "both";
  std::string bt_out = "-";
  int bt_reps = 3;
  std::uint64_t bt_seed = 0;
  bool bt_parallel = false;
  bt_cmd->add_option("--config", bt_config, "network config JSON");
  bt_cmd->add_flag("--parallel-batches", bt_parallel,
                   "process batches concurrently (see warning)");
  bt_cmd->add_option("--strategy", bt_strategy, "LMBR | PACKING | both");
  bt_cmd->add_option("--repetitions", bt_reps, "timing repetitions");
  bt_cmd->add_option("--data-seed", bt_seed, "pixel/parameter seed");
  bt_cmd->add_option("--out", bt_out, "report JSON ('-' = stdout)");

  // stability
  auto* st_cmd = app.add_subcommand("stability",
                                    "memory growth traces for both cell kinds");
  int st_length = 200;
  std::vector<double> st_biases;
  std::string st_out = "-";
  st_cmd->add_option("--length", st_length, "steps to trace");
  st_cmd->add_option("--bias", st_biases, "forget-gate bias (repeatable)");
  st_cmd->add_option("--out", st_out, "trace CSV ('-' = stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (pack_cmd->parsed()) return run_pack(pack_m, pack_out);
    if (fwd_cmd->parsed()) {
      return run_forward(fwd_config, fwd_model, fwd_images, fwd_out, fwd_emit,
                         fwd_seed, fwd_save_model);
    }
    if (dec_cmd->parsed()) return run_decode(dec_config, dec_logits);
    if (bp_cmd->parsed()) {
      return run_bench_padding(bp_m, bp_batch, bp_strategy, bp_mem, bp_out);
    }
    if (bc_cmd->parsed()) {
      return run_bench_capacity(bc_m, bc_strategy, bc_mem, bc_out);
    }
    if (bt_cmd->parsed()) {
      return run_bench_throughput(bt_m, bt_config, bt_strategy, bt_reps,
                                  bt_seed, bt_mem, bt_parallel, bt_out);
    }
    if (st_cmd->parsed()) return run_stability(st_length, st_biases, st_out);
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
