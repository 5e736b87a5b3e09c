#include "gridpack/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "gridpack/errors.hpp"
#include "gridpack/rng.hpp"

namespace gridpack {

std::vector<GridExtent> SizeManifest::extents() const {
  std::vector<GridExtent> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({r.height, r.width});
  return out;
}

SizeManifest load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw ParseError(path + ": empty file");
  // Tolerate a trailing carriage return from CRLF files.
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "id,height,width") {
    throw ParseError(path + ":1: expected header 'id,height,width'");
  }
  SizeManifest m;
  std::unordered_set<std::string> ids;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string id, h_str, w_str, extra;
    if (!std::getline(ss, id, ',') || !std::getline(ss, h_str, ',') ||
        !std::getline(ss, w_str, ',')) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected 3 comma-separated fields");
    }
    if (std::getline(ss, extra, ',')) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": too many fields");
    }
    SizeRecord rec;
    rec.id = id;
    try {
      std::size_t pos = 0;
      rec.height = std::stoi(h_str, &pos);
      if (pos != h_str.size()) throw std::invalid_argument(h_str);
      rec.width = std::stoi(w_str, &pos);
      if (pos != w_str.size()) throw std::invalid_argument(w_str);
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": bad integer dimension");
    }
    if (rec.height < 1 || rec.width < 1) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": dimensions must be positive");
    }
    if (!ids.insert(rec.id).second) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": duplicate id '" + rec.id + "'");
    }
    m.records.push_back(std::move(rec));
  }
  if (m.records.empty()) throw ParseError(path + ": no records");
  return m;
}

void save_manifest(const SizeManifest& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open " + path + " for writing");
  os << "id,height,width\n";
  for (const auto& r : m.records) {
    os << r.id << "," << r.height << "," << r.width << "\n";
  }
}

SizeManifest synth_manifest(int n, const std::vector<int>& height_buckets,
                            const WidthDist& width_dist, std::uint64_t seed,
                            const std::string& id_prefix) {
  if (n < 1) throw ArgumentError("synth_manifest: n must be >= 1");
  if (height_buckets.empty()) {
    throw ArgumentError("synth_manifest: no height buckets");
  }
  for (int h : height_buckets) {
    if (h < 1) throw ArgumentError("synth_manifest: non-positive height bucket");
  }
  Rng rng(seed);
  SizeManifest m;
  for (int i = 0; i < n; ++i) {
    SizeRecord rec;
    rec.id = id_prefix + std::to_string(i);
    rec.height = height_buckets[rng.next() % height_buckets.size()];
    switch (width_dist.kind) {
      case WidthDist::Kind::Uniform:
        rec.width = rng.randint(static_cast<int>(width_dist.a),
                                static_cast<int>(width_dist.b));
        break;
      case WidthDist::Kind::LogNormal: {
        const double w = std::exp(width_dist.a + width_dist.b * rng.normal());
        rec.width = static_cast<int>(std::lround(w));
        rec.width = std::clamp(rec.width, width_dist.min_w, width_dist.max_w);
        break;
      }
    }
    m.records.push_back(std::move(rec));
  }
  return m;
}

SizePreset preset_from_name(const std::string& name) {
  if (name == "word" || name == "word-like") return SizePreset::WordLike;
  if (name == "line" || name == "line-like") return SizePreset::LineLike;
  throw ArgumentError("unknown size preset: " + name);
}

SizeManifest synth_manifest(SizePreset preset, int n, std::uint64_t seed) {
  if (preset == SizePreset::WordLike) {
    WidthDist d;
    d.kind = WidthDist::Kind::LogNormal;
    d.a = 3.4;
    d.b = 0.8;
    d.min_w = 4;
    d.max_w = 200;
    return synth_manifest(n, {12, 16, 20, 24, 28}, d, seed, "w");
  }
  WidthDist d;
  d.kind = WidthDist::Kind::Uniform;
  d.a = 150;
  d.b = 220;
  return synth_manifest(n, {20, 26, 32, 38, 44}, d, seed, "l");
}

}  // namespace gridpack
