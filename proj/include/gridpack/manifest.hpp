#ifndef GRIDPACK_MANIFEST_HPP
#define GRIDPACK_MANIFEST_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gridpack/pack.hpp"

namespace gridpack {

struct SizeRecord {
  std::string id;
  int height = 0;
  int width = 0;
};

// Stand-in for a directory of word/line strip images when only the
// geometry matters.
struct SizeManifest {
  std::vector<SizeRecord> records;

  std::vector<GridExtent> extents() const;
};

// CSV with header "id,height,width". Parse errors carry line numbers;
// non-positive dimensions and duplicate ids are rejected.
SizeManifest load_manifest(const std::string& path);
void save_manifest(const SizeManifest& m, const std::string& path);

struct WidthDist {
  enum class Kind { Uniform, LogNormal } kind = Kind::Uniform;
  // Uniform: inclusive integer range [a, b].
  // LogNormal: round(exp(a + b * N(0,1))), clamped to [min_w, max_w].
  double a = 1.0;
  double b = 1.0;
  int min_w = 1;
  int max_w = 1 << 20;
};

SizeManifest synth_manifest(int n, const std::vector<int>& height_buckets,
                            const WidthDist& width_dist, std::uint64_t seed,
                            const std::string& id_prefix = "ex");

// Word strips: five height buckets, heavily skewed widths. Line strips:
// five taller buckets, widths in a narrow band.
enum class SizePreset { WordLike, LineLike };
SizePreset preset_from_name(const std::string& name);
SizeManifest synth_manifest(SizePreset preset, int n, std::uint64_t seed);

}  // namespace gridpack

#endif
