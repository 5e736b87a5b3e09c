#include "gridpack/pack.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include "json.hpp"

#include "gridpack/errors.hpp"

namespace gridpack {

namespace {

using json = nlohmann::json;

struct Candidate {
  int width = 0;
  std::size_t index = 0;
};

// Scaled value must be integral.
int scale_exact(int value, Scale s, const char* what) {
  long long n = static_cast<long long>(value) * s.num;
  if (s.den <= 0 || s.num <= 0) {
    throw LayoutError("unpack: scale factors must be positive");
  }
  if (n % s.den != 0) {
    throw LayoutError(std::string("unpack: scaled ") + what + " " +
                      std::to_string(value) + " * " + std::to_string(s.num) +
                      "/" + std::to_string(s.den) + " is not an integer");
  }
  return static_cast<int>(n / s.den);
}

}  // namespace

std::size_t PackingLayout::example_count() const {
  std::size_t n = 0;
  for (const auto& row : rows) n += row.placements.size();
  return n;
}

PackingLayout plan_packing(const std::vector<GridExtent>& sizes) {
  if (sizes.empty()) {
    throw ArgumentError("plan_packing: empty example list");
  }
  int capacity = 0;
  for (const auto& e : sizes) {
    if (e.height < 1 || e.width < 1) {
      throw ShapeError("plan_packing: example dimensions must be >= 1");
    }
    capacity = std::max(capacity, e.width);
  }

  // Height buckets in ascending order; widest-first inside each bucket,
  // width ties broken by lower original index.
  std::map<int, std::vector<Candidate>> buckets;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    buckets[sizes[i].height].push_back({sizes[i].width, i});
  }

  PackingLayout layout;
  layout.total_width = capacity;
  int top = 0;
  for (auto& [height, bucket] : buckets) {
    std::sort(bucket.begin(), bucket.end(),
              [](const Candidate& a, const Candidate& b) {
                if (a.width != b.width) return a.width > b.width;
                return a.index < b.index;
              });
    std::vector<bool> placed(bucket.size(), false);
    std::size_t remaining = bucket.size();
    while (remaining > 0) {
      LayoutRow row;
      row.row_height = height;
      row.top_offset = top;
      int used = 0;
      for (std::size_t i = 0; i < bucket.size(); ++i) {
        if (placed[i]) continue;
        const int need =
            row.placements.empty() ? bucket[i].width : used + 1 + bucket[i].width;
        if (need <= capacity) {
          const int offset = row.placements.empty() ? 0 : used + 1;
          row.placements.push_back({static_cast<int>(bucket[i].index),
                                    bucket[i].width, offset});
          used = need;
          placed[i] = true;
          --remaining;
        }
      }
      // A full row is flushed at bucket boundaries as well, so rows never
      // mix heights.
      layout.rows.push_back(std::move(row));
      top += height + 1;
    }
  }
  layout.total_height = top - 1;  // no trailing separator
  return layout;
}

PackedBatch pack_examples(const std::vector<ImageGrid>& examples) {
  if (examples.empty()) {
    throw ArgumentError("pack_examples: empty example list");
  }
  const int channels = examples[0].channels;
  std::vector<GridExtent> sizes;
  sizes.reserve(examples.size());
  for (const auto& g : examples) {
    validate(g);
    if (g.channels != channels) {
      throw ShapeError("pack_examples: mixed channel counts");
    }
    sizes.push_back({g.height, g.width});
  }

  PackedBatch out;
  out.layout = plan_packing(sizes);
  out.grid = grid_create(out.layout.total_height, out.layout.total_width,
                         channels, 0.0f);
  out.mask = mask_create(out.layout.total_height, out.layout.total_width, 0);
  for (const auto& row : out.layout.rows) {
    for (const auto& p : row.placements) {
      const ImageGrid& ex = examples[p.example_index];
      for (int r = 0; r < ex.height; ++r) {
        for (int c = 0; c < ex.width; ++c) {
          for (int ch = 0; ch < channels; ++ch) {
            out.grid.at(row.top_offset + r, p.column_offset + c, ch) =
                ex.at(r, c, ch);
          }
          out.mask.at(row.top_offset + r, p.column_offset + c) = 1;
        }
      }
    }
  }
  return out;
}

PackedSkewed pack_and_skew(const std::vector<ImageGrid>& examples) {
  PackedBatch packed = pack_examples(examples);
  PackedSkewed out;
  out.layout = std::move(packed.layout);
  out.grid = skew(packed.grid);
  out.grid.mask = skew_mask(packed.mask);
  return out;
}

std::vector<ImageGrid> unpack_activations(const ImageGrid& packed_activations,
                                          const PackingLayout& layout,
                                          Scale height_scale,
                                          Scale width_scale) {
  validate(packed_activations);
  const std::size_t n = layout.example_count();
  std::vector<ImageGrid> out(n);
  std::vector<bool> seen(n, false);
  for (const auto& row : layout.rows) {
    const int top = scale_exact(row.top_offset, height_scale, "row offset");
    const int h = scale_exact(row.row_height, height_scale, "row height");
    for (const auto& p : row.placements) {
      if (p.example_index < 0 ||
          static_cast<std::size_t>(p.example_index) >= n ||
          seen[p.example_index]) {
        throw LayoutError("unpack: example indices are not a permutation");
      }
      seen[p.example_index] = true;
      const int left = scale_exact(p.column_offset, width_scale, "column offset");
      const int w = scale_exact(p.width, width_scale, "width");
      if (h < 1 || w < 1 || top + h > packed_activations.height ||
          left + w > packed_activations.width) {
        throw LayoutError("unpack: scaled region exceeds packed activations");
      }
      ImageGrid ex = grid_create(h, w, packed_activations.channels, 0.0f);
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          for (int ch = 0; ch < packed_activations.channels; ++ch) {
            ex.at(r, c, ch) = packed_activations.at(top + r, left + c, ch);
          }
        }
      }
      out[p.example_index] = std::move(ex);
    }
  }
  for (bool s : seen) {
    if (!s) throw LayoutError("unpack: layout is missing an example");
  }
  return out;
}

std::vector<std::vector<std::size_t>> split_balanced_indices(
    const std::vector<std::size_t>& pixel_counts, int k) {
  if (k < 1) throw ArgumentError("split_balanced: k must be >= 1");
  std::vector<std::size_t> order(pixel_counts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pixel_counts[a] != pixel_counts[b]) {
      return pixel_counts[a] > pixel_counts[b];
    }
    return a < b;
  });
  std::vector<std::vector<std::size_t>> lists(k);
  std::vector<std::size_t> load(k, 0);
  for (std::size_t idx : order) {
    const std::size_t target = static_cast<std::size_t>(
        std::min_element(load.begin(), load.end()) - load.begin());
    lists[target].push_back(idx);
    load[target] += pixel_counts[idx];
  }
  return lists;
}

std::vector<std::vector<ImageGrid>> split_balanced(
    const std::vector<ImageGrid>& examples, int k) {
  std::vector<std::size_t> pixels(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    pixels[i] = static_cast<std::size_t>(examples[i].height) *
                examples[i].width * examples[i].channels;
  }
  auto lists = split_balanced_indices(pixels, k);
  std::vector<std::vector<ImageGrid>> out(lists.size());
  for (std::size_t s = 0; s < lists.size(); ++s) {
    for (std::size_t idx : lists[s]) out[s].push_back(examples[idx]);
  }
  return out;
}

std::string layout_to_json(const PackingLayout& layout) {
  json rows = json::array();
  for (const auto& row : layout.rows) {
    json placements = json::array();
    for (const auto& p : row.placements) {
      placements.push_back({{"example_index", p.example_index},
                            {"width", p.width},
                            {"column_offset", p.column_offset}});
    }
    rows.push_back({{"row_height", row.row_height},
                    {"top_offset", row.top_offset},
                    {"placements", placements}});
  }
  json j = {{"total_height", layout.total_height},
            {"total_width", layout.total_width},
            {"rows", rows}};
  return j.dump(2);
}

PackingLayout layout_from_json(const std::string& text) {
  PackingLayout layout;
  try {
    json j = json::parse(text);
    layout.total_height = j.at("total_height").get<int>();
    layout.total_width = j.at("total_width").get<int>();
    for (const auto& row : j.at("rows")) {
      LayoutRow lr;
      lr.row_height = row.at("row_height").get<int>();
      lr.top_offset = row.at("top_offset").get<int>();
      for (const auto& p : row.at("placements")) {
        lr.placements.push_back({p.at("example_index").get<int>(),
                                 p.at("width").get<int>(),
                                 p.at("column_offset").get<int>()});
      }
      layout.rows.push_back(std::move(lr));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("layout JSON: ") + e.what());
  }
  return layout;
}

}  // namespace gridpack
