#include "terids/rtree.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace terids {
namespace {

void Tile(const std::vector<std::vector<double>>& centers, std::vector<std::uint32_t> items,
          std::size_t dim, std::size_t fanout, std::vector<std::vector<std::uint32_t>>& out) {
  const std::size_t dims = centers.empty() ? 0 : centers.front().size();
  auto by_dim = [&](std::uint32_t a, std::uint32_t b) {
    if (centers[a][dim] != centers[b][dim]) return centers[a][dim] < centers[b][dim];
    return a < b;
  };
  if (dims == 0 || dim + 1 >= dims) {
    if (dims > 0) std::sort(items.begin(), items.end(), by_dim);
    for (std::size_t i = 0; i < items.size(); i += fanout)
      out.emplace_back(items.begin() + i, items.begin() + std::min(items.size(), i + fanout));
    return;
  }
  std::sort(items.begin(), items.end(), by_dim);
  const double pages = std::ceil(static_cast<double>(items.size()) / fanout);
  const auto slabs =
      static_cast<std::size_t>(std::ceil(std::pow(pages, 1.0 / static_cast<double>(dims - dim))));
  std::size_t per_slab = static_cast<std::size_t>(
      std::ceil(static_cast<double>(items.size()) / static_cast<double>(std::max<std::size_t>(1, slabs))));
  per_slab = ((per_slab + fanout - 1) / fanout) * fanout;
  for (std::size_t i = 0; i < items.size(); i += per_slab) {
    std::vector<std::uint32_t> slab(items.begin() + i,
                                    items.begin() + std::min(items.size(), i + per_slab));
    Tile(centers, std::move(slab), dim + 1, fanout, out);
  }
}

}  // namespace

PackedTree BuildStrTree(const std::vector<std::vector<double>>& centers, std::size_t fanout) {
  PackedTree tree;
  if (centers.empty()) return tree;
  fanout = std::max<std::size_t>(fanout, 2);

  std::vector<std::uint32_t> items(centers.size());
  std::iota(items.begin(), items.end(), 0u);
  std::vector<std::vector<std::uint32_t>> groups;
  Tile(centers, items, 0, fanout, groups);

  std::vector<std::uint32_t> level;
  std::vector<std::vector<double>> level_centers;
  for (auto& g : groups) {
    std::vector<double> c(centers.front().size(), 0.0);
    for (auto i : g)
      for (std::size_t k = 0; k < c.size(); ++k) c[k] += centers[i][k] / g.size();
    level.push_back(static_cast<std::uint32_t>(tree.nodes.size()));
    level_centers.push_back(std::move(c));
    tree.nodes.push_back({true, std::move(g)});
  }
  while (level.size() > 1) {
    std::vector<std::vector<std::uint32_t>> parent_groups;
    Tile(level_centers, [&] {
      std::vector<std::uint32_t> idx(level.size());
      std::iota(idx.begin(), idx.end(), 0u);
      return idx;
    }(), 0, fanout, parent_groups);
    std::vector<std::uint32_t> next;
    std::vector<std::vector<double>> next_centers;
    for (auto& g : parent_groups) {
      std::vector<double> c(level_centers.front().size(), 0.0);
      std::vector<std::uint32_t> kids;
      for (auto i : g) {
        kids.push_back(level[i]);
        for (std::size_t k = 0; k < c.size(); ++k) c[k] += level_centers[i][k] / g.size();
      }
      next.push_back(static_cast<std::uint32_t>(tree.nodes.size()));
      next_centers.push_back(std::move(c));
      tree.nodes.push_back({false, std::move(kids)});
    }
    level = std::move(next);
    level_centers = std::move(next_centers);
  }
  tree.root = static_cast<int>(level.front());
  return tree;
}

}  // namespace terids
