#pragma once

#include <cstdint>
#include <vector>

namespace terids {

// Shape of a bulk-loaded tree. Leaves list item indices, inner nodes list
// node indices; children always precede their parent, so a forward pass
// over `nodes` is a bottom-up traversal.
struct PackedTree {
  struct Node {
    bool leaf = true;
    std::vector<std::uint32_t> children;
  };
  std::vector<Node> nodes;
  int root = -1;

  bool empty() const { return root < 0; }
};

// Sort-tile-recursive packing of points (one center per item) into a tree
// with the given fanout. Deterministic for identical input.
PackedTree BuildStrTree(const std::vector<std::vector<double>>& centers, std::size_t fanout);

}  // namespace terids
