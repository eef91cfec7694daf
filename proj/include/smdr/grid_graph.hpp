#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace smdr {

using NodeIndex = std::size_t;

// 4-neighbour lattice with row-major node numbering. Trails are the full
// rows followed by the full columns; length-1 rows/columns emit no trail.
class GridGraph {
 public:
  GridGraph(std::size_t width, std::size_t height);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t node_count() const noexcept { return width_ * height_; }

  NodeIndex index(std::size_t x, std::size_t y) const noexcept {
    return y * width_ + x;
  }

  const std::vector<std::pair<NodeIndex, NodeIndex>>& edges() const noexcept {
    return edges_;
  }
  const std::vector<std::vector<NodeIndex>>& trails() const noexcept {
    return trails_;
  }

  // Number of trails passing through each node.
  const std::vector<unsigned>& trail_degree() const noexcept {
    return trail_degree_;
  }

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::pair<NodeIndex, NodeIndex>> edges_;
  std::vector<std::vector<NodeIndex>> trails_;
  std::vector<unsigned> trail_degree_;
};

GridGraph build_grid(std::size_t width, std::size_t height);

}  // namespace smdr
