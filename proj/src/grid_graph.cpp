#include "smdr/grid_graph.hpp"

#include "smdr/errors.hpp"

namespace smdr {

GridGraph::GridGraph(std::size_t width, std::size_t height)
    : width_(width), height_(height) {
  require(width >= 1 && height >= 1, "grid dimensions must be positive");
  const std::size_t n = width * height;
  edges_.reserve(width * (height - 1) + height * (width - 1));
  trail_degree_.assign(n, 0);

  if (width > 1) {
    for (std::size_t y = 0; y < height; ++y) {
      std::vector<NodeIndex> row(width);
      for (std::size_t x = 0; x < width; ++x) {
        row[x] = index(x, y);
        ++trail_degree_[row[x]];
        if (x + 1 < width) edges_.emplace_back(index(x, y), index(x + 1, y));
      }
      trails_.push_back(std::move(row));
    }
  }
  if (height > 1) {
    for (std::size_t x = 0; x < width; ++x) {
      std::vector<NodeIndex> col(height);
      for (std::size_t y = 0; y < height; ++y) {
        col[y] = index(x, y);
        ++trail_degree_[col[y]];
        if (y + 1 < height) edges_.emplace_back(index(x, y), index(x, y + 1));
      }
      trails_.push_back(std::move(col));
    }
  }
}

GridGraph build_grid(std::size_t width, std::size_t height) {
  return GridGraph(width, height);
}

}  // namespace smdr
