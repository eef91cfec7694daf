#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace smdr {

// Rectangular field of z-statistics, row-major. `truth` holds the realized
// signal indicators for synthetic data and is absent for ingested data.
struct ZGrid {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;
  std::optional<std::vector<bool>> truth;

  ZGrid() = default;
  ZGrid(std::size_t w, std::size_t h, std::vector<double> v,
        std::optional<std::vector<bool>> t = std::nullopt);

  std::size_t size() const noexcept { return values.size(); }
};

}  // namespace smdr
