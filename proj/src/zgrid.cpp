#include "smdr/zgrid.hpp"

#include "smdr/errors.hpp"

namespace smdr {

ZGrid::ZGrid(std::size_t w, std::size_t h, std::vector<double> v,
             std::optional<std::vector<bool>> t)
    : width(w), height(h), values(std::move(v)), truth(std::move(t)) {
  require(w >= 1 && h >= 1, "grid dimensions must be positive");
  require(values.size() == w * h, "grid value count does not match dimensions");
  require(!truth || truth->size() == w * h,
          "truth mask size does not match grid");
}

}  // namespace smdr
