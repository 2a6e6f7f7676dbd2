#pragma once

#include "types.hpp"

#include <cstddef>
#include <vector>

namespace sectionscope {

struct GridBox {
  Vec3 lo{-2.0, -2.0, -2.0};
  Vec3 hi{2.0, 2.0, 2.0};
};

/// Hill region sampled on a cell-centered grid and split into connected
/// components (8-connectivity on the q3 = 0 slice, 26-connectivity in 3-D).
/// A cell counts as inside when U(center) <= c or when it contains a primary,
/// so wells narrower than a cell are still seen.
struct HillGrid {
  double c = 0.0;
  int resolution = 0;
  bool planar = true;
  GridBox box;
  std::vector<double> potential;       ///< U at cell centers; -inf on a primary
  std::vector<unsigned char> inside;
  std::vector<int> labels;             ///< -1 outside, else component id
  int components = 0;
  std::vector<std::size_t> component_sizes;
  std::vector<bool> unbounded;         ///< component touches the box boundary

  // Resolution-doubling guard.
  bool resolution_checked = false;
  int components_at_double = -1;
  bool resolution_warning = false;

  std::size_t cell_count() const { return inside.size(); }
  std::size_t index(int i, int j, int k = 0) const;
  Vec3 cell_center(int i, int j, int k = 0) const;
  int bounded_count() const;
};

HillGrid hill_components(double c, const MassRatio& mu, const GridBox& box, int resolution, bool planar,
                         bool check_resolution = true);

}  // namespace sectionscope
