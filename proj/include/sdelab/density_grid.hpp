#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace sdelab {

// Regular 1-d or 2-d lattice, cell-centered: node i sits at
// origin + (i + 1/2) * spacing along each axis, so an even node count
// centered on a point never places a node exactly on it (the solvers rely
// on this to avoid evaluating singular drifts at their singularity).
struct Lattice {
  int dim = 1;
  std::array<double, 2> origin{0.0, 0.0};  // lower cell edge per axis
  double spacing = 0.1;
  std::array<std::size_t, 2> shape{0, 1};  // node counts; shape[1] == 1 in 1-d

  static Lattice centered(int dim, const std::array<double, 2>& center, double half_width,
                          std::size_t nodes_per_axis);

  std::size_t size() const { return shape[0] * shape[1]; }
  double cell_volume() const;
  double coord(std::size_t index, int axis) const;  // axis-wise node coordinate
  std::array<double, 2> point(std::size_t flat) const;
  double low(int axis) const { return origin[axis]; }
  double high(int axis) const { return origin[axis] + spacing * static_cast<double>(shape[axis]); }
  bool same_geometry(const Lattice& other, double tol = 1e-9) const;
  void validate() const;
};

struct DensityGrid {
  Lattice lattice;
  double time = 0.0;
  std::vector<double> values;  // row-major over (axis0, axis1), size() entries
  double mass = 0.0;           // Riemann sum over the lattice
  double tail_mass = 0.0;      // estimated mass outside the lattice
  double bandwidth = 0.0;      // KDE smoothing width; 0 when not applicable

  double recompute_mass();
  void validate() const;
};

}  // namespace sdelab
