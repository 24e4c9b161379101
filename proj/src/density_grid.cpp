#include "sdelab/density_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace sdelab {

Lattice Lattice::centered(int dim, const std::array<double, 2>& center, double half_width,
                          std::size_t nodes_per_axis) {
  if (dim < 1 || dim > 2) throw std::invalid_argument("lattice: dim must be 1 or 2");
  if (!(half_width > 0.0)) throw std::invalid_argument("lattice: half_width must be positive");
  if (nodes_per_axis < 2) throw std::invalid_argument("lattice: need at least 2 nodes per axis");
  Lattice lat;
  lat.dim = dim;
  lat.spacing = 2.0 * half_width / static_cast<double>(nodes_per_axis);
  lat.shape = {nodes_per_axis, dim == 2 ? nodes_per_axis : 1};
  for (int a = 0; a < dim; ++a) lat.origin[a] = center[a] - half_width;
  if (dim == 1) lat.origin[1] = 0.0;
  return lat;
}

double Lattice::cell_volume() const { return dim == 1 ? spacing : spacing * spacing; }

double Lattice::coord(std::size_t index, int axis) const {
  return origin[axis] + spacing * (static_cast<double>(index) + 0.5);
}

std::array<double, 2> Lattice::point(std::size_t flat) const {
  if (dim == 1) return {coord(flat, 0), 0.0};
  return {coord(flat / shape[1], 0), coord(flat % shape[1], 1)};
}

bool Lattice::same_geometry(const Lattice& other, double tol) const {
  if (dim != other.dim || shape != other.shape) return false;
  if (std::abs(spacing - other.spacing) > tol * spacing) return false;
  for (int a = 0; a < dim; ++a)
    if (std::abs(origin[a] - other.origin[a]) > tol * (1.0 + std::abs(origin[a]))) return false;
  return true;
}

void Lattice::validate() const {
  if (dim < 1 || dim > 2) throw std::invalid_argument("lattice: dim must be 1 or 2");
  if (!(spacing > 0.0)) throw std::invalid_argument("lattice: spacing must be positive");
  if (shape[0] < 2) throw std::invalid_argument("lattice: need at least 2 nodes");
  if (dim == 1 && shape[1] != 1) throw std::invalid_argument("lattice: 1-d shape must be {n, 1}");
}

double DensityGrid::recompute_mass() {
  double s = 0.0;
  for (double v : values) s += v;
  mass = s * lattice.cell_volume();
  return mass;
}

void DensityGrid::validate() const {
  lattice.validate();
  if (values.size() != lattice.size())
    throw std::invalid_argument("density grid: value count does not match lattice");
  for (double v : values)
    if (!(v >= 0.0)) throw std::invalid_argument("density grid: negative or NaN value");
  if (mass > 1.0 + 1e-6) throw std::invalid_argument("density grid: mass exceeds 1");
}

}  // namespace sdelab
