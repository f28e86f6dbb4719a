#include "simopo/grid.hpp"

#include <cmath>
#include <fmt/format.h>

#include "simopo/errors.hpp"
#include "simopo/special_functions.hpp"

namespace simopo {

std::string to_string(Space space) { return space == Space::Position ? "position" : "wavevector"; }

std::string to_string(Dimensionality dim) { return dim == Dimensionality::One ? "1D" : "2D"; }

TransverseGrid::TransverseGrid(Dimensionality dim, double extent, int points_per_axis, Space space)
    : dim_(dim), extent_(extent), points_(points_per_axis), space_(space) {
  if (!std::isfinite(extent) || !(extent > 0.0)) throw DomainError("grid extent must be finite and positive");
  if (points_per_axis < 2) throw DomainError("grid needs at least 2 points per axis");
}

std::size_t TransverseGrid::size() const noexcept {
  const auto n = static_cast<std::size_t>(points_);
  return dim_ == Dimensionality::One ? n : n * n;
}

double TransverseGrid::pixel_measure() const noexcept {
  const double h = spacing();
  return dim_ == Dimensionality::One ? h : h * h;
}

double TransverseGrid::axis_coordinate(int index) const noexcept {
  return (index - 0.5 * (points_ - 1)) * spacing();
}

std::array<int, 2> TransverseGrid::index_map(std::size_t flat) const {
  if (flat >= size()) throw UsageError("grid index out of range");
  if (dim_ == Dimensionality::One) return {static_cast<int>(flat), 0};
  const auto n = static_cast<std::size_t>(points_);
  return {static_cast<int>(flat / n), static_cast<int>(flat % n)};
}

std::size_t TransverseGrid::flat_index(int ix, int iy) const {
  if (ix < 0 || ix >= points_ || iy < 0 || (dim_ == Dimensionality::Two ? iy >= points_ : iy != 0)) {
    throw UsageError("grid axis index out of range");
  }
  if (dim_ == Dimensionality::One) return static_cast<std::size_t>(ix);
  return static_cast<std::size_t>(ix) * static_cast<std::size_t>(points_) + static_cast<std::size_t>(iy);
}

Point TransverseGrid::point(std::size_t flat) const {
  const auto [ix, iy] = index_map(flat);
  if (dim_ == Dimensionality::One) return {axis_coordinate(ix), 0.0};
  return {axis_coordinate(ix), axis_coordinate(iy)};
}

std::size_t TransverseGrid::mirror(std::size_t flat) const {
  const auto [ix, iy] = index_map(flat);
  if (dim_ == Dimensionality::One) return flat_index(points_ - 1 - ix);
  return flat_index(points_ - 1 - ix, points_ - 1 - iy);
}

TransverseGrid TransverseGrid::fourier_dual() const {
  const double dual_extent = 2.0 * kPi * points_ / extent_;
  return TransverseGrid(dim_, dual_extent, points_,
                        space_ == Space::Position ? Space::Wavevector : Space::Position);
}

bool TransverseGrid::is_fourier_dual_of(const TransverseGrid& other) const {
  if (dim_ != other.dim_ || points_ != other.points_ || space_ == other.space_) return false;
  const double product = extent_ * other.extent_;
  const double expected = 2.0 * kPi * points_;
  return std::abs(product - expected) <= 1e-12 * expected;
}

bool TransverseGrid::operator==(const TransverseGrid& other) const {
  return dim_ == other.dim_ && extent_ == other.extent_ && points_ == other.points_ && space_ == other.space_;
}

std::string TransverseGrid::describe() const {
  return fmt::format("{} {} grid, N={} per axis, extent={:.6g}", to_string(dim_), to_string(space_), points_,
                     extent_);
}

}  // namespace simopo
