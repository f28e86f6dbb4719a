#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "simopo/physics.hpp"

namespace simopo {

enum class Space { Position, Wavevector };

std::string to_string(Space space);
std::string to_string(Dimensionality dim);

struct Point {
  double x = 0.0;
  double y = 0.0;
  double norm2() const noexcept { return x * x + y * y; }
};

/// Uniform pixelization of the transverse plane (Position, meters) or of the
/// transverse wavevector plane (Wavevector, 1/m). Pixel centers sit at
/// (i - (N-1)/2) * extent / N on every axis. 2D pixels are flattened row-major:
/// flat = ix * N + iy.
class TransverseGrid {
 public:
  TransverseGrid(Dimensionality dim, double extent, int points_per_axis, Space space);

  Dimensionality dimensionality() const noexcept { return dim_; }
  double extent() const noexcept { return extent_; }
  int points_per_axis() const noexcept { return points_; }
  Space space() const noexcept { return space_; }

  /// Number of pixels M (N in 1D, N^2 in 2D).
  std::size_t size() const noexcept;
  double spacing() const noexcept { return extent_ / points_; }
  /// Pixel length (1D) or area (2D).
  double pixel_measure() const noexcept;
  double axis_coordinate(int index) const noexcept;

  /// (ix, iy) of a flat index; iy is 0 in 1D.
  std::array<int, 2> index_map(std::size_t flat) const;
  std::size_t flat_index(int ix, int iy = 0) const;
  Point point(std::size_t flat) const;
  /// Flat index of the pixel at -x (reversal through the axis).
  std::size_t mirror(std::size_t flat) const;

  /// Grid of the other space with spacing 2 pi / extent and the same N.
  TransverseGrid fourier_dual() const;
  bool is_fourier_dual_of(const TransverseGrid& other) const;

  bool operator==(const TransverseGrid& other) const;

  std::string describe() const;

 private:
  Dimensionality dim_;
  double extent_;
  int points_;
  Space space_;
};

}  // namespace simopo
