#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "simopo/grid.hpp"
#include "simopo/modes.hpp"

namespace simopo {

/// Detector region times local-oscillator amplitude, one weight per pixel.
struct Detector {
  TransverseGrid grid;
  Eigen::VectorXd weights;
  std::string label;

  /// Shot-noise level w^T w.
  double shot_noise() const { return weights.squaredNorm(); }
  std::size_t pixel_count() const;
  /// Throws UsageError if the weights are non-finite, all zero, or sized wrongly.
  void validate() const;
};

/// Output quadrature covariances, shot noise = identity.
/// cov_plus belongs to the phi = 0 quadrature (amplified for the top mode).
struct QuadratureCovariance {
  TransverseGrid grid;
  double pump_ratio = 0.0;
  FormulaMode formula_mode = FormulaMode::Paper;
  Eigen::MatrixXd cov_plus;
  Eigen::MatrixXd cov_minus;
};

/// C+- = V diag(Lambda+-) V^T; errors as mode_variances.
QuadratureCovariance output_covariance(const ModeDecomposition& decomp, double pump_ratio,
                                       FormulaMode mode = FormulaMode::Paper, double analysis_frequency = 0.0);

/// V(phi) = [cos^2 phi w^T C+ w + sin^2 phi w^T C- w] / w^T w.
double homodyne_variance(const QuadratureCovariance& cov, const Detector& det, double phase);

struct EprSpectra {
  double v_minus = 1.0;  ///< difference combination w1 - w2
  double v_plus = 1.0;   ///< sum combination w1 + w2
};

/// Sum and difference homodyne variances of two disjoint detectors at one phase,
/// normalized by w1^T w1 + w2^T w2.
EprSpectra epr_spectra(const QuadratureCovariance& cov, const Detector& det1, const Detector& det2, double phase);

/// S12 = (V-(phi) + V+(phi + pi/2)) / 2, evaluated from both spectra.
double duan_separability(const QuadratureCovariance& cov, const Detector& det1, const Detector& det2, double phase);

struct DuanMinimum {
  double value = 1.0;
  double phase = 0.0;
};

/// Minimum of duan_separability over phases k pi / samples, k = 0..samples-1.
DuanMinimum duan_minimum(const QuadratureCovariance& cov, const Detector& det1, const Detector& det2,
                         int samples = 64);

struct LocalOscillator {
  enum class Kind { Flat, Gaussian, OddFlat };
  Kind kind = Kind::Flat;
  double waist = 0.0;  ///< Gaussian only, in grid units

  static LocalOscillator flat() { return {Kind::Flat, 0.0}; }
  static LocalOscillator gaussian(double waist);
  static LocalOscillator odd_flat() { return {Kind::OddFlat, 0.0}; }

  /// Amplitude at a point; the odd profile is sign(x) and 0 on the axis.
  double amplitude(const Point& p) const;
};

std::string to_string(LocalOscillator::Kind kind);

/// Detector factory. Membership is decided on pixel centers: a pixel box is
/// half-open [c - s/2, c + s/2) on each axis, disks are closed. All throw
/// UsageError for a region without pixels.
namespace detectors {

Detector pixel(const TransverseGrid& grid, Point center, double size, const LocalOscillator& lo = LocalOscillator::flat());
Detector disk(const TransverseGrid& grid, double radius, const LocalOscillator& lo = LocalOscillator::flat(),
              Point center = {});
/// sign > 0 keeps x > 0, sign < 0 keeps x < 0.
Detector half_plane(const TransverseGrid& grid, int sign, const LocalOscillator& lo = LocalOscillator::flat());
/// Pixels at +center and -center; mirror images under grid reversal.
std::pair<Detector, Detector> symmetric_pixel_pair(const TransverseGrid& grid, Point center, double size,
                                                   const LocalOscillator& lo = LocalOscillator::flat());
/// The two halves x > 0 and x < 0 of a centered disk.
std::pair<Detector, Detector> split_disk_pair(const TransverseGrid& grid, double radius,
                                              const LocalOscillator& lo = LocalOscillator::flat());

}  // namespace detectors

/// Center of the pixel nearest to p (ties go to the larger index). Scans use it
/// so a requested position never falls on a pixel boundary.
Point nearest_pixel_center(const TransverseGrid& grid, Point p);

/// Radius of the segment (1D) or disk (2D) with the same measure as the
/// detector's pixel count: n h / 2 or h sqrt(n / pi).
double pixel_equivalent_radius(const Detector& det);

/// Distinct pixel-center distances from `center`, ascending. Stepping a disk
/// through these radii adds one shell of pixels per step.
std::vector<double> radial_shells(const TransverseGrid& grid, Point center = {});

}  // namespace simopo
