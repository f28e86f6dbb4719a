#include "simopo/detection.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "simopo/errors.hpp"
#include "simopo/special_functions.hpp"

namespace simopo {

namespace {

constexpr double kMembershipSlack = 1e-12;

void require_same_grid(const QuadratureCovariance& cov, const Detector& det) {
  if (!(cov.grid == det.grid)) {
    throw UsageError(fmt::format("detector '{}' lives on {}, covariance on {}", det.label, det.grid.describe(),
                                 cov.grid.describe()));
  }
}

double quadratic_form(const Eigen::MatrixXd& c, const Eigen::VectorXd& w) { return w.dot(c * w); }

double mixed_variance(const QuadratureCovariance& cov, const Eigen::VectorXd& w, double phase, double norm) {
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  return (c * c * quadratic_form(cov.cov_plus, w) + s * s * quadratic_form(cov.cov_minus, w)) / norm;
}

template <typename Inside>
Detector make_detector(const TransverseGrid& grid, const LocalOscillator& lo, std::string label, Inside&& inside) {
  Detector det{grid, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size())), std::move(label)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point p = grid.point(i);
    if (inside(p)) det.weights(static_cast<Eigen::Index>(i)) = lo.amplitude(p);
  }
  if (det.pixel_count() == 0) throw UsageError(fmt::format("detector region '{}' contains no pixel", det.label));
  return det;
}

bool in_half_open(double value, double center, double size) {
  const double lo = center - 0.5 * size;
  const double hi = center + 0.5 * size;
  return value >= lo && value < hi;
}

void check_disjoint(const Detector& a, const Detector& b) {
  if (!(a.grid == b.grid)) throw UsageError("detectors live on different grids");
  for (Eigen::Index i = 0; i < a.weights.size(); ++i) {
    if (a.weights(i) != 0.0 && b.weights(i) != 0.0) {
      throw UsageError(fmt::format("detectors '{}' and '{}' overlap at pixel {}", a.label, b.label, i));
    }
  }
}

}  // namespace

std::size_t Detector::pixel_count() const { return static_cast<std::size_t>((weights.array() != 0.0).count()); }

void Detector::validate() const {
  if (static_cast<std::size_t>(weights.size()) != grid.size()) {
    throw UsageError(fmt::format("detector '{}' has {} weights for {} pixels", label, weights.size(), grid.size()));
  }
  if (!weights.allFinite()) throw UsageError(fmt::format("detector '{}' has non-finite weights", label));
  if (!(shot_noise() > 0.0)) throw UsageError(fmt::format("detector '{}' has no nonzero weight", label));
}

QuadratureCovariance output_covariance(const ModeDecomposition& decomp, double pump_ratio, FormulaMode mode,
                                       double analysis_frequency) {
  const ModeVariances variances = mode_variances(decomp, pump_ratio, mode, analysis_frequency);
  const Eigen::MatrixXd& v = decomp.eigenvectors;
  auto compose = [&](const Eigen::VectorXd& lambda) {
    Eigen::MatrixXd c = (v * lambda.asDiagonal()) * v.transpose();
    // Products in the two halves differ in rounding; keep the matrix exactly symmetric.
    return Eigen::MatrixXd(0.5 * (c + c.transpose()));
  };
  return {decomp.grid, pump_ratio, mode, compose(variances.variance_plus), compose(variances.variance_minus)};
}

double homodyne_variance(const QuadratureCovariance& cov, const Detector& det, double phase) {
  require_same_grid(cov, det);
  det.validate();
  if (!std::isfinite(phase)) throw UsageError("homodyne phase must be finite");
  return mixed_variance(cov, det.weights, phase, det.shot_noise());
}

EprSpectra epr_spectra(const QuadratureCovariance& cov, const Detector& det1, const Detector& det2, double phase) {
  require_same_grid(cov, det1);
  require_same_grid(cov, det2);
  det1.validate();
  det2.validate();
  check_disjoint(det1, det2);
  if (!std::isfinite(phase)) throw UsageError("homodyne phase must be finite");
  const double norm = det1.shot_noise() + det2.shot_noise();
  const Eigen::VectorXd difference = det1.weights - det2.weights;
  const Eigen::VectorXd sum = det1.weights + det2.weights;
  return {mixed_variance(cov, difference, phase, norm), mixed_variance(cov, sum, phase, norm)};
}

double duan_separability(const QuadratureCovariance& cov, const Detector& det1, const Detector& det2, double phase) {
  const double v_minus = epr_spectra(cov, det1, det2, phase).v_minus;
  const double v_plus = epr_spectra(cov, det1, det2, phase + 0.5 * kPi).v_plus;
  return 0.5 * (v_minus + v_plus);
}

DuanMinimum duan_minimum(const QuadratureCovariance& cov, const Detector& det1, const Detector& det2, int samples) {
  if (samples < 1) throw UsageError("phase scan needs at least one sample");
  DuanMinimum best{std::numeric_limits<double>::infinity(), 0.0};
  for (int k = 0; k < samples; ++k) {
    const double phase = kPi * k / samples;
    const double s = duan_separability(cov, det1, det2, phase);
    if (s < best.value) best = {s, phase};
  }
  return best;
}

LocalOscillator LocalOscillator::gaussian(double waist) {
  if (!(waist > 0.0) || !std::isfinite(waist)) throw UsageError("local-oscillator waist must be positive and finite");
  return {Kind::Gaussian, waist};
}

double LocalOscillator::amplitude(const Point& p) const {
  switch (kind) {
    case Kind::Flat:
      return 1.0;
    case Kind::Gaussian:
      return std::exp(-p.norm2() / (waist * waist));
    case Kind::OddFlat:
      return p.x > 0.0 ? 1.0 : (p.x < 0.0 ? -1.0 : 0.0);
  }
  return 0.0;
}

std::string to_string(LocalOscillator::Kind kind) {
  switch (kind) {
    case LocalOscillator::Kind::Flat:
      return "flat";
    case LocalOscillator::Kind::Gaussian:
      return "gaussian";
    case LocalOscillator::Kind::OddFlat:
      return "odd_flat";
  }
  return "unknown";
}

namespace detectors {

Detector pixel(const TransverseGrid& grid, Point center, double size, const LocalOscillator& lo) {
  if (!(size > 0.0)) throw UsageError("pixel size must be positive");
  const bool two_d = grid.dimensionality() == Dimensionality::Two;
  return make_detector(grid, lo, fmt::format("pixel({:.6g},{:.6g};{:.6g})", center.x, center.y, size),
                       [&](const Point& p) {
                         return in_half_open(p.x, center.x, size) && (!two_d || in_half_open(p.y, center.y, size));
                       });
}

Detector disk(const TransverseGrid& grid, double radius, const LocalOscillator& lo, Point center) {
  if (!(radius >= 0.0)) throw UsageError("disk radius must be non-negative");
  const double r2 = radius * radius * (1.0 + kMembershipSlack);
  return make_detector(grid, lo, fmt::format("disk({:.6g})", radius), [&](const Point& p) {
    const Point d{p.x - center.x, p.y - center.y};
    return d.norm2() <= r2;
  });
}

Detector half_plane(const TransverseGrid& grid, int sign, const LocalOscillator& lo) {
  if (sign == 0) throw UsageError("half-plane sign must be nonzero");
  return make_detector(grid, lo, sign > 0 ? "half_plane(+)" : "half_plane(-)",
                       [&](const Point& p) { return sign > 0 ? p.x > 0.0 : p.x < 0.0; });
}

std::pair<Detector, Detector> symmetric_pixel_pair(const TransverseGrid& grid, Point center, double size,
                                                   const LocalOscillator& lo) {
  Detector first = pixel(grid, center, size, lo);
  // Mirror the membership rather than re-testing the box, so boundary pixels stay paired.
  Detector second{grid, Eigen::VectorXd::Zero(first.weights.size()),
                  fmt::format("pixel({:.6g},{:.6g};{:.6g})", -center.x, -center.y, size)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (first.weights(static_cast<Eigen::Index>(i)) == 0.0) continue;
    const std::size_t j = grid.mirror(i);
    second.weights(static_cast<Eigen::Index>(j)) = lo.amplitude(grid.point(j));
  }
  if (second.pixel_count() == 0) throw UsageError("mirrored pixel has zero local-oscillator weight");
  check_disjoint(first, second);
  return {std::move(first), std::move(second)};
}

std::pair<Detector, Detector> split_disk_pair(const TransverseGrid& grid, double radius, const LocalOscillator& lo) {
  if (!(radius >= 0.0)) throw UsageError("disk radius must be non-negative");
  const double r2 = radius * radius * (1.0 + kMembershipSlack);
  Detector right = make_detector(grid, lo, fmt::format("split_disk+({:.6g})", radius),
                                 [&](const Point& p) { return p.x > 0.0 && p.norm2() <= r2; });
  Detector left = make_detector(grid, lo, fmt::format("split_disk-({:.6g})", radius),
                                [&](const Point& p) { return p.x < 0.0 && p.norm2() <= r2; });
  return {std::move(right), std::move(left)};
}

}  // namespace detectors

Point nearest_pixel_center(const TransverseGrid& grid, Point p) {
  const int n = grid.points_per_axis();
  auto snap = [&](double v) {
    const double index = std::floor(v / grid.spacing() + 0.5 * (n - 1) + 0.5);
    return grid.axis_coordinate(static_cast<int>(std::clamp(index, 0.0, static_cast<double>(n - 1))));
  };
  if (grid.dimensionality() == Dimensionality::One) return {snap(p.x), 0.0};
  return {snap(p.x), snap(p.y)};
}

double pixel_equivalent_radius(const Detector& det) {
  const auto n = static_cast<double>(det.pixel_count());
  const double h = det.grid.spacing();
  if (det.grid.dimensionality() == Dimensionality::One) return 0.5 * n * h;
  return h * std::sqrt(n / kPi);
}

std::vector<double> radial_shells(const TransverseGrid& grid, Point center) {
  std::vector<double> d2;
  d2.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point p = grid.point(i);
    d2.push_back((p.x - center.x) * (p.x - center.x) + (p.y - center.y) * (p.y - center.y));
  }
  std::sort(d2.begin(), d2.end());
  std::vector<double> shells;
  for (double v : d2) {
    // Equal distances can differ by rounding; keep the largest of a group so the disk test catches all.
    if (shells.empty() || v > shells.back() * (1.0 + 1e-9) + 1e-300) {
      shells.push_back(v);
    } else {
      shells.back() = v;
    }
  }
  for (double& v : shells) v = std::sqrt(v);
  return shells;
}

}  // namespace simopo
