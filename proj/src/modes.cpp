#include "simopo/modes.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>
#include <vector>

#include "simopo/errors.hpp"
#include "simopo/special_functions.hpp"

namespace simopo {

namespace {

constexpr double kSingularityTolerance = 1e-12;

void require_one_dimensional(const ModeDecomposition& decomp) {
  if (decomp.grid.dimensionality() != Dimensionality::One) {
    throw UnsupportedError("Hermite-Gauss comparison is only defined for 1D decompositions");
  }
}

void require_mode(const ModeDecomposition& decomp, std::size_t mode_index) {
  if (mode_index >= static_cast<std::size_t>(decomp.eigenvalues.size())) {
    throw UsageError(fmt::format("mode index {} out of range", mode_index));
  }
}

}  // namespace

std::string to_string(FormulaMode mode) { return mode == FormulaMode::Paper ? "paper" : "transfer_function"; }

FormulaMode parse_formula_mode(const std::string& text) {
  if (text == "paper") return FormulaMode::Paper;
  if (text == "transfer_function") return FormulaMode::TransferFunction;
  throw UsageError("unknown formula mode '" + text + "' (expected paper or transfer_function)");
}

ModeDecomposition eigendecompose(const KernelMatrix& kernel) {
  return eigendecompose(kernel.entries, kernel.grid, kernel.id);
}

ModeDecomposition eigendecompose(const Eigen::MatrixXd& matrix, const TransverseGrid& grid, std::string id) {
  if (matrix.rows() != matrix.cols() || static_cast<std::size_t>(matrix.rows()) != grid.size()) {
    throw UsageError("eigendecompose: matrix shape does not match the grid");
  }
  if (static_cast<std::size_t>(matrix.rows()) > kMaxDecompositionSize) {
    throw UnsupportedError(fmt::format("eigendecompose: dimension {} exceeds the supported {}", matrix.rows(),
                                       kMaxDecompositionSize));
  }
  if (!matrix.allFinite()) throw DataError("eigendecompose: matrix has non-finite entries");
  const double scale = matrix.cwiseAbs().maxCoeff();
  const double asymmetry = symmetry_defect(matrix);
  if (asymmetry > 1e-12 * std::max(scale, std::numeric_limits<double>::min())) {
    throw DataError(fmt::format("eigendecompose: matrix is not symmetric (defect {:.3e})", asymmetry));
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
  if (solver.info() != Eigen::Success) {
    throw NumericalError(fmt::format("eigendecompose: solver failed to converge for a {}x{} matrix (scale {:.3e})",
                                     matrix.rows(), matrix.cols(), scale));
  }
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Eigen::MatrixXd& vectors = solver.eigenvectors();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ma = std::abs(values(a));
    const double mb = std::abs(values(b));
    if (ma != mb) return ma > mb;
    return values(a) > values(b);
  });

  ModeDecomposition out{std::move(id), grid, Eigen::VectorXd(values.size()),
                        Eigen::MatrixXd(vectors.rows(), vectors.cols()), 0.0};
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    out.eigenvalues(col) = values(order[k]);
    Eigen::VectorXd v = vectors.col(order[k]);
    const double cutoff = 1e-3 * v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (std::abs(v(i)) >= cutoff) {
        if (v(i) < 0.0) v = -v;
        break;
      }
    }
    out.eigenvectors.col(col) = v;
  }
  out.lambda_max = values.maxCoeff();
  return out;
}

ModeVariances mode_variances(const ModeDecomposition& decomp, double pump_ratio, FormulaMode mode,
                             double analysis_frequency) {
  if (!std::isfinite(pump_ratio) || pump_ratio < 0.0) throw DomainError("pump ratio must be finite and >= 0");
  if (pump_ratio >= 1.0) throw AboveThresholdError(fmt::format("pump ratio {} is at or above threshold", pump_ratio));
  if (!std::isfinite(analysis_frequency)) throw DomainError("analysis frequency must be finite");
  if (mode == FormulaMode::Paper && analysis_frequency != 0.0) {
    throw UsageError("the paper formula is a zero-frequency expression; use transfer_function for Omega != 0");
  }

  const Eigen::Index m = decomp.eigenvalues.size();
  ModeVariances out{pump_ratio, mode, analysis_frequency, Eigen::VectorXd(m), Eigen::VectorXd(m)};
  if (pump_ratio == 0.0) {
    out.variance_plus.setOnes();
    out.variance_minus.setOnes();
    return out;
  }
  if (!(decomp.lambda_max > 0.0)) throw DegenerateError("kernel has no positive eigenvalue; threshold undefined");

  const double w2 = analysis_frequency * analysis_frequency;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double x = pump_ratio * decomp.eigenvalues(k) / decomp.lambda_max;
    const double gap = 1.0 - std::abs(x);
    if (std::abs(gap) <= kSingularityTolerance) {
      throw ThresholdSingularityError(fmt::format("mode {} sits exactly at threshold (x = {:.15g})", k, x));
    }
    if (gap < 0.0) {
      throw AboveThresholdError(fmt::format("mode {} is above threshold (|x| = {:.6g})", k, std::abs(x)));
    }
    double minus;
    if (mode == FormulaMode::Paper) {
      minus = (1.0 - x) / (1.0 + x);
    } else {
      minus = ((1.0 - x) * (1.0 - x) + w2) / ((1.0 + x) * (1.0 + x) + w2);
    }
    out.variance_minus(k) = minus;
    out.variance_plus(k) = 1.0 / minus;
  }
  return out;
}

double cooperativity(const ModeDecomposition& decomp) {
  const double s2 = decomp.eigenvalues.squaredNorm();
  const double s4 = decomp.eigenvalues.array().square().square().sum();
  if (!(s4 > 0.0)) throw DegenerateError("cooperativity of an all-zero spectrum is undefined");
  return s2 * s2 / s4;
}

std::size_t significant_mode_count(const ModeDecomposition& decomp, double threshold_fraction) {
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
    throw DomainError("threshold fraction must lie in (0, 1)");
  }
  const double cut = threshold_fraction * decomp.lambda_max;
  return static_cast<std::size_t>((decomp.eigenvalues.array().abs() >= cut).count());
}

double pump_ratio_from_amplitude(const ModeDecomposition& decomp, double plane_wave_gain) {
  if (!(plane_wave_gain > 0.0)) throw DomainError("plane-wave gain must be positive");
  return decomp.lambda_max / plane_wave_gain;
}

double mode_parity(const ModeDecomposition& decomp, std::size_t mode_index) {
  require_mode(decomp, mode_index);
  const auto& v = decomp.eigenvectors.col(static_cast<Eigen::Index>(mode_index));
  double sum = 0.0;
  for (std::size_t i = 0; i < decomp.grid.size(); ++i) {
    sum += v(static_cast<Eigen::Index>(i)) * v(static_cast<Eigen::Index>(decomp.grid.mirror(i)));
  }
  return sum;
}

Eigen::VectorXd sampled_hermite_gauss(const TransverseGrid& grid, int order, double waist) {
  if (grid.dimensionality() != Dimensionality::One) throw UnsupportedError("sampled_hermite_gauss is 1D only");
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = hermite_gauss(order, grid.point(i).x, waist);
  }
  const double norm = v.norm();
  if (!(norm > 0.0)) throw DegenerateError("Hermite-Gauss function vanishes on the grid");
  return v / norm;
}

double mode_overlap(const ModeDecomposition& decomp, std::size_t mode_index, const Eigen::VectorXd& reference) {
  require_mode(decomp, mode_index);
  if (static_cast<std::size_t>(reference.size()) != decomp.grid.size()) {
    throw UsageError("reference vector does not live on the decomposition grid");
  }
  const double norm2 = reference.squaredNorm();
  if (!(norm2 > 0.0)) throw DegenerateError("reference vector is zero");
  const double projection = decomp.eigenvectors.col(static_cast<Eigen::Index>(mode_index)).dot(reference);
  return projection * projection / norm2;
}

double hermite_gauss_overlap(const ModeDecomposition& decomp, std::size_t mode_index, int order, double waist) {
  require_one_dimensional(decomp);
  return mode_overlap(decomp, mode_index, sampled_hermite_gauss(decomp.grid, order, waist));
}

WaistFit optimize_hermite_gauss_waist(const ModeDecomposition& decomp, std::size_t mode_index, int order,
                                      double pump_waist) {
  require_one_dimensional(decomp);
  if (!(pump_waist > 0.0)) throw DomainError("pump waist must be positive");
  const double lo = 0.2 * pump_waist;
  const double hi = 3.0 * pump_waist;
  auto score = [&](double w) { return hermite_gauss_overlap(decomp, mode_index, order, w); };

  constexpr int kScan = 280;
  const double step = (hi - lo) / kScan;
  int best = 0;
  double best_value = -1.0;
  for (int i = 0; i <= kScan; ++i) {
    const double value = score(lo + i * step);
    if (value > best_value) {
      best_value = value;
      best = i;
    }
  }

  double a = lo + std::max(0, best - 1) * step;
  double b = lo + std::min(kScan, best + 1) * step;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = score(c);
  double fd = score(d);
  for (int iter = 0; iter < 80 && (b - a) > 1e-12 * pump_waist; ++iter) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = score(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = score(d);
    }
  }
  WaistFit fit{0.5 * (a + b), score(0.5 * (a + b))};
  if (best_value > fit.overlap) fit = {lo + best * step, best_value};
  return fit;
}

}  // namespace simopo
