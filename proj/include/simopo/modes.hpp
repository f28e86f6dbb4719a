#pragma once

#include <Eigen/Core>
#include <string>

#include "simopo/grid.hpp"
#include "simopo/kernels.hpp"

namespace simopo {

enum class FormulaMode {
  Paper,            ///< Lambda^- = (1 - x) / (1 + x)
  TransferFunction  ///< Lambda^- = ((1 - x)^2 + W^2) / ((1 + x)^2 + W^2)
};

std::string to_string(FormulaMode mode);
FormulaMode parse_formula_mode(const std::string& text);

/// Eigen-decomposition of a kernel. Eigenvalues are sorted by descending
/// |lambda| (ties: descending lambda); each eigenvector has its first
/// significant component (|v_i| >= 1e-3 max|v|) positive.
struct ModeDecomposition {
  std::string kernel_id;
  TransverseGrid grid;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  ///< column k is mode k
  double lambda_max = 0.0;       ///< largest eigenvalue
};

struct ModeVariances {
  double pump_ratio = 0.0;
  FormulaMode formula_mode = FormulaMode::Paper;
  double analysis_frequency = 0.0;  ///< Omega / gamma
  Eigen::VectorXd variance_plus;    ///< amplified quadrature for lambda_k > 0
  Eigen::VectorXd variance_minus;   ///< squeezed quadrature for lambda_k > 0
};

/// Largest supported matrix dimension.
inline constexpr std::size_t kMaxDecompositionSize = 8192;

/// Full symmetric eigen-decomposition. Throws DataError when the matrix is not
/// symmetric to 1e-12 (relative to its largest entry) and NumericalError when
/// the solver does not converge.
ModeDecomposition eigendecompose(const KernelMatrix& kernel);
ModeDecomposition eigendecompose(const Eigen::MatrixXd& matrix, const TransverseGrid& grid, std::string id = {});

/// Per-mode zero-frequency (or Omega/gamma = analysis_frequency) quadrature
/// variances with x_k = r lambda_k / lambda_max, shot noise = 1.
/// Throws AboveThresholdError for r outside [0, 1) or any |x_k| > 1, and
/// ThresholdSingularityError when |x_k| is within 1e-12 of 1.
ModeVariances mode_variances(const ModeDecomposition& decomp, double pump_ratio,
                             FormulaMode mode = FormulaMode::Paper, double analysis_frequency = 0.0);

/// (sum lambda^2)^2 / sum lambda^4. Throws DegenerateError for a zero spectrum.
double cooperativity(const ModeDecomposition& decomp);

/// Number of modes with |lambda_k| >= fraction * lambda_max.
std::size_t significant_mode_count(const ModeDecomposition& decomp, double threshold_fraction = 0.10);

/// Global pump ratio r = lambda_max / gain for a kernel built with an absolute
/// pump amplitude, where gain is plane_wave_gain(); amplitude 1 is threshold on
/// the axis for a locally plane pump.
double pump_ratio_from_amplitude(const ModeDecomposition& decomp, double plane_wave_gain);

/// v^T P v for the grid reversal P: +1 even, -1 odd.
double mode_parity(const ModeDecomposition& decomp, std::size_t mode_index);

/// Hermite-Gauss function of the given order sampled on a 1D grid, unit discrete norm.
Eigen::VectorXd sampled_hermite_gauss(const TransverseGrid& grid, int order, double waist);

/// |<C_k, ref>|^2 / |ref|^2 for any reference vector on the grid.
double mode_overlap(const ModeDecomposition& decomp, std::size_t mode_index, const Eigen::VectorXd& reference);

/// |<C_k, HG_n(waist)>|^2 in [0, 1]. 1D only (UnsupportedError otherwise).
double hermite_gauss_overlap(const ModeDecomposition& decomp, std::size_t mode_index, int order, double waist);

struct WaistFit {
  double waist = 0.0;
  double overlap = 0.0;
};

/// Maximizes hermite_gauss_overlap over waists in [0.2, 3] * pump_waist:
/// coarse scan followed by golden-section refinement.
WaistFit optimize_hermite_gauss_waist(const ModeDecomposition& decomp, std::size_t mode_index, int order,
                                      double pump_waist);

}  // namespace simopo
