#pragma once

#include <Eigen/Core>
#include <complex>
#include <string>

#include "simopo/grid.hpp"
#include "simopo/physics.hpp"

namespace simopo {

enum class KernelSpace { NearField, FarField };

std::string to_string(KernelSpace space);

/// Discretized parametric coupling kernel. Entries carry the pixel measure,
/// so the matrix is dimensionless in 2D and its eigenvalues approximate those
/// of the continuous integral operator. Symmetric bit-for-bit.
struct KernelMatrix {
  TransverseGrid grid;
  KernelSpace space;
  Eigen::MatrixXd entries;
  std::string id;
  bool thin_crystal = false;
};

struct KernelOptions {
  /// Replace the diffraction kernel by a Kronecker delta (l_c -> 0 limit).
  bool thin_crystal = false;
  /// Worker threads for assembly; results do not depend on this.
  int threads = 1;
};

/// Fourier transform of the diffraction kernel at half-difference wavevector
/// p, with the unitary convention. 2D: sinc(l_c p^2 / (2 k_s)) / (2 pi).
/// 1D: the transform of the same Si-based profile taken along a line,
/// (sqrt 2 / (pi l_coh)) int_0^1 sin(pi/4 - beta t^2) dt, beta = l_c p^2 / (2 k_s).
double phase_matching_factor(const PhysicalParams& params, double p2, Dimensionality dim);

/// Plane-wave gain: the top eigenvalue of the kernel for a flat pump of unit
/// amplitude (the integral of the diffraction kernel). A local pump amplitude
/// of 1 is threshold on that scale.
double plane_wave_gain(const PhysicalParams& params, Dimensionality dim, bool thin_crystal);

/// K(i, j) = A_p((x_i + x_j) / 2) Delta(|x_i - x_j|) * pixel measure.
/// Throws UsageError for a wavevector grid and ResolutionError when the pixel
/// is coarser than l_coh / 4 or the window is narrower than 6 w_p.
KernelMatrix build_near_field_kernel(const TransverseGrid& grid, const PhysicalParams& params,
                                     const PumpProfile& pump, const KernelOptions& options = {});

/// K~(a, b) = A~_p(q_a + q_b) * phase_matching_factor((q_a - q_b) / 2) * pixel measure.
/// A flat pump couples q only to -q (anti-diagonal).
KernelMatrix build_far_field_kernel(const TransverseGrid& grid, const PhysicalParams& params,
                                    const PumpProfile& pump, const KernelOptions& options = {});

/// Unitary DFT matrix from a grid to its Fourier dual, F(a, i) = exp(-i q_a x_i) / sqrt(M).
Eigen::MatrixXcd dft_matrix(const TransverseGrid& from);

struct DualityReport {
  double max_deviation = 0.0;   ///< max |F K F^T - K~| over significant entries, relative to max |K~|
  double max_imaginary = 0.0;   ///< largest imaginary residue, relative to max |K~|
  std::size_t compared_entries = 0;
};

/// Double discrete Fourier transform of the near-field matrix compared with
/// the analytic far-field matrix on entries with |K~| >= 1e-3 max |K~|.
/// Throws UsageError unless the grids are Fourier duals.
DualityReport dft_cross_check(const KernelMatrix& near, const KernelMatrix& far);

/// Largest |K(i,j) - K(j,i)|.
double symmetry_defect(const Eigen::MatrixXd& matrix);

}  // namespace simopo
