#pragma once

#include <Eigen/Core>

namespace simopo {

enum class Dimensionality { One = 1, Two = 2 };

inline constexpr int dimension_count(Dimensionality d) { return static_cast<int>(d); }

/// Crystal, pump and cavity parameters. All lengths are SI meters.
struct PhysicalParams {
  double wavelength_signal = 1064e-9;
  double crystal_length = 0.01;
  double refractive_index = 2.0;
  double pump_waist = 300e-6;
  double pump_ratio = 0.0;  ///< r, pump normalized to the oscillation threshold
  double detuning = 0.0;    ///< only zero detuning is supported by the noise model

  /// Throws DomainError if any invariant is violated.
  void validate() const;
  /// Additionally requires zero detuning.
  void validate_for_noise() const;

  /// Signal wavenumber k_s = 2 pi n_s / lambda inside the crystal.
  double wavenumber() const;
};

/// Gaussian TEM00 pump with amplitude A_p exp(-|x|^2 / w_p^2). A flat profile
/// (infinite waist) is the plane-pump limit.
class PumpProfile {
 public:
  static PumpProfile gaussian(double waist, double amplitude = 1.0);
  static PumpProfile flat(double amplitude = 1.0);

  bool is_flat() const noexcept { return flat_; }
  double waist() const noexcept { return waist_; }
  double amplitude() const noexcept { return amplitude_; }

  /// Near-field value at squared distance r2 from the axis.
  double near_field(double r2) const;
  /// Fourier transform at squared wavevector q2 with the unitary convention
  /// int d^d x / (2 pi)^(d/2). In 2D this is (w^2/2) A_p exp(-q^2 w^2 / 4).
  /// Undefined (throws) for a flat pump, whose transform is a delta.
  double far_field(double q2, Dimensionality dim) const;

 private:
  PumpProfile(double waist, double amplitude, bool flat) : waist_(waist), amplitude_(amplitude), flat_(flat) {}
  double waist_;
  double amplitude_;
  bool flat_;
};

/// Transverse diffraction kernel
///   Delta(d) = k_s / (2 pi l_c) (pi/2 - Si(k_s d^2 / (2 l_c))).
/// Units 1/m^2. Its 2D integral is exactly 1.
double delta_kernel(const PhysicalParams& params, double separation);

/// l_coh = sqrt(lambda l_c / (pi n_s)).
double coherence_length(const PhysicalParams& params);

/// w_p / l_coh in 1D, (w_p / l_coh)^2 in 2D.
double mode_count_b(const PhysicalParams& params, Dimensionality dim);

/// lambda f / (2 pi w_p): coherence scale in the Fourier plane of a lens of focal f.
double far_field_coherence_length(const PhysicalParams& params, double focal_length);

using RayMatrix = Eigen::Matrix2d;

RayMatrix free_space(double distance);
RayMatrix thin_lens(double focal_length);

struct SelfImagingCavity {
  double c12, c23, c31;           ///< image plane of lens i to object plane of lens j
  double d12, d23, d31;           ///< lens-to-lens distances f_i + c_ij + f_j
  RayMatrix round_trip;           ///< starting from the object plane of lens 1
  double identity_deviation;      ///< max relative deviation of round_trip from I
};

/// Ring of three thin lenses. Each lens sits at its focal distance from its own
/// object and image planes; the c_ij separate the image plane of lens i from the
/// object plane of lens j. With the lens-to-lens spacings f_i + c_ij + f_j the
/// loop closes, and the composed round-trip matrix is checked against I.
/// Throws DomainError for non-positive focal lengths and ConsistencyError if
/// the round trip is not the identity to 1e-10.
SelfImagingCavity self_imaging_distances(double f1, double f2, double f3);

}  // namespace simopo
