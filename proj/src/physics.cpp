#include "simopo/physics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "simopo/errors.hpp"
#include "simopo/special_functions.hpp"

namespace simopo {

namespace {

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || !(value > 0.0)) {
    throw DomainError(std::string(name) + " must be finite and strictly positive");
  }
}

}  // namespace

void PhysicalParams::validate() const {
  require_positive(wavelength_signal, "wavelength_signal");
  require_positive(crystal_length, "crystal_length");
  require_positive(pump_waist, "pump_waist");
  if (!std::isfinite(refractive_index) || refractive_index < 1.0) {
    throw DomainError("refractive_index must be >= 1");
  }
  if (!std::isfinite(pump_ratio) || pump_ratio < 0.0 || pump_ratio >= 1.0) {
    throw DomainError("pump_ratio must satisfy 0 <= r < 1");
  }
  if (!std::isfinite(detuning)) throw DomainError("detuning must be finite");
}

void PhysicalParams::validate_for_noise() const {
  validate();
  if (detuning != 0.0) throw DomainError("only zero cavity detuning is supported");
}

double PhysicalParams::wavenumber() const { return 2.0 * kPi * refractive_index / wavelength_signal; }

PumpProfile PumpProfile::gaussian(double waist, double amplitude) {
  require_positive(waist, "pump waist");
  if (!std::isfinite(amplitude) || amplitude < 0.0) throw DomainError("pump amplitude must be >= 0");
  return PumpProfile(waist, amplitude, false);
}

PumpProfile PumpProfile::flat(double amplitude) {
  if (!std::isfinite(amplitude) || amplitude < 0.0) throw DomainError("pump amplitude must be >= 0");
  return PumpProfile(std::numeric_limits<double>::infinity(), amplitude, true);
}

double PumpProfile::near_field(double r2) const {
  if (flat_) return amplitude_;
  return amplitude_ * std::exp(-r2 / (waist_ * waist_));
}

double PumpProfile::far_field(double q2, Dimensionality dim) const {
  if (flat_) throw UsageError("the Fourier transform of a flat pump is a delta distribution");
  const double w = waist_;
  const double envelope = std::exp(-q2 * w * w / 4.0);
  if (dim == Dimensionality::Two) return amplitude_ * (w * w / 2.0) * envelope;
  return amplitude_ * (w / std::sqrt(2.0)) * envelope;
}

double delta_kernel(const PhysicalParams& params, double separation) {
  params.validate();
  if (!std::isfinite(separation) || separation < 0.0) {
    throw DomainError("delta_kernel: separation must be finite and >= 0");
  }
  const double k = params.wavenumber();
  const double l = params.crystal_length;
  return k / (2.0 * kPi * l) * (kPi / 2.0 - sine_integral(k * separation * separation / (2.0 * l)));
}

double coherence_length(const PhysicalParams& params) {
  params.validate();
  return std::sqrt(params.wavelength_signal * params.crystal_length / (kPi * params.refractive_index));
}

double mode_count_b(const PhysicalParams& params, Dimensionality dim) {
  const double ratio = params.pump_waist / coherence_length(params);
  return dim == Dimensionality::One ? ratio : ratio * ratio;
}

double far_field_coherence_length(const PhysicalParams& params, double focal_length) {
  params.validate();
  require_positive(focal_length, "focal_length");
  return params.wavelength_signal * focal_length / (2.0 * kPi * params.pump_waist);
}

RayMatrix free_space(double distance) {
  RayMatrix m;
  m << 1.0, distance, 0.0, 1.0;
  return m;
}

RayMatrix thin_lens(double focal_length) {
  RayMatrix m;
  m << 1.0, 0.0, -1.0 / focal_length, 1.0;
  return m;
}

SelfImagingCavity self_imaging_distances(double f1, double f2, double f3) {
  require_positive(f1, "f1");
  require_positive(f2, "f2");
  require_positive(f3, "f3");

  SelfImagingCavity cavity{};
  cavity.c12 = f1 * f2 / f3;
  cavity.c23 = f2 * f3 / f1;
  cavity.c31 = f3 * f1 / f2;
  cavity.d12 = f1 + cavity.c12 + f2;
  cavity.d23 = f2 + cavity.c23 + f3;
  cavity.d31 = f3 + cavity.c31 + f1;

  // Start at the object plane of lens 1: f1 to the lens, then lens-to-lens
  // spacings around the ring. The closure spacing d31 ends on lens 1, so the
  // last segment stops f1 short of it, back on the starting plane.
  const RayMatrix m = free_space(cavity.d31 - f1) * thin_lens(f3) * free_space(cavity.d23) * thin_lens(f2) *
                      free_space(cavity.d12) * thin_lens(f1) * free_space(f1);
  cavity.round_trip = m;

  const double length_scale = cavity.d12 + cavity.d23 + cavity.d31;
  const double deviation = std::max({std::abs(m(0, 0) - 1.0), std::abs(m(1, 1) - 1.0),
                                     std::abs(m(0, 1)) / length_scale, std::abs(m(1, 0)) * length_scale});
  cavity.identity_deviation = deviation;
  if (!(deviation <= 1e-10)) {
    throw ConsistencyError("self-imaging round trip is not the identity (deviation " + std::to_string(deviation) +
                           ")");
  }
  return cavity;
}

}  // namespace simopo
