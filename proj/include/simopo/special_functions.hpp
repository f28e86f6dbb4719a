#pragma once

#include <vector>

namespace simopo {

inline constexpr double kPi = 3.14159265358979323846;

/// Sine integral Si(x) = int_0^x sin(u)/u du.
///
/// Power series for |x| <= 4; beyond that the auxiliary functions f and g
/// (pi/2 - Si = f cos x + g sin x) are obtained from the continued fraction of
/// E1(ix). Absolute error stays at the 1e-15 level for all finite x.
/// Throws DomainError for non-finite input.
double sine_integral(double x);

/// sin(u)/u with the removable singularity at 0 filled in.
double sinc(double u);

/// int_0^1 sin(pi/4 - beta t^2) dt for beta >= 0. This is the z-averaged
/// Fresnel factor that appears in the one-dimensional transform of the
/// diffraction kernel.
double quarter_phase_fresnel(double beta);

/// Hermite-Gauss function H_n(sqrt(2) x / w) exp(-x^2 / w^2), computed with the
/// normalized three-term recurrence (stable for large n). The overall
/// normalization is that of the continuous L2 norm with respect to
/// u = sqrt(2) x / w.
double hermite_gauss(int order, double x, double waist);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre(int points);

}  // namespace simopo
