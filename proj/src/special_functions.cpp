#include "simopo/special_functions.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "simopo/errors.hpp"

namespace simopo {

namespace {

constexpr double kSeriesLimit = 4.0;

double sine_integral_series(double x) {
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int n = 1; n < 60; ++n) {
    term *= -x2 / ((2.0 * n) * (2.0 * n + 1.0));
    const double contribution = term / (2.0 * n + 1.0);
    sum += contribution;
    if (std::abs(contribution) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Modified Lentz evaluation of the continued fraction for E1(ix); returns
// pi/2 - Si(x) for x > 0.
double sine_integral_complement_cf(double x) {
  using cplx = std::complex<double>;
  constexpr double kTiny = 1e-300;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  cplx b(1.0, x);
  cplx c(1.0 / kTiny, 0.0);
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 2; i < 100000; ++i) {
    const double a = -static_cast<double>(i - 1) * static_cast<double>(i - 1);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const cplx del = c * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < kEps) {
      h *= cplx(std::cos(x), -std::sin(x));
      return -h.imag();
    }
  }
  throw NumericalError("sine_integral: continued fraction did not converge");
}

}  // namespace

double sine_integral(double x) {
  if (!std::isfinite(x)) throw DomainError("sine_integral: argument must be finite");
  const double ax = std::abs(x);
  const double value =
      ax <= kSeriesLimit ? sine_integral_series(ax) : kPi / 2.0 - sine_integral_complement_cf(ax);
  return x < 0.0 ? -value : value;
}

double sinc(double u) {
  if (std::abs(u) < 1e-4) {
    const double u2 = u * u;
    return 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
  }
  return std::sin(u) / u;
}

double quarter_phase_fresnel(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw DomainError("quarter_phase_fresnel: beta must be finite and non-negative");
  }
  static const QuadratureRule rule = gauss_legendre(20);
  // At most one oscillation of the integrand per panel.
  const int panels = 1 + static_cast<int>(std::ceil(beta / kPi));
  const double width = 1.0 / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * width;
    double panel = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double t = mid + 0.5 * width * rule.nodes[k];
      panel += rule.weights[k] * std::sin(kPi / 4.0 - beta * t * t);
    }
    sum += 0.5 * width * panel;
  }
  return sum;
}

double hermite_gauss(int order, double x, double waist) {
  if (order < 0) throw DomainError("hermite_gauss: order must be non-negative");
  if (!(waist > 0.0)) throw DomainError("hermite_gauss: waist must be positive");
  const double u = std::sqrt(2.0) * x / waist;
  // psi_n(u) = H_n(u) exp(-u^2/2) / sqrt(2^n n! sqrt(pi))
  double previous = 0.0;
  double current = std::pow(kPi, -0.25) * std::exp(-0.5 * u * u);
  for (int n = 0; n < order; ++n) {
    const double next = std::sqrt(2.0 / (n + 1)) * u * current - std::sqrt(static_cast<double>(n) / (n + 1)) * previous;
    previous = current;
    current = next;
  }
  return current;
}

QuadratureRule gauss_legendre(int points) {
  if (points < 1) throw DomainError("gauss_legendre: need at least one point");
  QuadratureRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  const int half = (points + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (points + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 0; j < points; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      derivative = points * (z * p0 - p1) / (z * z - 1.0);
      const double step = p0 / derivative;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[points - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * derivative * derivative);
    rule.weights[i] = w;
    rule.weights[points - 1 - i] = w;
  }
  return rule;
}

}  // namespace simopo
