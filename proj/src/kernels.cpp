#include "simopo/kernels.hpp"

#include <cmath>
#include <algorithm>
#include <cstdlib>
#include <limits>
#include <fmt/format.h>
#include <vector>

#include "simopo/errors.hpp"
#include "simopo/parallel.hpp"
#include "simopo/special_functions.hpp"

namespace simopo {

namespace {

constexpr double kRuleSlack = 1e-12;

double delta_from_squared(const PhysicalParams& params, double d2) {
  const double k = params.wavenumber();
  const double l = params.crystal_length;
  return k / (2.0 * kPi * l) * (kPi / 2.0 - sine_integral(k * d2 / (2.0 * l)));
}

std::string kernel_id(const char* tag, const TransverseGrid& grid, const PumpProfile& pump, bool thin) {
  return fmt::format("{}:{}:N={}:extent={:.17g}:w={:.17g}:A={:.17g}{}", tag, to_string(grid.dimensionality()),
                     grid.points_per_axis(), grid.extent(), pump.waist(), pump.amplitude(), thin ? ":thin" : "");
}

// Fills the upper triangle with value(row, col) and mirrors it.
template <typename ValueFn>
Eigen::MatrixXd assemble_symmetric(std::size_t m, int threads, ValueFn&& value) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  parallel_for(m, threads, [&](std::size_t i) {
    for (std::size_t j = i; j < m; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value(i, j);
    }
  });
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < out.cols(); ++j) out(j, i) = out(i, j);
  }
  return out;
}

}  // namespace

std::string to_string(KernelSpace space) { return space == KernelSpace::NearField ? "near_field" : "far_field"; }

double phase_matching_factor(const PhysicalParams& params, double p2, Dimensionality dim) {
  const double beta = params.crystal_length * p2 / (2.0 * params.wavenumber());
  if (dim == Dimensionality::Two) return sinc(beta) / (2.0 * kPi);
  return std::sqrt(2.0) / (kPi * coherence_length(params)) * quarter_phase_fresnel(beta);
}

double plane_wave_gain(const PhysicalParams& params, Dimensionality dim, bool thin_crystal) {
  if (thin_crystal) return 1.0;
  const double norm = dim == Dimensionality::Two ? 2.0 * kPi : std::sqrt(2.0 * kPi);
  return norm * phase_matching_factor(params, 0.0, dim);
}

KernelMatrix build_near_field_kernel(const TransverseGrid& grid, const PhysicalParams& params,
                                     const PumpProfile& pump, const KernelOptions& options) {
  if (grid.space() != Space::Position) throw UsageError("near-field kernel needs a position-space grid");
  params.validate_for_noise();

  const int n = grid.points_per_axis();
  const double h = grid.spacing();
  if (!options.thin_crystal) {
    const double ratio = h / coherence_length(params);
    if (ratio > 0.25 * (1.0 + kRuleSlack)) {
      throw ResolutionError(fmt::format("pixel size is {:.4g} l_coh, must be <= 0.25 l_coh", ratio), ratio);
    }
  }
  if (!pump.is_flat()) {
    const double ratio = grid.extent() / pump.waist();
    if (ratio < 6.0 * (1.0 - kRuleSlack)) {
      throw ResolutionError(fmt::format("grid extent is {:.4g} w_p, must be >= 6 w_p", ratio), ratio);
    }
  }

  // Pump factor per axis, indexed by ix + jx; midpoint = (s - (N-1)) h / 2.
  std::vector<double> pump_axis(2 * static_cast<std::size_t>(n) - 1);
  for (std::size_t s = 0; s < pump_axis.size(); ++s) {
    const double mid = (static_cast<double>(s) - (n - 1)) * 0.5 * h;
    pump_axis[s] = pump.is_flat() ? 1.0 : std::exp(-mid * mid / (pump.waist() * pump.waist()));
  }
  const double amplitude = pump.amplitude();
  const double measure = grid.pixel_measure();
  const bool two_d = grid.dimensionality() == Dimensionality::Two;

  // Diffraction factor indexed by |ix - jx| (and |iy - jy| in 2D).
  const std::size_t offsets = static_cast<std::size_t>(n);
  std::vector<double> delta(two_d ? offsets * offsets : offsets, 0.0);
  if (options.thin_crystal) {
    delta[0] = 1.0 / measure;
  } else {
    parallel_for(offsets, options.threads, [&](std::size_t a) {
      if (two_d) {
        for (std::size_t b = 0; b < offsets; ++b) {
          const double d2 = (static_cast<double>(a * a) + static_cast<double>(b * b)) * h * h;
          delta[a * offsets + b] = delta_from_squared(params, d2);
        }
      } else {
        delta[a] = delta_from_squared(params, static_cast<double>(a * a) * h * h);
      }
    });
  }

  KernelMatrix kernel{grid, KernelSpace::NearField, {}, kernel_id("near", grid, pump, options.thin_crystal),
                      options.thin_crystal};
  kernel.entries = assemble_symmetric(grid.size(), options.threads, [&](std::size_t i, std::size_t j) {
    const auto [ix, iy] = grid.index_map(i);
    const auto [jx, jy] = grid.index_map(j);
    const auto ox = static_cast<std::size_t>(std::abs(ix - jx));
    if (two_d) {
      const auto oy = static_cast<std::size_t>(std::abs(iy - jy));
      return amplitude * pump_axis[ix + jx] * pump_axis[iy + jy] * delta[ox * offsets + oy] * measure;
    }
    return amplitude * pump_axis[ix + jx] * delta[ox] * measure;
  });
  return kernel;
}

KernelMatrix build_far_field_kernel(const TransverseGrid& grid, const PhysicalParams& params,
                                    const PumpProfile& pump, const KernelOptions& options) {
  if (grid.space() != Space::Wavevector) throw UsageError("far-field kernel needs a wavevector grid");
  params.validate_for_noise();

  const auto dim = grid.dimensionality();
  const bool two_d = dim == Dimensionality::Two;
  const int n = grid.points_per_axis();
  const double h = grid.spacing();
  if (!pump.is_flat()) {
    const double ratio = grid.extent() * pump.waist();
    if (ratio < 12.0 * (1.0 - kRuleSlack)) {
      throw ResolutionError(fmt::format("wavevector extent is {:.4g} / w_p, must be >= 12 / w_p", ratio), ratio);
    }
  }
  if (!options.thin_crystal) {
    const double ratio = grid.extent() * coherence_length(params);
    if (ratio < 4.0 * (1.0 - kRuleSlack)) {
      throw ResolutionError(fmt::format("wavevector extent is {:.4g} / l_coh, must be >= 4 / l_coh", ratio), ratio);
    }
  }

  const double measure = grid.pixel_measure();
  const double unit_transform = two_d ? 2.0 * kPi : std::sqrt(2.0 * kPi);
  const double thin_phase = 1.0 / unit_transform;
  auto phase = [&](double p2) { return options.thin_crystal ? thin_phase : phase_matching_factor(params, p2, dim); };

  KernelMatrix kernel{grid, KernelSpace::FarField, {}, kernel_id("far", grid, pump, options.thin_crystal),
                      options.thin_crystal};
  const std::size_t m = grid.size();

  if (pump.is_flat()) {
    // A~_p(q + q') -> A_p (2 pi)^(d/2) delta(q + q'); the delta absorbs the measure.
    kernel.entries = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t a = 0; a < m; ++a) {
      const std::size_t b = grid.mirror(a);
      const double q2 = grid.point(a).norm2();
      kernel.entries(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          pump.amplitude() * unit_transform * phase(q2);
    }
    return kernel;
  }

  std::vector<double> pump_axis(2 * static_cast<std::size_t>(n) - 1);
  const double w = pump.waist();
  for (std::size_t s = 0; s < pump_axis.size(); ++s) {
    const double total = (static_cast<double>(s) - (n - 1)) * h;
    pump_axis[s] = std::exp(-total * total * w * w / 4.0);
  }
  const double pump_peak = pump.far_field(0.0, dim);

  const std::size_t offsets = static_cast<std::size_t>(n);
  std::vector<double> matching(two_d ? offsets * offsets : offsets);
  parallel_for(offsets, options.threads, [&](std::size_t a) {
    if (two_d) {
      for (std::size_t b = 0; b < offsets; ++b) {
        const double p2 = (static_cast<double>(a * a) + static_cast<double>(b * b)) * h * h / 4.0;
        matching[a * offsets + b] = phase(p2);
      }
    } else {
      matching[a] = phase(static_cast<double>(a * a) * h * h / 4.0);
    }
  });

  kernel.entries = assemble_symmetric(m, options.threads, [&](std::size_t i, std::size_t j) {
    const auto [ix, iy] = grid.index_map(i);
    const auto [jx, jy] = grid.index_map(j);
    const auto ox = static_cast<std::size_t>(std::abs(ix - jx));
    if (two_d) {
      const auto oy = static_cast<std::size_t>(std::abs(iy - jy));
      return pump_peak * pump_axis[ix + jx] * pump_axis[iy + jy] * matching[ox * offsets + oy] * measure;
    }
    return pump_peak * pump_axis[ix + jx] * matching[ox] * measure;
  });
  return kernel;
}

Eigen::MatrixXcd dft_matrix(const TransverseGrid& from) {
  const TransverseGrid to = from.fourier_dual();
  const std::size_t m = from.size();
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  Eigen::MatrixXcd f(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t a = 0; a < m; ++a) {
    const Point q = to.point(a);
    for (std::size_t i = 0; i < m; ++i) {
      const Point x = from.point(i);
      const double arg = -(q.x * x.x + q.y * x.y);
      f(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)) = std::polar(norm, arg);
    }
  }
  return f;
}

DualityReport dft_cross_check(const KernelMatrix& near, const KernelMatrix& far) {
  if (near.space != KernelSpace::NearField || far.space != KernelSpace::FarField) {
    throw UsageError("dft_cross_check expects a near-field and a far-field kernel");
  }
  if (!near.grid.is_fourier_dual_of(far.grid)) {
    throw UsageError("dft_cross_check: grids are not Fourier duals (need same N and extent product 2 pi N)");
  }
  const Eigen::MatrixXcd f = dft_matrix(near.grid);
  const Eigen::MatrixXcd transformed = f * near.entries.cast<std::complex<double>>() * f.transpose();

  const double peak = far.entries.cwiseAbs().maxCoeff();
  if (!(peak > 0.0)) throw DegenerateError("dft_cross_check: far-field kernel is identically zero");
  DualityReport report;
  for (Eigen::Index i = 0; i < far.entries.rows(); ++i) {
    for (Eigen::Index j = 0; j < far.entries.cols(); ++j) {
      const double reference = far.entries(i, j);
      report.max_imaginary = std::max(report.max_imaginary, std::abs(transformed(i, j).imag()) / peak);
      if (std::abs(reference) < 1e-3 * peak) continue;
      ++report.compared_entries;
      report.max_deviation = std::max(report.max_deviation, std::abs(transformed(i, j) - reference) / peak);
    }
  }
  return report;
}

double symmetry_defect(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols()) return std::numeric_limits<double>::infinity();
  return (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace simopo
