#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "simopo/errors.hpp"
#include "simopo/grid.hpp"
#include "simopo/kernels.hpp"
#include "simopo/special_functions.hpp"

using namespace simopo;

namespace {

PhysicalParams params_with_waist(double waist_in_lcoh) {
  PhysicalParams p;
  p.pump_waist = waist_in_lcoh * coherence_length(p);
  return p;
}

std::vector<double> axis(const TransverseGrid& g) {
  std::vector<double> out;
  for (std::size_t i = 0; i < g.size(); ++i) out.push_back(g.point(i).x);
  return out;
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("pixel centers, index map and mirror") {
    const TransverseGrid g(Dimensionality::Two, 4.0, 4, Space::Position);
    CHECK(g.size() == 16);
    CHECK(g.spacing() == 1.0);
    CHECK(g.pixel_measure() == 1.0);
    CHECK(g.axis_coordinate(0) == -1.5);
    CHECK(g.axis_coordinate(3) == 1.5);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto [ix, iy] = g.index_map(i);
      CHECK(g.flat_index(ix, iy) == i);
      const Point p = g.point(i);
      const Point m = g.point(g.mirror(i));
      CHECK(m.x == -p.x);
      CHECK(m.y == -p.y);
      CHECK(g.mirror(g.mirror(i)) == i);
    }
    CHECK(g.flat_index(1, 2) == 6);
    CHECK_THROWS_AS(g.index_map(16), UsageError);
  }

  TEST_CASE("Fourier dual") {
    const TransverseGrid g(Dimensionality::One, 3.0, 12, Space::Position);
    const TransverseGrid d = g.fourier_dual();
    CHECK(d.space() == Space::Wavevector);
    CHECK(d.spacing() * g.spacing() == doctest::Approx(2 * oracle::pi / 12));
    CHECK(g.is_fourier_dual_of(d));
    CHECK(d.is_fourier_dual_of(g));
    CHECK(d.fourier_dual() == g);
    CHECK_FALSE(g.is_fourier_dual_of(TransverseGrid(Dimensionality::One, 3.0, 12, Space::Wavevector)));
  }

  TEST_CASE("invalid grids") {
    CHECK_THROWS_AS(TransverseGrid(Dimensionality::One, -1.0, 8, Space::Position), DomainError);
    CHECK_THROWS_AS(TransverseGrid(Dimensionality::One, 1.0, 1, Space::Position), DomainError);
  }
}

TEST_SUITE("kernels") {
  TEST_CASE("near-field entries follow the pump-midpoint times diffraction product") {
    const PhysicalParams p = params_with_waist(4.0);
    const TransverseGrid g(Dimensionality::One, 8 * p.pump_waist, 128, Space::Position);
    const KernelMatrix k = build_near_field_kernel(g, p, PumpProfile::gaussian(p.pump_waist, 0.7));
    for (std::size_t i : {0u, 17u, 63u, 64u, 127u}) {
      for (std::size_t j : {0u, 5u, 64u, 100u}) {
        const double xi = g.point(i).x, xj = g.point(j).x;
        const double mid = 0.5 * (xi + xj);
        const double ref = 0.7 * std::exp(-mid * mid / (p.pump_waist * p.pump_waist)) *
                           oracle::delta(p.wavenumber(), p.crystal_length, std::abs(xi - xj)) * g.spacing();
        CHECK(k.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
              doctest::Approx(ref).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("kernels are bit-for-bit symmetric and commute with reversal") {
    const PhysicalParams p = params_with_waist(1.0);
    const TransverseGrid g(Dimensionality::Two, 8 * p.pump_waist, 32, Space::Position);
    const KernelMatrix k = build_near_field_kernel(g, p, PumpProfile::gaussian(p.pump_waist));
    CHECK(symmetry_defect(k.entries) == 0.0);
    const TransverseGrid wide(Dimensionality::Two, 16.0 / p.pump_waist, 24, Space::Wavevector);
    const KernelMatrix kf = build_far_field_kernel(wide, p, PumpProfile::gaussian(p.pump_waist));
    CHECK(symmetry_defect(kf.entries) == 0.0);
    for (const KernelMatrix* m : {&k, &kf}) {
      double worst = 0.0;
      for (std::size_t i = 0; i < m->grid.size(); ++i) {
        for (std::size_t j = 0; j < m->grid.size(); ++j) {
          worst = std::max(worst, std::abs(m->entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                                           m->entries(static_cast<Eigen::Index>(m->grid.mirror(i)),
                                                      static_cast<Eigen::Index>(m->grid.mirror(j)))));
        }
      }
      CHECK(worst <= 1e-14 * m->entries.cwiseAbs().maxCoeff());
    }
  }

  TEST_CASE("thin crystal is diagonal with the local pump") {
    PhysicalParams p;
    const TransverseGrid g(Dimensionality::One, 8 * p.pump_waist, 64, Space::Position);
    const KernelMatrix k = build_near_field_kernel(g, p, PumpProfile::gaussian(p.pump_waist, 0.5), {true, 1});
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double expected = i == j ? 0.5 * std::exp(-g.point(i).norm2() / (p.pump_waist * p.pump_waist)) : 0.0;
        CHECK(k.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
              doctest::Approx(expected).epsilon(1e-14));
      }
    }
    CHECK(plane_wave_gain(p, Dimensionality::One, true) == 1.0);
  }

  TEST_CASE("resolution rules") {
    PhysicalParams p;
    const double l = coherence_length(p);
    const auto pump = PumpProfile::gaussian(p.pump_waist);
    CHECK_THROWS_AS(build_near_field_kernel(TransverseGrid(Dimensionality::One, 8 * p.pump_waist, 64, Space::Position),
                                            p, pump),
                    ResolutionError);
    CHECK_THROWS_AS(build_near_field_kernel(TransverseGrid(Dimensionality::One, 4 * p.pump_waist, 256, Space::Position),
                                            p, pump),
                    ResolutionError);
    CHECK_NOTHROW(build_near_field_kernel(TransverseGrid(Dimensionality::One, 256 * 0.25 * l, 256, Space::Position), p,
                                          pump));
    CHECK_THROWS_AS(build_far_field_kernel(TransverseGrid(Dimensionality::One, 8 / p.pump_waist, 64, Space::Wavevector),
                                           p, pump),
                    ResolutionError);
    CHECK_THROWS_AS(build_near_field_kernel(TransverseGrid(Dimensionality::One, 1e-3, 64, Space::Wavevector), p, pump),
                    UsageError);
    PhysicalParams detuned;
    detuned.detuning = 0.2;
    CHECK_THROWS_AS(build_near_field_kernel(TransverseGrid(Dimensionality::One, 8 * p.pump_waist, 256, Space::Position),
                                            detuned, pump),
                    DomainError);
  }

  TEST_CASE("1D phase-matching factor is the transform of the diffraction kernel") {
    const PhysicalParams p;
    const double l = coherence_length(p);
    for (double pl : {0.0, 0.4, 1.0, 2.5}) {
      const double pv = pl / l;
      // (1/sqrt(2 pi)) int Delta(x) cos(p x) dx with u = x / l, cut at u = 200 where the
      // remaining tail is below 1e-7 of the total.
      double sum = 0.0;
      for (int panel = 0; panel < 2000; ++panel) {
        sum += oracle::integrate(
            [&](double u) {
              return delta_kernel(p, u * l) * std::cos(pv * u * l) * l;
            },
            0.1 * panel, 0.1 * (panel + 1), 1e-13);
      }
      const double ref = 2.0 * sum / std::sqrt(2 * oracle::pi);
      CHECK(phase_matching_factor(p, pv * pv, Dimensionality::One) == doctest::Approx(ref).epsilon(1e-6));
    }
  }

  TEST_CASE("plane-wave gain is the flat-pump top eigenvalue scale") {
    const PhysicalParams p;
    CHECK(plane_wave_gain(p, Dimensionality::Two, false) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(plane_wave_gain(p, Dimensionality::One, false) ==
          doctest::Approx(std::sqrt(2.0 / oracle::pi) / coherence_length(p)).epsilon(1e-14));
  }

  TEST_CASE("flat-pump far field couples q only to -q") {
    const PhysicalParams p;
    const double l = coherence_length(p);
    const TransverseGrid g(Dimensionality::One, 16 / l, 64, Space::Wavevector);
    const KernelMatrix k = build_far_field_kernel(g, p, PumpProfile::flat(0.4));
    for (std::size_t a = 0; a < g.size(); ++a) {
      for (std::size_t b = 0; b < g.size(); ++b) {
        const double v = k.entries(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        if (b != g.mirror(a)) CHECK(v == 0.0);
      }
      const double q2 = g.point(a).norm2();
      CHECK(k.entries(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(g.mirror(a))) ==
            doctest::Approx(0.4 * std::sqrt(2 * oracle::pi) * phase_matching_factor(p, q2, Dimensionality::One)));
    }
  }

  TEST_CASE("DFT matrix is unitary and squares to the reversal") {
    const TransverseGrid g(Dimensionality::One, 5.0, 16, Space::Position);
    const Eigen::MatrixXcd f = dft_matrix(g);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(16, 16);
    CHECK((f * f.adjoint() - id).cwiseAbs().maxCoeff() < 1e-13);
    const Eigen::MatrixXcd f2 = f * f;
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double expected = g.mirror(i) == j ? 1.0 : 0.0;
        CHECK(std::abs(f2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - expected) < 1e-12);
      }
    }
  }

  TEST_CASE("double DFT against the brute-force sum") {
    const PhysicalParams p = params_with_waist(2.0);
    const TransverseGrid g(Dimensionality::One, 8 * p.pump_waist, 64, Space::Position);
    const KernelMatrix k = build_near_field_kernel(g, p, PumpProfile::gaussian(p.pump_waist));
    const Eigen::MatrixXcd f = dft_matrix(g);
    const Eigen::MatrixXcd fast = f * k.entries.cast<std::complex<double>>() * f.transpose();
    const Eigen::MatrixXcd slow = oracle::brute_force_dft(k.entries, axis(g), axis(g.fourier_dual()));
    CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-12 * slow.cwiseAbs().maxCoeff());
  }

  TEST_CASE("near and far field agree through the DFT") {
    const PhysicalParams p = params_with_waist(2.0);
    const TransverseGrid g(Dimensionality::One, 8 * p.pump_waist, 128, Space::Position);
    const auto pump = PumpProfile::gaussian(p.pump_waist);
    const KernelMatrix near = build_near_field_kernel(g, p, pump);
    const KernelMatrix far = build_far_field_kernel(g.fourier_dual(), p, pump);
    const DualityReport r = dft_cross_check(near, far);
    CHECK(r.max_deviation < 0.01);
    CHECK(r.max_imaginary < 1e-12);
    CHECK(r.compared_entries > 100);
    CHECK_THROWS_AS(dft_cross_check(far, near), UsageError);
  }

  TEST_CASE("assembly does not depend on the thread count") {
    const PhysicalParams p = params_with_waist(1.0);
    const TransverseGrid g(Dimensionality::Two, 8 * p.pump_waist, 32, Space::Position);
    const auto pump = PumpProfile::gaussian(p.pump_waist);
    const KernelMatrix a = build_near_field_kernel(g, p, pump, {false, 1});
    const KernelMatrix b = build_near_field_kernel(g, p, pump, {false, 4});
    CHECK((a.entries - b.entries).cwiseAbs().maxCoeff() == 0.0);
  }
}
