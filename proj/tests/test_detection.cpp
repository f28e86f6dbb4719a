#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "simopo/detection.hpp"
#include "simopo/errors.hpp"
#include "simopo/kernels.hpp"
#include "simopo/modes.hpp"
#include "simopo/special_functions.hpp"

using namespace simopo;

namespace {

PhysicalParams near_params() {
  PhysicalParams p;
  p.pump_waist = 2.0 * coherence_length(p);
  return p;
}

struct NearFixture {
  PhysicalParams params = near_params();
  TransverseGrid grid{Dimensionality::One, 8 * params.pump_waist, 128, Space::Position};
  KernelMatrix kernel = build_near_field_kernel(grid, params, PumpProfile::gaussian(params.pump_waist));
  ModeDecomposition decomp = eigendecompose(kernel);
};

const NearFixture& near() {
  static const NearFixture f;
  return f;
}

Detector weights_detector(const TransverseGrid& grid, Eigen::VectorXd w) { return {grid, std::move(w), "test"}; }

}  // namespace

TEST_SUITE("detection") {
  TEST_CASE("covariances agree with a linear solve of the input/output relation") {
    const auto& f = near();
    for (double r : {0.3, 0.9}) {
      CAPTURE(r);
      const QuadratureCovariance paper = output_covariance(f.decomp, r);
      const oracle::Covariances ref = oracle::linear_solve_covariances(f.kernel.entries, f.decomp.lambda_max, r, false);
      const double scale = ref.plus.cwiseAbs().maxCoeff();
      CHECK((paper.cov_plus - ref.plus).cwiseAbs().maxCoeff() < 1e-9 * scale);
      CHECK((paper.cov_minus - ref.minus).cwiseAbs().maxCoeff() < 1e-9 * scale);
      const QuadratureCovariance tf = output_covariance(f.decomp, r, FormulaMode::TransferFunction);
      const oracle::Covariances sq = oracle::linear_solve_covariances(f.kernel.entries, f.decomp.lambda_max, r, true);
      const double sq_scale = sq.plus.cwiseAbs().maxCoeff();
      CHECK((tf.cov_plus - sq.plus).cwiseAbs().maxCoeff() < 1e-9 * sq_scale);
      CHECK((tf.cov_minus - sq.minus).cwiseAbs().maxCoeff() < 1e-9 * sq_scale);
    }
  }

  TEST_CASE("no pump gives shot noise for every detector") {
    const auto& f = near();
    const QuadratureCovariance cov = output_covariance(f.decomp, 0.0);
    const Detector d = detectors::disk(f.grid, 3 * f.params.pump_waist);
    for (double phi : {0.0, 0.4, 1.3}) CHECK(homodyne_variance(cov, d, phi) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("a detector matched to a mode sees that mode's variance") {
    const auto& f = near();
    const double r = 0.7;
    const QuadratureCovariance cov = output_covariance(f.decomp, r);
    const ModeVariances mv = mode_variances(f.decomp, r);
    for (Eigen::Index k : {0, 1, 4}) {
      CAPTURE(k);
      const Detector d = weights_detector(f.grid, 2.5 * f.decomp.eigenvectors.col(k));
      CHECK(homodyne_variance(cov, d, 0.0) == doctest::Approx(mv.variance_plus(k)).epsilon(1e-10));
      CHECK(homodyne_variance(cov, d, kPi / 2) == doctest::Approx(mv.variance_minus(k)).epsilon(1e-10));
    }
  }

  TEST_CASE("homodyne variance stays inside the mode variance bounds") {
    const auto& f = near();
    const double r = 0.8;
    const QuadratureCovariance cov = output_covariance(f.decomp, r);
    const ModeVariances mv = mode_variances(f.decomp, r);
    const double lo = mv.variance_minus.minCoeff();
    const double hi = mv.variance_plus.maxCoeff();
    for (double width : {0.1, 0.5, 1.0, 3.0}) {
      const Detector d = detectors::pixel(f.grid, {0.3 * f.params.pump_waist, 0.0}, width * f.params.pump_waist);
      const double vm = homodyne_variance(cov, d, kPi / 2);
      const double vp = homodyne_variance(cov, d, 0.0);
      CHECK(vm >= lo * (1 - 1e-12));
      CHECK(vp <= hi * (1 + 1e-12));
      // Cauchy-Schwarz on C+ = C-^-1 bounds the product from below by one.
      CHECK(vm * vp >= 1.0 - 1e-10);
      for (double phi : {0.2, 0.9}) {
        const double v = homodyne_variance(cov, d, phi);
        CHECK(v == doctest::Approx(std::cos(phi) * std::cos(phi) * vp + std::sin(phi) * std::sin(phi) * vm));
      }
    }
  }

  TEST_CASE("thin crystal: position scan is symmetric about the axis") {
    PhysicalParams p;
    const TransverseGrid g(Dimensionality::One, 8 * p.pump_waist, 64, Space::Position);
    KernelOptions opt;
    opt.thin_crystal = true;
    const KernelMatrix k = build_near_field_kernel(g, p, PumpProfile::gaussian(p.pump_waist), opt);
    const QuadratureCovariance cov = output_covariance(eigendecompose(k), 0.9);
    for (double s : {0.3, 1.0, 2.0}) {
      const Point c = nearest_pixel_center(g, {s * p.pump_waist, 0.0});
      const Point m{-c.x, 0.0};
      const Detector a = detectors::pixel(g, c, g.spacing());
      const Detector b = detectors::pixel(g, m, g.spacing());
      CHECK(homodyne_variance(cov, a, kPi / 2) == doctest::Approx(homodyne_variance(cov, b, kPi / 2)).epsilon(1e-12));
    }
  }

  TEST_CASE("EPR spectra of disjoint detectors") {
    const auto& f = near();
    const QuadratureCovariance cov = output_covariance(f.decomp, 0.9);
    const auto [left, right] = detectors::split_disk_pair(f.grid, 2 * f.params.pump_waist);
    const EprSpectra s = epr_spectra(cov, left, right, 0.3);
    const Eigen::VectorXd diff = left.weights - right.weights;
    const Eigen::VectorXd sum = left.weights + right.weights;
    const double norm = left.shot_noise() + right.shot_noise();
    const double c2 = std::cos(0.3) * std::cos(0.3), s2 = std::sin(0.3) * std::sin(0.3);
    CHECK(s.v_minus == doctest::Approx((c2 * diff.dot(cov.cov_plus * diff) + s2 * diff.dot(cov.cov_minus * diff)) / norm));
    CHECK(s.v_plus == doctest::Approx((c2 * sum.dot(cov.cov_plus * sum) + s2 * sum.dot(cov.cov_minus * sum)) / norm));
    const double duan = duan_separability(cov, left, right, 0.3);
    const EprSpectra shifted = epr_spectra(cov, left, right, 0.3 + kPi / 2);
    CHECK(duan == doctest::Approx(0.5 * (s.v_minus + shifted.v_plus)));
    CHECK_THROWS_AS(epr_spectra(cov, left, left, 0.0), UsageError);
  }

  TEST_CASE("Duan minimum scans the documented phase set") {
    const auto& f = near();
    const QuadratureCovariance cov = output_covariance(f.decomp, 0.9);
    const auto [left, right] = detectors::split_disk_pair(f.grid, 2 * f.params.pump_waist);
    const DuanMinimum m = duan_minimum(cov, left, right);
    double best = 1e300;
    for (int k = 0; k < 64; ++k) best = std::min(best, duan_separability(cov, left, right, k * kPi / 64));
    CHECK(m.value == best);
    const double step = m.phase / (kPi / 64);
    CHECK(std::abs(step - std::round(step)) < 1e-12);
  }

  TEST_CASE("grid mismatch is a usage error") {
    const auto& f = near();
    const QuadratureCovariance cov = output_covariance(f.decomp, 0.5);
    const TransverseGrid other(Dimensionality::One, f.grid.extent(), 64, Space::Position);
    CHECK_THROWS_AS(homodyne_variance(cov, detectors::disk(other, f.params.pump_waist), 0.0), UsageError);
  }

  TEST_CASE("pixel detector membership is half-open") {
    const TransverseGrid g(Dimensionality::One, 8.0, 8, Space::Position);
    // centers at -3.5 .. 3.5
    CHECK(detectors::pixel(g, {0.0, 0.0}, 1.0).pixel_count() == 1);  // [-0.5, 0.5) holds -0.5 only
    CHECK(detectors::pixel(g, {0.5, 0.0}, 1.0).pixel_count() == 1);
    CHECK(detectors::pixel(g, {0.5, 0.0}, 3.0).pixel_count() == 3);
    CHECK(detectors::pixel(g, {0.0, 0.0}, 2.0).pixel_count() == 2);
    CHECK_THROWS_AS(detectors::pixel(g, {0.0, 0.0}, 0.5), UsageError);
  }

  TEST_CASE("disk detectors and local oscillators") {
    const TransverseGrid g(Dimensionality::Two, 1.0, 200, Space::Position);
    const double r1 = 0.1, r2 = 0.3;
    const double n1 = static_cast<double>(detectors::disk(g, r1).pixel_count());
    const double n2 = static_cast<double>(detectors::disk(g, r2).pixel_count());
    CHECK(n2 / n1 == doctest::Approx(9.0).epsilon(0.03));
    CHECK(pixel_equivalent_radius(detectors::disk(g, r2)) == doctest::Approx(r2).epsilon(0.01));
    const auto [a, b] = detectors::split_disk_pair(g, r2);
    CHECK(a.pixel_count() == b.pixel_count());
    CHECK(a.weights.dot(b.weights) == 0.0);
    const Detector odd = detectors::disk(g, r2, LocalOscillator::odd_flat());
    CHECK(odd.weights.sum() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(LocalOscillator::gaussian(2.0).amplitude({2.0, 0.0}) == doctest::Approx(std::exp(-1.0)));
    CHECK(LocalOscillator::odd_flat().amplitude({0.0, 1.0}) == 0.0);
    CHECK_THROWS_AS(LocalOscillator::gaussian(0.0), DomainError);
  }

  TEST_CASE("symmetric pixel pair is a mirror image") {
    const TransverseGrid g(Dimensionality::One, 10.0, 20, Space::Position);
    const auto [p, m] = detectors::symmetric_pixel_pair(g, {1.25, 0.0}, 1.0);
    CHECK(p.pixel_count() == m.pixel_count());
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(p.weights(static_cast<Eigen::Index>(i)) == m.weights(static_cast<Eigen::Index>(g.mirror(i))));
  }

  TEST_CASE("half-disk halves of a thin-crystal pump see equal noise") {
    PhysicalParams p;
    const TransverseGrid g(Dimensionality::Two, 8 * p.pump_waist, 24, Space::Position);
    KernelOptions opt;
    opt.thin_crystal = true;
    const KernelMatrix k = build_near_field_kernel(g, p, PumpProfile::gaussian(p.pump_waist), opt);
    const QuadratureCovariance cov = output_covariance(eigendecompose(k), 0.9);
    const auto [a, b] = detectors::split_disk_pair(g, 2 * p.pump_waist);
    CHECK(homodyne_variance(cov, a, kPi / 2) == doctest::Approx(homodyne_variance(cov, b, kPi / 2)).epsilon(1e-12));
    // Thin crystal: the full disk is the pixel-weighted mean of its halves.
    const Detector full = detectors::disk(g, 2 * p.pump_waist);
    const double expected = (homodyne_variance(cov, a, kPi / 2) * a.shot_noise() +
                             homodyne_variance(cov, b, kPi / 2) * b.shot_noise()) /
                            (a.shot_noise() + b.shot_noise());
    const double axis = full.shot_noise() - a.shot_noise() - b.shot_noise();
    CHECK(axis == 0.0);
    CHECK(homodyne_variance(cov, full, kPi / 2) == doctest::Approx(expected).epsilon(1e-12));
  }

  TEST_CASE("radial shells and nearest centers") {
    const TransverseGrid g(Dimensionality::One, 4.0, 4, Space::Position);
    const std::vector<double> shells = radial_shells(g);
    REQUIRE(shells.size() == 2);
    CHECK(shells[0] == doctest::Approx(0.5));
    CHECK(shells[1] == doctest::Approx(1.5));
    CHECK(nearest_pixel_center(g, {0.0, 0.0}).x == doctest::Approx(0.5));
    CHECK(nearest_pixel_center(g, {-1.2, 0.0}).x == doctest::Approx(-1.5));
    CHECK(nearest_pixel_center(g, {9.0, 0.0}).x == doctest::Approx(1.5));
  }
}
