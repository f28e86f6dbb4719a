#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "simopo/errors.hpp"
#include "simopo/physics.hpp"
#include "simopo/special_functions.hpp"

using namespace simopo;

TEST_SUITE("physics") {
  TEST_CASE("coherence length and mode counts for the reference crystal") {
    const PhysicalParams p;
    const double lcoh = std::sqrt(1064e-9 * 0.01 / (oracle::pi * 2.0));
    CHECK(coherence_length(p) == doctest::Approx(lcoh).epsilon(1e-14));
    CHECK(coherence_length(p) == doctest::Approx(41.15e-6).epsilon(1e-3));
    CHECK(mode_count_b(p, Dimensionality::One) == doctest::Approx(300e-6 / lcoh).epsilon(1e-14));
    CHECK(mode_count_b(p, Dimensionality::Two) == doctest::Approx(std::pow(300e-6 / lcoh, 2)).epsilon(1e-14));
  }

  TEST_CASE("Si argument at d = l_coh is one") {
    const PhysicalParams p;
    const double l = coherence_length(p);
    CHECK(p.wavenumber() * l * l / (2 * p.crystal_length) == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("diffraction kernel matches its z' integral representation") {
    const PhysicalParams p;
    const double l = coherence_length(p);
    for (double d : {0.0, 0.2 * l, l, 1.7 * l, 4 * l, 12 * l}) {
      CAPTURE(d / l);
      const double ref = oracle::delta(p.wavenumber(), p.crystal_length, d);
      CHECK(delta_kernel(p, d) == doctest::Approx(ref).epsilon(1e-11));
    }
  }

  TEST_CASE("diffraction kernel integrates to one over the plane") {
    const PhysicalParams p;
    const double l = coherence_length(p);
    // 2 pi int Delta(r) r dr = pi l^2 int_0^inf Delta du with u = r^2 / l^2. Beyond U the
    // integral of pi/2 - Si is cos U - U (pi/2 - Si U) (by parts, Abel-summed).
    const double U = 400.0;
    const double body = oracle::integrate(
        [&](double u) { return delta_kernel(p, l * std::sqrt(u)); }, 0.0, U, 1e-13);
    const double tail_factor = std::cos(U) - U * (kPi / 2 - sine_integral(U));
    const double total = kPi * l * l * (body + p.wavenumber() / (2 * kPi * p.crystal_length) * tail_factor);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("diffraction kernel tail is bounded by its oscillation envelope") {
    const PhysicalParams p;
    const double l = coherence_length(p);
    const double peak = delta_kernel(p, 0.0);
    for (double d = 2 * l; d < 40 * l; d += 0.37 * l) {
      const double u = d * d / (l * l);
      // |pi/2 - Si(u)| <= 1/u for u > 0 well away from the origin.
      CHECK(std::abs(delta_kernel(p, d)) <= peak * (2.0 / kPi) / u * 1.0000001);
    }
  }

  TEST_CASE("pump profile") {
    const PumpProfile g = PumpProfile::gaussian(2.0, 0.5);
    CHECK(g.near_field(4.0) == doctest::Approx(0.5 * std::exp(-1.0)));
    CHECK(g.far_field(0.0, Dimensionality::Two) == doctest::Approx(0.5 * 2.0));
    CHECK(g.far_field(0.0, Dimensionality::One) == doctest::Approx(0.5 * 2.0 / std::sqrt(2.0)));
    const double q2 = 0.3;
    CHECK(g.far_field(q2, Dimensionality::Two) == doctest::Approx(0.5 * 2.0 * std::exp(-q2 * 4.0 / 4.0)));
    CHECK(PumpProfile::flat(0.7).near_field(1e6) == 0.7);
    CHECK_THROWS_AS(PumpProfile::flat().far_field(0.0, Dimensionality::Two), UsageError);
    CHECK_THROWS_AS(PumpProfile::gaussian(-1.0), DomainError);
  }

  TEST_CASE("1D pump transform matches numerical quadrature") {
    const PumpProfile g = PumpProfile::gaussian(1.3, 1.0);
    for (double q : {0.0, 0.7, 2.1}) {
      const double ref = oracle::integrate([&](double x) { return std::exp(-x * x / 1.69) * std::cos(q * x); }, -15, 15,
                                           1e-14) /
                         std::sqrt(2 * oracle::pi);
      CHECK(g.far_field(q * q, Dimensionality::One) == doctest::Approx(ref).epsilon(1e-12));
    }
  }

  TEST_CASE("parameter validation") {
    PhysicalParams p;
    p.crystal_length = -1;
    CHECK_THROWS_AS(p.validate(), DomainError);
    PhysicalParams q;
    q.detuning = 0.1;
    CHECK_NOTHROW(q.validate());
    CHECK_THROWS_AS(q.validate_for_noise(), DomainError);
  }

  TEST_CASE("self-imaging ring with f = (100, 200, 50) mm") {
    const SelfImagingCavity c = self_imaging_distances(0.1, 0.2, 0.05);
    CHECK(c.c12 == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(c.c23 == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(c.c31 == doctest::Approx(0.025).epsilon(1e-14));
    CHECK(c.d12 == doctest::Approx(0.1 + 0.4 + 0.2));
    CHECK(c.identity_deviation < 1e-10);
    CHECK((c.round_trip - RayMatrix::Identity()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK_THROWS_AS(self_imaging_distances(0.1, -0.2, 0.05), DomainError);
  }

  TEST_CASE("self-imaging holds for arbitrary focal triples") {
    for (double f1 : {0.03, 0.1, 0.4}) {
      for (double f2 : {0.05, 0.2}) {
        for (double f3 : {0.02, 0.15, 0.9}) {
          const SelfImagingCavity c = self_imaging_distances(f1, f2, f3);
          CHECK(c.c12 * c.c23 * c.c31 == doctest::Approx(f1 * f2 * f3).epsilon(1e-12));
          CHECK(c.identity_deviation < 1e-10);
        }
      }
    }
  }

  TEST_CASE("far-field coherence length") {
    const PhysicalParams p;
    CHECK(far_field_coherence_length(p, 0.1) == doctest::Approx(1064e-9 * 0.1 / (2 * oracle::pi * 300e-6)));
  }
}
