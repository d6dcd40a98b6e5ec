#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "latmag/lattice_field.hpp"

using namespace latmag;

TEST_CASE("lattice construction and center") {
  const LatticeSpec spec = make_lattice(31, 31);
  CHECK(spec.sites() == 961);
  CHECK(spec.center_x() == 16);
  CHECK(spec.center_y() == 16);
  CHECK(spec.canonical_center());
  CHECK(spec.linear_index(1, 1) == 0);
  CHECK(spec.linear_index(31, 31) == 960);
  CHECK(spec.linear_index(2, 1) == 1);
  CHECK(spec.linear_index(1, 2) == 31);

  CHECK_THROWS_AS(make_lattice(4, 31), std::invalid_argument);
  CHECK_THROWS_AS(make_lattice(31, 3), std::invalid_argument);

  const LatticeSpec even = make_lattice(6, 8);
  CHECK_FALSE(even.canonical_center());
  CHECK(even.center_x() == 3);
  CHECK(even.center_y() == 4);
}

TEST_CASE("field magnitude profile") {
  const LatticeSpec spec = make_lattice(31, 31);

  const FieldProfile homogeneous = make_profile(spec, 0.5, 0.0);
  CHECK(field_magnitude(homogeneous, 3.0) == 0.5);
  CHECK(field_magnitude(homogeneous, 27.5) == 0.5);

  const FieldProfile graded = make_profile(spec, 0.5, 0.015);
  CHECK(field_magnitude(graded, graded.x0) == 0.5);
  // 0.5 - 0.015 * 15
  CHECK(field_magnitude(graded, graded.x0 + 15.0) == doctest::Approx(0.275).epsilon(1e-15));

  // even in (x - x0)
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> offset(0.0, 20.0);
  for (int i = 0; i < 100; ++i) {
    const double d = offset(rng);
    CHECK(field_magnitude(graded, graded.x0 + d) ==
          doctest::Approx(field_magnitude(graded, graded.x0 - d)).epsilon(1e-15));
  }

  CHECK_THROWS_AS(make_profile(spec, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_profile(spec, -0.2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_profile(spec, 0.5, -0.01), std::invalid_argument);
}

TEST_CASE("magnetic length") {
  CHECK(magnetic_length(1.0) == 1.0);
  CHECK(magnetic_length(0.25) == 2.0);
  CHECK(magnetic_length(0.01) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK_THROWS_AS(magnetic_length(0.0), std::invalid_argument);
  CHECK_THROWS_AS(magnetic_length(-1.0), std::invalid_argument);
}

TEST_CASE("profile validation window") {
  const LatticeSpec spec = make_lattice(31, 31);

  // L = 15 on the 31-site axis
  CHECK(max_center_distance(spec, make_profile(spec, 0.5, 0.0)) == 15.0);

  CHECK(validate_profile(spec, make_profile(spec, 0.225, 0.015)).ok);

  const ProfileValidation reversal = validate_profile(spec, make_profile(spec, 0.2, 0.015));
  CHECK_FALSE(reversal.ok);
  CHECK(reversal.failure == ProfileValidation::Failure::reversal);
  CHECK(reversal.reversal_bound == doctest::Approx(0.225).epsilon(1e-15));

  const ProfileValidation too_strong = validate_profile(spec, make_profile(spec, 1.5, 0.0));
  CHECK_FALSE(too_strong.ok);
  CHECK(too_strong.failure == ProfileValidation::Failure::magnetic_length);

  // boundary case accepts, any epsilon below rejects
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> eps(1e-12, 1e-3);
  for (int i = 0; i < 50; ++i) {
    const double e = eps(rng);
    CHECK(validate_profile(spec, make_profile(spec, 0.225 + e, 0.015)).ok);
    CHECK_FALSE(validate_profile(spec, make_profile(spec, 0.225 - e, 0.015)).ok);
  }
}

TEST_CASE("vector potential sampling") {
  const LatticeSpec spec = make_lattice(31, 31);
  const int x0 = spec.center_x();
  const int y0 = spec.center_y();

  SUBCASE("homogeneous symmetric gauge") {
    const FieldProfile profile = make_profile(spec, 0.4, 0.0);
    const VectorPotentialField a = sample_vector_potential(spec, profile);
    CHECK(a.ax(x0, y0) == 0.0);
    CHECK(a.ay(x0, y0) == 0.0);
    CHECK(a.ax(x0, y0 + 1) == doctest::Approx(-0.2).epsilon(1e-15));
    CHECK(a.ay(x0, y0 + 1) == 0.0);
    // exact symmetric-gauge form everywhere
    for (int k = 1; k <= spec.n_y; k += 7) {
      for (int j = 1; j <= spec.n_x; j += 5) {
        CHECK(a.ax(j, k) == doctest::Approx(-0.2 * (k - y0)).epsilon(1e-15));
        CHECK(a.ay(j, k) == doctest::Approx(0.2 * (j - x0)).epsilon(1e-15));
      }
    }
  }

  SUBCASE("graded gauge function") {
    const FieldProfile profile = make_profile(spec, 0.5, 0.015);
    const VectorPotentialField a = sample_vector_potential(spec, profile);
    CHECK(a.ax(x0, y0) == 0.0);
    CHECK(a.ay(x0, y0) == 0.0);
    // f(x0 + 2) = 0.5 - (2/3)(0.015)(2) = 0.48, A_y = f/2 * 2
    CHECK(a.ay(x0 + 2, y0) == doctest::Approx(0.48).epsilon(1e-14));
    CHECK(a.ax(x0 + 2, y0) == 0.0);
  }

  SUBCASE("five-point curl reproduces a homogeneous field") {
    // d/dx via the five-point first-derivative stencil is exact on the
    // linear-in-x potential, so the reconstructed field matches b0 to
    // roundoff. Measured max deviation on this configuration: < 1e-15.
    const double b0 = 0.7;
    const FieldProfile profile = make_profile(spec, b0, 0.0);
    const VectorPotentialField a = sample_vector_potential(spec, profile);
    double worst = 0.0;
    for (int k = 3; k <= spec.n_y - 2; ++k) {
      for (int j = 3; j <= spec.n_x - 2; ++j) {
        const double day_dx = (a.ay(j - 2, k) - 8.0 * a.ay(j - 1, k) +
                               8.0 * a.ay(j + 1, k) - a.ay(j + 2, k)) / 12.0;
        const double dax_dy = (a.ax(j, k - 2) - 8.0 * a.ax(j, k - 1) +
                               8.0 * a.ax(j, k + 1) - a.ax(j, k + 2)) / 12.0;
        worst = std::max(worst, std::abs((day_dx - dax_dy) - b0));
      }
    }
    CHECK(worst < 1e-13);
  }
}
