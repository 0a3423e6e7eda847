#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include "cavity/dielectric.hpp"

using namespace cavity;

TEST_CASE("lorentz permittivity on the imaginary axis") {
  const DielectricModel lossless = LorentzMedium{1.0, 0.0, 0.5, 1.0};
  CHECK(eps_imag(lossless, 0.0) == doctest::Approx(2.0).epsilon(1e-15));

  const DielectricModel damped = LorentzMedium{1.0, 0.1, 0.5, 1.0};
  CHECK(eps_imag(damped, 1.0) == doctest::Approx(1.0 + 1.0 / 2.1).epsilon(1e-15));

  // high-frequency limit approaches the background
  CHECK(eps_imag(damped, 1e9) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(eps_imag(damped, -1.0), std::domain_error);
}

TEST_CASE("drude and constant models") {
  const DielectricModel gold = DrudeMetal{1.0, 0.01};
  CHECK(eps_imag(gold, 1.0) == doctest::Approx(1.0 + 1.0 / 1.01).epsilon(1e-15));
  CHECK_THROWS_AS(eps_imag(gold, 0.0), std::domain_error);  // divergent static limit

  const DielectricModel glass = ConstantDielectric{2.1};
  CHECK(eps_imag(glass, 0.0) == 2.1);
  CHECK(eps_imag(glass, 123.0) == 2.1);

  CHECK_THROWS_AS(eps_imag(DielectricModel{PerfectConductor{}}, 1.0), std::domain_error);
}

TEST_CASE("real-frequency evaluation") {
  using namespace std::complex_literals;
  const DielectricModel medium = LorentzMedium{1.0, 0.1, 0.5, 1.0};

  CHECK(eps_real(medium, 0.0).real() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(eps_real(medium, 0.0).imag() == doctest::Approx(0.0));

  // on resonance the response is purely dissipative: 1 + 1/(-0.1i) = 1 + 10i
  const std::complex<double> on_res = eps_real(medium, 1.0);
  CHECK(on_res.real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(on_res.imag() == doctest::Approx(10.0).epsilon(1e-12));

  CHECK(eps_real(DielectricModel{ConstantDielectric{2.1}}, 5.0 + 1.0i) ==
        std::complex<double>(2.1, 0.0));

  CHECK_THROWS_AS(eps_real(medium, std::complex<double>(1.0, -0.1)), std::domain_error);
}

TEST_CASE("axis consistency: eps(i xi) equals the continuation to i xi") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> pick(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double omega0 = 0.1 + 3.0 * pick(rng);
    const LorentzMedium lor{omega0, 0.5 * pick(rng), 2.0 * pick(rng), 1.0 + pick(rng)};
    const DielectricModel m =
        (i % 3 == 0) ? DielectricModel{DrudeMetal{1.0 + pick(rng), 0.1 + pick(rng)}}
                     : DielectricModel{lor};
    const double xi = 1e-3 + 5.0 * pick(rng);
    const std::complex<double> continued = eps_real(m, std::complex<double>(0.0, xi));
    CHECK(continued.imag() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(continued.real() == doctest::Approx(eps_imag(m, xi)).epsilon(1e-13));
  }
}

TEST_CASE("monotonic decay in xi for the lorentz model") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> pick(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const DielectricModel m =
        LorentzMedium{0.2 + pick(rng), pick(rng), 2.0 * pick(rng), 1.0};
    double prev = eps_imag(m, 0.0);
    for (int i = 1; i <= 50; ++i) {
      const double value = eps_imag(m, 0.2 * i);
      CHECK(value < prev);
      prev = value;
    }
  }
}

TEST_CASE("static identity is exact") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> pick(0.1, 4.0);
  for (int i = 0; i < 50; ++i) {
    const double omega0 = pick(rng), g = pick(rng), gamma = pick(rng);
    const LorentzMedium lor{omega0, gamma, g, 1.0};
    // bit-identical to the closed form evaluated the same way, and within
    // one rounding of the independently ordered expression
    CHECK(lor.static_eps() == eps_imag(DielectricModel{lor}, 0.0));
    const double value = eps_imag(DielectricModel{lor}, 0.0);
    const double independent = 1.0 + 4.0 * g * g / (omega0 * omega0);
    CHECK(std::abs(value - independent) <=
          2.0 * std::numeric_limits<double>::epsilon() * independent);
  }
}

TEST_CASE("passivity on the real axis") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> pick(0.05, 3.0);
  for (int i = 0; i < 50; ++i) {
    const DielectricModel m = LorentzMedium{pick(rng), pick(rng), pick(rng), 1.0};
    const double omega = pick(rng);
    CHECK(eps_real(m, omega).imag() >= 0.0);
  }
  const DielectricModel metal = DrudeMetal{2.0, 0.3};
  for (double omega = 0.1; omega < 5.0; omega += 0.3)
    CHECK(eps_real(metal, omega).imag() >= 0.0);
}

TEST_CASE("field validation") {
  CHECK_THROWS_AS(validate(DielectricModel{LorentzMedium{-1.0, 0.0, 0.0, 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(DielectricModel{LorentzMedium{1.0, -0.1, 0.0, 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(DielectricModel{LorentzMedium{1.0, 0.0, 0.0, 0.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(DielectricModel{DrudeMetal{1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(DielectricModel{ConstantDielectric{0.9}}), std::invalid_argument);
  CHECK_NOTHROW(validate(DielectricModel{PerfectConductor{}}));
}
