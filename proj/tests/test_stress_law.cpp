#include "obstacle/errors.hpp"
#include "obstacle/oracle.hpp"
#include "obstacle/stress_law.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace obstacle;

namespace {

// Dense table of sigma = l + l^3 on [-4, 4].
StressLaw cubic_table(std::size_t rows = 4001) {
  std::vector<double> lam(rows), sig(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    lam[i] = -4.0 + 8.0 * double(i) / double(rows - 1);
    sig[i] = lam[i] + lam[i] * lam[i] * lam[i];
  }
  return StressLaw::table(lam, sig);
}

}  // namespace

TEST_CASE("builtin laws evaluate in closed form") {
  const auto lin = StressLaw::linear();
  const auto cub = StressLaw::power(3);
  CHECK(sigma_eval(lin, 2.0) == 2.0);
  CHECK(sigma_eval(cub, 2.0) == 10.0);
  CHECK(sigma_eval(cub, 0.0) == 0.0);
  CHECK(sigma_potential(lin, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sigma_potential(cub, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(sigma_prime(cub, 1.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(sigma_prime(lin, -7.0) == 1.0);
  CHECK(cub.sigma_second(1.0) == doctest::Approx(6.0));
  CHECK(cub.sigma_third(-3.0) == doctest::Approx(6.0));
}

TEST_CASE("non-finite strain is rejected") {
  const auto cub = StressLaw::power(3);
  CHECK_THROWS_AS(cub.sigma(std::numeric_limits<double>::quiet_NaN()), DomainError);
  CHECK_THROWS_AS(cub.sigma(std::numeric_limits<double>::infinity()), DomainError);
  CHECK_THROWS_AS(cub.potential(std::numeric_limits<double>::quiet_NaN()), DomainError);
  CHECK_THROWS_AS(StressLaw::power(2), DomainError);
  CHECK_THROWS_AS(StressLaw::power(1), DomainError);
}

TEST_CASE("potential agrees with brute-force quadrature") {
  const auto cub = StressLaw::power(5);
  for (double lam : {-2.5, -0.3, 0.7, 1.9}) {
    const auto f = [](double s) { return s + std::pow(s, 5); };
    const double ref = lam > 0 ? oracle::brute_quadrature(f, 0.0, lam, 200000) : -oracle::brute_quadrature(f, lam, 0.0, 200000);
    CHECK(cub.potential(lam) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("tabulated law reproduces the cubic potential") {
  const auto tab = cubic_table();
  CHECK(tab.kind() == LawKind::Table);
  CHECK_FALSE(tab.closed_form_potential());
  // Oracle of the interpolant itself, then of the exact law.
  const double interp = oracle::brute_quadrature([&](double s) { return tab.sigma(s); }, 0.0, 1.0);
  CHECK(std::abs(tab.potential(1.0) - interp) <= 1e-10);
  CHECK(std::abs(tab.potential(1.0) - 0.75) <= 1e-9);
  CHECK(std::abs(tab.sigma_prime(1.0) - 4.0) <= 1e-4);
  // Linear extension outside the table.
  CHECK(tab.sigma(6.0) - tab.sigma(5.0) == doctest::Approx(tab.sigma(5.0) - tab.sigma(4.0)).epsilon(1e-12));
  CHECK(tab.sigma(5.0) - tab.sigma(4.0) == doctest::Approx(49.0).epsilon(1e-3));
}

TEST_CASE("table parsing and validation") {
  const auto law = StressLaw::table_from_text("# lambda sigma\n-2 -2\n-1 -1\n\n0 0\n1 1\n2 2\n");
  CHECK(law.sigma(0.5) == doctest::Approx(0.5));
  CHECK(law.potential(2.0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK_THROWS_AS(StressLaw::table({-1, 0, 1, 2}, {-0.9, 0.1, 1.1, 2.1}), DomainError);
  CHECK_THROWS_AS(StressLaw::table({-1, 0, 0, 2}, {-1, 0, 0, 2}), DomainError);
  CHECK_THROWS_AS(StressLaw::table({-1, 0, 1}, {-1, 0, 1}), DomainError);
  CHECK_THROWS_AS(StressLaw::table_from_text("0 0\n1 x\n"), DomainError);
  CHECK_THROWS_AS(StressLaw::table_from_file("/nonexistent/table.txt"), DomainError);
}

TEST_CASE("structural properties of the power laws") {
  for (int k : {3, 5, 7}) {
    const auto law = StressLaw::power(k);
    const double c = law.ellipticity();
    for (double lam = -6.0; lam <= 6.0; lam += 0.37) {
      CHECK(law.sigma(-lam) == -law.sigma(lam));
      CHECK(law.potential(-lam) == doctest::Approx(law.potential(lam)).epsilon(1e-13));
      CHECK(law.potential(lam) >= 0.5 * c * lam * lam * (1.0 - 1e-14));
    }
    // |sigma| / Sigma decays for large strain.
    double prev = std::numeric_limits<double>::infinity();
    for (double lam : {10.0, 100.0, 1000.0}) {
      const double r = std::abs(law.sigma(lam)) / law.potential(lam);
      CHECK(r < prev);
      prev = r;
    }
  }
}

TEST_CASE("hypothesis audit of the linear law") {
  const auto rep = verify_hypotheses(StressLaw::linear(), -10.0, 10.0, 1001, 1.0);
  CHECK(rep.h1.status == HypothesisStatus::Holds);
  CHECK(rep.c_est == 1.0);
  // sigma'' vanishes identically, so the single-zero clause fails.
  CHECK(rep.h2.status == HypothesisStatus::Violated);
  REQUIRE(rep.h2.witness.has_value());
  CHECK(*rep.h2.witness >= -10.0);
  CHECK(*rep.h2.witness <= 10.0);
  CHECK(rep.h4.status == HypothesisStatus::Holds);
  CHECK(rep.kappa_est == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("hypothesis audit of the cubic law") {
  const auto rep = verify_hypotheses(StressLaw::power(3), -10.0, 10.0, 1001, 1.0);
  CHECK(rep.h1.status == HypothesisStatus::Holds);
  CHECK(rep.c_est == doctest::Approx(1.0));
  CHECK(rep.h2.status == HypothesisStatus::Holds);
  REQUIRE(rep.lambda0.has_value());
  CHECK(std::abs(*rep.lambda0) <= 1e-12);
  CHECK(rep.h3.status == HypothesisStatus::Holds);
  CHECK(rep.h4.status == HypothesisStatus::Holds);
  // lambda sigma / Sigma = 4 - 4 / (2 + lambda^2), largest at the window edge.
  CHECK(std::abs(rep.kappa_est - (4.0 - 4.0 / 102.0)) <= 1e-12);
  CHECK(rep.to_text().find("H2") != std::string::npos);
}

TEST_CASE("audit near the origin and argument checks") {
  const auto rep = verify_hypotheses(StressLaw::power(3), -1e-3, 1e-3, 11, 1.0);
  CHECK(rep.c_est == doctest::Approx(1.0).epsilon(1e-5));
  const auto lin = StressLaw::linear();
  CHECK_THROWS_AS(verify_hypotheses(lin, -1, 1, 2, 1.0), DomainError);
  CHECK_THROWS_AS(verify_hypotheses(lin, 1, -1, 11, 1.0), DomainError);
  CHECK_THROWS_AS(verify_hypotheses(lin, -1, 1, 11, 0.5), DomainError);
}

TEST_CASE("a softening table law fails ellipticity") {
  // sigma' changes sign: sigma = l - l^3 / 3 on [-3, 3].
  std::vector<double> lam, sig;
  for (int i = 0; i <= 600; ++i) {
    const double l = -3.0 + 0.01 * i;
    lam.push_back(l);
    sig.push_back(l - l * l * l / 3.0);
  }
  const auto rep = verify_hypotheses(StressLaw::table(lam, sig), -3.0, 3.0, 601, 1.0);
  CHECK(rep.h1.status == HypothesisStatus::Violated);
  REQUIRE(rep.h1.witness.has_value());
  CHECK(std::abs(*rep.h1.witness) > 1.0);
}
