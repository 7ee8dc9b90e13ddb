/**
 * @file stress_law.hpp
 * @brief Constitutive laws sigma(lambda) for the quasilinear string, their
 *        elastic potential Sigma, and a sampling audit of the structural
 *        hypotheses the existence theory relies on.
 */
#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace obstacle {

enum class LawKind { Linear, Power, Table };

/**
 * @brief Homogeneous stress law sigma : R -> R with sigma(0) = 0.
 *
 * Builtins are sigma(l) = l and sigma(l) = l + l^k for odd k >= 3. A table
 * law interpolates monotone (lambda, sigma) samples with a piecewise cubic
 * Hermite interpolant and extends linearly outside the table.
 *
 * Instances are immutable and cheap to copy.
 */
class StressLaw {
public:
  static StressLaw linear();
  static StressLaw power(int exponent);
  static StressLaw table(std::vector<double> lambda, std::vector<double> sigma);
  /// Reads the two-column "lambda sigma" text format ('#' starts a comment line).
  static StressLaw table_from_file(const std::string& path);
  static StressLaw table_from_text(const std::string& text);

  LawKind kind() const noexcept { return kind_; }
  int exponent() const noexcept { return exponent_; }
  /// True when Sigma has a closed form (builtins).
  bool closed_form_potential() const noexcept { return kind_ != LawKind::Table; }
  std::string describe() const;

  double sigma(double lambda) const;
  double sigma_prime(double lambda) const;
  double sigma_second(double lambda) const;
  double sigma_third(double lambda) const;
  /// Sigma(lambda) = int_0^lambda sigma(s) ds.
  double potential(double lambda) const;

  /// Known hypothesis constants (builtins only; table laws rely on the audit).
  double ellipticity() const noexcept { return c_; }
  double kappa() const noexcept { return kappa_; }
  std::optional<double> inflection() const noexcept { return lambda0_; }

  const std::vector<double>& table_lambda() const;
  const std::vector<double>& table_sigma() const;

private:
  struct TableData;

  StressLaw() = default;
  double table_eval(double lambda) const;
  double finite_difference(double lambda, int order) const;

  LawKind kind_ = LawKind::Linear;
  int exponent_ = 1;
  double c_ = 1.0;
  double kappa_ = 2.0;
  std::optional<double> lambda0_;
  std::shared_ptr<const TableData> table_;
};

/// Free-function forms of the law evaluations.
double sigma_eval(const StressLaw& law, double lambda);
double sigma_prime(const StressLaw& law, double lambda);
double sigma_potential(const StressLaw& law, double lambda);

enum class HypothesisStatus { Holds, Violated, NotApplicable };

const char* to_string(HypothesisStatus status);

struct HypothesisCheck {
  HypothesisStatus status = HypothesisStatus::NotApplicable;
  /// Set when status == Violated.
  std::optional<double> witness;
  /// The violating quantity at the witness (e.g. sigma' value, ratio, count).
  std::optional<double> witness_value;
  std::string note;
};

struct HypothesisReport {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  std::size_t samples = 0;
  double q = 1.0;

  HypothesisCheck h1;  ///< sigma' >= c > 0
  HypothesisCheck h2;  ///< sigma'' vanishes at most at one point
  HypothesisCheck h3;  ///< growth (sigma')^q <= m (1 + Sigma)
  HypothesisCheck h4;  ///< |lambda sigma| <= kappa Sigma

  double c_est = 0.0;
  std::optional<double> lambda0;
  double m_est = 0.0;
  double kappa_est = 0.0;

  // H3 integrability clauses over the audited window only: evidence, not proof.
  double l2_second_ratio = 0.0;  ///< int (sigma'' / sigma'^{5/4})^2
  double l2_third_ratio = 0.0;   ///< int (sigma''' / sigma'^{7/4})^2
  double sup_second_ratio = 0.0; ///< sup |sigma''| / sigma'^{3/2}
  double sup_third_ratio = 0.0;  ///< sup |sigma'''| / sigma'^2

  std::string to_text() const;
};

/// Audits H1-H4 on `samples` uniform points of [lo, hi] with growth exponent q.
/// Violations are reported in the result, never thrown.
HypothesisReport verify_hypotheses(const StressLaw& law, double lo, double hi,
                                   std::size_t samples, double q);

}  // namespace obstacle
