#include "obstacle/stress_law.hpp"

#include "obstacle/errors.hpp"

#include <cmath>
// Boost 1.74 pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace obstacle {

namespace {

constexpr double kPotentialTolerance = 1e-10;
constexpr unsigned kMaxBisections = 15;  // 2^15 subintervals

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

void require_finite(double lambda) {
  if (!std::isfinite(lambda)) throw DomainError("stress law evaluated at non-finite strain");
}

}  // namespace

struct StressLaw::TableData {
  std::vector<double> lambda;
  std::vector<double> sigma;
  boost::math::interpolators::pchip<std::vector<double>> spline;
  double lo, hi, slope_lo, slope_hi, sigma_lo, sigma_hi;

  TableData(std::vector<double> l, std::vector<double> s)
      : lambda(l), sigma(s), spline(std::move(l), std::move(s)) {
    lo = lambda.front();
    hi = lambda.back();
    sigma_lo = sigma.front();
    sigma_hi = sigma.back();
    slope_lo = spline.prime(lo);
    slope_hi = spline.prime(hi);
  }
};

StressLaw StressLaw::linear() {
  StressLaw law;
  law.kind_ = LawKind::Linear;
  law.exponent_ = 1;
  law.c_ = 1.0;
  law.kappa_ = 2.0;
  return law;
}

StressLaw StressLaw::power(int exponent) {
  if (exponent < 3 || exponent % 2 == 0)
    throw DomainError("power law exponent must be an odd integer >= 3, got " + std::to_string(exponent));
  StressLaw law;
  law.kind_ = LawKind::Power;
  law.exponent_ = exponent;
  law.c_ = 1.0;
  // lambda sigma / Sigma increases from 2 at the origin towards k + 1.
  law.kappa_ = exponent + 1.0;
  law.lambda0_ = 0.0;
  return law;
}

StressLaw StressLaw::table(std::vector<double> lambda, std::vector<double> sigma) {
  if (lambda.size() != sigma.size())
    throw DomainError("stress table: lambda and sigma columns differ in length");
  if (lambda.size() < 4) throw DomainError("stress table needs at least four rows");
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (!std::isfinite(lambda[i]) || !std::isfinite(sigma[i]))
      throw DomainError("stress table contains a non-finite entry at row " + std::to_string(i + 1));
    if (i > 0 && !(lambda[i] > lambda[i - 1]))
      throw DomainError("stress table lambda column must be strictly increasing (row " +
                        std::to_string(i + 1) + ")");
  }
  StressLaw law;
  law.kind_ = LawKind::Table;
  law.exponent_ = 0;
  law.c_ = std::numeric_limits<double>::quiet_NaN();
  law.kappa_ = std::numeric_limits<double>::quiet_NaN();
  law.table_ = std::make_shared<const TableData>(std::move(lambda), std::move(sigma));
  const double s0 = law.sigma(0.0);
  if (std::abs(s0) > 1e-12)
    throw DomainError("stress table must satisfy sigma(0) = 0, interpolated value is " + std::to_string(s0));
  return law;
}

StressLaw StressLaw::table_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> l, s;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    double a, b;
    if (!(row >> a >> b))
      throw DomainError("stress table line " + std::to_string(lineno) + ": expected 'lambda sigma'");
    std::string rest;
    if (row >> rest)
      throw DomainError("stress table line " + std::to_string(lineno) + ": trailing data '" + rest + "'");
    l.push_back(a);
    s.push_back(b);
  }
  return table(std::move(l), std::move(s));
}

StressLaw StressLaw::table_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open stress table '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return table_from_text(buf.str());
}

std::string StressLaw::describe() const {
  switch (kind_) {
    case LawKind::Linear: return "linear";
    case LawKind::Power: return "power(k=" + std::to_string(exponent_) + ")";
    case LawKind::Table: return "table(" + std::to_string(table_->lambda.size()) + " rows)";
  }
  return "unknown";
}

const std::vector<double>& StressLaw::table_lambda() const {
  if (!table_) throw DomainError("not a table law");
  return table_->lambda;
}

const std::vector<double>& StressLaw::table_sigma() const {
  if (!table_) throw DomainError("not a table law");
  return table_->sigma;
}

double StressLaw::table_eval(double lambda) const {
  const auto& t = *table_;
  if (lambda < t.lo) return t.sigma_lo + t.slope_lo * (lambda - t.lo);
  if (lambda > t.hi) return t.sigma_hi + t.slope_hi * (lambda - t.hi);
  return t.spline(lambda);
}

// Central stencils with steps scaled by |lambda|; the order-2 and order-3
// steps are larger to keep roundoff below truncation error.
double StressLaw::finite_difference(double lambda, int order) const {
  const double scale = std::max(1.0, std::abs(lambda));
  switch (order) {
    case 1: {
      const double h = 1e-6 * scale;
      return (table_eval(lambda + h) - table_eval(lambda - h)) / (2.0 * h);
    }
    case 2: {
      const double h = 1e-4 * scale;
      return (table_eval(lambda + h) - 2.0 * table_eval(lambda) + table_eval(lambda - h)) / (h * h);
    }
    default: {
      const double h = 1e-3 * scale;
      return (table_eval(lambda + 2 * h) - 2.0 * table_eval(lambda + h) + 2.0 * table_eval(lambda - h) -
              table_eval(lambda - 2 * h)) /
             (2.0 * h * h * h);
    }
  }
}

double StressLaw::sigma(double lambda) const {
  require_finite(lambda);
  switch (kind_) {
    case LawKind::Linear: return lambda;
    case LawKind::Power: return lambda + ipow(lambda, exponent_);
    case LawKind::Table: return table_eval(lambda);
  }
  return 0.0;
}

double StressLaw::sigma_prime(double lambda) const {
  require_finite(lambda);
  switch (kind_) {
    case LawKind::Linear: return 1.0;
    case LawKind::Power: return 1.0 + exponent_ * ipow(lambda, exponent_ - 1);
    case LawKind::Table: return finite_difference(lambda, 1);
  }
  return 0.0;
}

double StressLaw::sigma_second(double lambda) const {
  require_finite(lambda);
  switch (kind_) {
    case LawKind::Linear: return 0.0;
    case LawKind::Power: return double(exponent_) * (exponent_ - 1) * ipow(lambda, exponent_ - 2);
    case LawKind::Table: return finite_difference(lambda, 2);
  }
  return 0.0;
}

double StressLaw::sigma_third(double lambda) const {
  require_finite(lambda);
  switch (kind_) {
    case LawKind::Linear: return 0.0;
    case LawKind::Power:
      return double(exponent_) * (exponent_ - 1) * (exponent_ - 2) * ipow(lambda, exponent_ - 3);
    case LawKind::Table: return finite_difference(lambda, 3);
  }
  return 0.0;
}

double StressLaw::potential(double lambda) const {
  require_finite(lambda);
  switch (kind_) {
    case LawKind::Linear: return 0.5 * lambda * lambda;
    case LawKind::Power:
      return 0.5 * lambda * lambda + ipow(lambda, exponent_ + 1) / (exponent_ + 1);
    case LawKind::Table: break;
  }
  if (lambda == 0.0) return 0.0;
  const auto f = [this](double s) { return table_eval(s); };
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, 0.0, lambda, kMaxBisections, 1e-13, &error);
  if (!(error <= kPotentialTolerance) || !std::isfinite(value))
    throw NumericError("potential quadrature did not converge at lambda = " + std::to_string(lambda) +
                       " (error estimate " + std::to_string(error) + ")");
  return std::max(0.0, value);
}

double sigma_eval(const StressLaw& law, double lambda) { return law.sigma(lambda); }
double sigma_prime(const StressLaw& law, double lambda) { return law.sigma_prime(lambda); }
double sigma_potential(const StressLaw& law, double lambda) { return law.potential(lambda); }

const char* to_string(HypothesisStatus status) {
  switch (status) {
    case HypothesisStatus::Holds: return "holds";
    case HypothesisStatus::Violated: return "violated";
    case HypothesisStatus::NotApplicable: return "not-applicable";
  }
  return "?";
}

HypothesisReport verify_hypotheses(const StressLaw& law, double lo, double hi, std::size_t samples,
                                   double q) {
  if (samples < 3) throw DomainError("verify_hypotheses needs at least 3 samples");
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw DomainError("verify_hypotheses needs a finite, non-degenerate range");
  if (!(q > 0.5)) throw DomainError("growth exponent q must exceed 1/2");

  HypothesisReport rep;
  rep.lambda_lo = lo;
  rep.lambda_hi = hi;
  rep.samples = samples;
  rep.q = q;

  std::vector<double> lam(samples), d1(samples), d2(samples), d3(samples), pot(samples), sig(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    lam[i] = lo + (hi - lo) * double(i) / double(samples - 1);
    sig[i] = law.sigma(lam[i]);
    d1[i] = law.sigma_prime(lam[i]);
    d2[i] = law.sigma_second(lam[i]);
    d3[i] = law.sigma_third(lam[i]);
    pot[i] = law.potential(lam[i]);
  }

  // H1
  const auto imin = std::size_t(std::min_element(d1.begin(), d1.end()) - d1.begin());
  rep.c_est = d1[imin];
  if (rep.c_est > 0.0) {
    rep.h1.status = HypothesisStatus::Holds;
  } else {
    rep.h1.status = HypothesisStatus::Violated;
    rep.h1.witness = lam[imin];
    rep.h1.witness_value = d1[imin];
    rep.h1.note = "sigma' not positive";
  }

  // H2: sigma'' may vanish at one point at most.
  {
    double scale = 1.0;
    for (double s : d2) scale = std::max(scale, std::abs(s));
    const double zero_tol = (law.kind() == LawKind::Table ? 1e-6 : 1e-12) * scale;
    std::vector<double> points;
    std::optional<double> interval_witness;
    std::size_t last_nonzero = samples;
    std::size_t run = 0;
    for (std::size_t i = 0; i < samples; ++i) {
      if (std::abs(d2[i]) <= zero_tol) {
        ++run;
        if (run == 1) points.push_back(lam[i]);
        if (run == 2 && !interval_witness) interval_witness = lam[i];
        continue;
      }
      if (run == 0 && last_nonzero < samples && i == last_nonzero + 1 &&
          std::signbit(d2[i]) != std::signbit(d2[last_nonzero])) {
        const double a = lam[last_nonzero], b = lam[i];
        const double fa = d2[last_nonzero], fb = d2[i];
        points.push_back(a - fa * (b - a) / (fb - fa));
      }
      run = 0;
      last_nonzero = i;
    }
    if (interval_witness) {
      rep.h2.status = HypothesisStatus::Violated;
      rep.h2.witness = interval_witness;
      rep.h2.witness_value = law.sigma_second(*interval_witness);
      rep.h2.note = "sigma'' vanishes on an interval (linearly degenerate)";
    } else if (points.size() > 1) {
      rep.h2.status = HypothesisStatus::Violated;
      rep.h2.witness = points[1];
      rep.h2.witness_value = double(points.size());
      rep.h2.note = "sigma'' vanishes at more than one point";
    } else {
      rep.h2.status = HypothesisStatus::Holds;
      if (!points.empty()) rep.lambda0 = points.front();
    }
  }

  // H3 growth; integrability clauses are evidence over the window only.
  {
    double m = 0.0;
    std::size_t at = 0;
    bool finite = true;
    for (std::size_t i = 0; i < samples; ++i) {
      const double r = std::pow(std::max(d1[i], 0.0), q) / (1.0 + pot[i]);
      if (!std::isfinite(r)) {
        finite = false;
        at = i;
        break;
      }
      if (r > m) {
        m = r;
        at = i;
      }
    }
    rep.m_est = m;
    if (finite) {
      rep.h3.status = HypothesisStatus::Holds;
      rep.h3.note = "growth bound fitted on window; L2/Linf clauses are evidence only";
    } else {
      rep.h3.status = HypothesisStatus::Violated;
      rep.h3.witness = lam[at];
      rep.h3.witness_value = std::numeric_limits<double>::infinity();
      rep.h3.note = "growth ratio not finite";
    }
    const double h = (hi - lo) / double(samples - 1);
    for (std::size_t i = 0; i < samples; ++i) {
      if (d1[i] <= 0.0) continue;
      const double w = (i == 0 || i + 1 == samples) ? 0.5 * h : h;
      const double a = d2[i] / std::pow(d1[i], 1.25);
      const double b = d3[i] / std::pow(d1[i], 1.75);
      rep.l2_second_ratio += w * a * a;
      rep.l2_third_ratio += w * b * b;
      rep.sup_second_ratio = std::max(rep.sup_second_ratio, std::abs(d2[i]) / std::pow(d1[i], 1.5));
      rep.sup_third_ratio = std::max(rep.sup_third_ratio, std::abs(d3[i]) / (d1[i] * d1[i]));
    }
  }

  // H4
  {
    rep.h4.status = HypothesisStatus::Holds;
    double kappa = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      if (lam[i] == 0.0) continue;
      const double num = std::abs(lam[i] * sig[i]);
      if (!(pot[i] > 0.0)) {
        if (num > 0.0) {
          rep.h4.status = HypothesisStatus::Violated;
          rep.h4.witness = lam[i];
          rep.h4.witness_value = num;
          rep.h4.note = "Sigma vanishes where lambda*sigma does not";
          break;
        }
        continue;
      }
      kappa = std::max(kappa, num / pot[i]);
    }
    rep.kappa_est = kappa;
  }
  return rep;
}

std::string HypothesisReport::to_text() const {
  std::ostringstream os;
  os.precision(10);
  os << "range [" << lambda_lo << ", " << lambda_hi << "], samples " << samples << ", q " << q << "\n";
  const auto line = [&os](const char* name, const HypothesisCheck& h) {
    os << name << ": " << to_string(h.status);
    if (h.witness) os << " witness lambda=" << *h.witness;
    if (h.witness_value) os << " value=" << *h.witness_value;
    if (!h.note.empty()) os << " (" << h.note << ")";
    os << "\n";
  };
  line("H1", h1);
  os << "  c_est = " << c_est << "\n";
  line("H2", h2);
  if (lambda0) os << "  lambda0 = " << *lambda0 << "\n";
  line("H3", h3);
  os << "  m_est = " << m_est << "\n";
  os << "  evidence: int(s''/s'^1.25)^2 = " << l2_second_ratio << ", int(s'''/s'^1.75)^2 = " << l2_third_ratio
     << ", sup|s''|/s'^1.5 = " << sup_second_ratio << ", sup|s'''|/s'^2 = " << sup_third_ratio << "\n";
  line("H4", h4);
  os << "  kappa_est = " << kappa_est << "\n";
  return os.str();
}

}  // namespace obstacle
