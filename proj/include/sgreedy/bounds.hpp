#pragma once

// Closed-form error envelopes for the greedy family.
//
// Two instantiation choices are baked in:
//  * the absolute constant of the WSGA bound is 6^{1/2} (a + 1) with
//    a = (t + 3) / (2t), the constant produced by the proof of that bound;
//  * the worst-case weak greedy error gamma(m, tau), a supremum over all
//    dictionaries, has no computable form and is replaced everywhere by its
//    weak greedy upper bound B (1 + sum t_k^2)^{-t_m / (2 (2 + t_m))}
//    ("gamma surrogate").

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sgreedy/errors.hpp"
#include "sgreedy/greedy.hpp"

namespace sgreedy {

enum class BoundName { thm1_wsga, thm2_wga, pga_corollary, thm3_wosga, thm4_wosgat, lemma_l1 };

inline const char* to_string(BoundName b) {
  switch (b) {
    case BoundName::thm1_wsga: return "thm1_wsga";
    case BoundName::thm2_wga: return "thm2_wga";
    case BoundName::pga_corollary: return "pga_corollary";
    case BoundName::thm3_wosga: return "thm3_wosga";
    case BoundName::thm4_wosgat: return "thm4_wosgat";
    case BoundName::lemma_l1: return "lemma_l1";
  }
  return "?";
}

struct BoundReport {
  BoundName bound_name = BoundName::thm1_wsga;
  std::vector<std::pair<std::size_t, double>> per_iteration;
  std::map<std::string, double> parameters;
  std::string note;
};

/// Weak greedy bound B (1 + sum_{k<=m} t_k^2)^{-t_m / (2 (2 + t_m))}.
inline double gamma_upper(std::size_t m, const Weakness& tau, double budget = 1.0) {
  if (m < 1) throw InvalidInput("gamma_upper: m must be >= 1");
  if (!(budget > 0.0)) throw InvalidInput("gamma_upper: B must be > 0");
  if (!tau.nonincreasing_through(m)) throw InvalidInput("gamma_upper: weakness sequence must be nonincreasing");
  double sum = 0.0;
  for (std::size_t k = 1; k <= m; ++k) {
    const double t = tau.at(k);
    if (!(t > 0.0 && t <= 1.0)) throw InvalidInput("gamma_upper: every t_k must lie in (0, 1]");
    sum += t * t;
  }
  const double tm = tau.at(m);
  return budget * std::pow(1.0 + sum, -tm / (2.0 * (2.0 + tm)));
}

/// PGA rate B m^{-1/6}.
inline double pga_bound(std::size_t m, double budget = 1.0) {
  if (m < 1) throw InvalidInput("pga_bound: m must be >= 1");
  if (!(budget > 0.0)) throw InvalidInput("pga_bound: B must be > 0");
  return budget * std::pow(static_cast<double>(m), -1.0 / 6.0);
}

/// r = ((1 - Ms) / (1 + Ms))^{1/2}.
inline double r_param(double coherence, std::size_t s) {
  if (!(coherence >= 0.0)) throw InvalidInput("r_param: M must be >= 0");
  if (s < 1) throw InvalidInput("r_param: s must be >= 1");
  const double ms = coherence * static_cast<double>(s);
  if (!(ms < 1.0)) throw InvalidInput("r_param: requires Ms < 1");
  return std::sqrt((1.0 - ms) / (1.0 + ms));
}

/// True when s <= 1/(2M) (always true for M = 0). A few ulps of slack keep
/// the boundary point M = 1/(2s) inside after rounding.
inline bool within_incoherence_regime(double coherence, std::size_t s) {
  return 2.0 * coherence * static_cast<double>(s) <= 1.0 + 1e-14;
}

inline double wsga_constant(double t) {
  const double a = (t + 3.0) / (2.0 * t);
  return std::sqrt(6.0) * (a + 1.0);
}

/// WSGA(s, t) bound 6^{1/2} (a + 1) s^{-1/2} gamma_surrogate(m - 1, r t).
inline double thm1_wsga_bound(std::size_t m, std::size_t s, double coherence, double t, double budget = 1.0) {
  if (!(t > 0.0 && t <= 1.0)) throw InvalidInput("thm1_wsga_bound: requires t in (0, 1]");
  if (s < 1) throw InvalidInput("thm1_wsga_bound: requires s >= 1");
  if (!within_incoherence_regime(coherence, s)) throw InvalidInput("thm1_wsga_bound: requires s <= 1/(2M)");
  if (m < 2) throw InvalidInput("thm1_wsga_bound: requires m >= 2");
  const double r = r_param(coherence, s);
  return wsga_constant(t) / std::sqrt(static_cast<double>(s)) * gamma_upper(m - 1, Weakness::constant(r * t), budget);
}

/// A(t) = (81/8) (1 + t)^2 t^{-4}.
inline double wosga_constant(double t) {
  if (!(t > 0.0 && t <= 1.0)) throw InvalidInput("wosga_constant: requires t in (0, 1]");
  return 81.0 / 8.0 * (1.0 + t) * (1.0 + t) / (t * t * t * t);
}

/// Bound on ||f_m|| (not its square): (A(t) / (s m))^{1/2}.
inline double thm3_wosga_bound(std::size_t m, std::size_t s, double t) {
  if (s < 1 || m < 1) throw InvalidInput("thm3_wosga_bound: requires s, m >= 1");
  return std::sqrt(wosga_constant(t) / (static_cast<double>(s) * static_cast<double>(m)));
}

/// (1 + beta t^2 sum s_j)^{-1/2}.
inline double thm4_wosgat_bound(std::span<const std::size_t> s_list, double t, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw InvalidInput("thm4_wosgat_bound: requires beta in (0, 1]");
  if (!(t > 0.0 && t <= 1.0)) throw InvalidInput("thm4_wosgat_bound: requires t in (0, 1]");
  double picked = 0.0;
  for (std::size_t sj : s_list) picked += static_cast<double>(sj);
  return 1.0 / std::sqrt(1.0 + beta * t * t * picked);
}

/// A (1 + sum_{k<=m} lambda_k^2)^{-1}; lambdas[0] is lambda_1.
inline double lemma_l1_bound(double a, std::span<const double> lambdas, std::size_t m) {
  if (!(a > 0.0)) throw InvalidInput("lemma_l1_bound: requires A > 0");
  if (m > lambdas.size()) throw InvalidInput("lemma_l1_bound: m exceeds the lambda list");
  double sum = 0.0;
  for (std::size_t k = 0; k < m; ++k) sum += lambdas[k] * lambdas[k];
  return a / (1.0 + sum);
}

struct LemmaCheck {
  bool ok = true;
  std::optional<std::size_t> failing_index;
  std::string reason;
  explicit operator bool() const { return ok; }
};

/// Verifies the recursion a_m <= a_{m-1} (1 - lambda_m^2 a_{m-1} / A) for a
/// sequence a_0..a_n with lambdas lambda_1..lambda_n, then the conclusion
/// a_m <= A (1 + sum lambda_k^2)^{-1} at every m.
inline LemmaCheck lemma_l1_check(double a, std::span<const double> sequence, std::span<const double> lambdas) {
  auto fail = [](std::size_t i, std::string why) { return LemmaCheck{false, i, std::move(why)}; };
  if (!(a > 0.0)) throw InvalidInput("lemma_l1_check: requires A > 0");
  if (sequence.empty()) return {};
  if (lambdas.size() + 1 < sequence.size()) throw InvalidInput("lemma_l1_check: need one lambda per step");
  for (std::size_t m = 0; m < sequence.size(); ++m)
    if (!(sequence[m] >= 0.0)) return fail(m, "sequence entry is negative");
  if (sequence[0] > a) return fail(0, "a_0 exceeds A");
  for (std::size_t m = 1; m < sequence.size(); ++m) {
    const double prev = sequence[m - 1];
    const double lam = lambdas[m - 1];
    if (sequence[m] > prev * (1.0 - lam * lam * prev / a)) return fail(m, "recursion hypothesis fails");
  }
  for (std::size_t m = 0; m < sequence.size(); ++m)
    if (sequence[m] > lemma_l1_bound(a, lambdas, m)) return fail(m, "conclusion fails");
  return {};
}

struct ExponentComparison {
  double theta = 0.0;
  double pga_exp = 1.0 / 6.0;
  double sga_exp = 0.0;
  bool sga_wins = false;
};

/// At s = m = N^{1/2}: PGA decays like N^{-1/6}, SGA(s) like
/// N^{-1/4 - theta/2} with theta = r / (2 (2 + r)).
inline ExponentComparison exponent_comparison(double coherence, std::size_t s) {
  if (!within_incoherence_regime(coherence, s)) throw InvalidInput("exponent_comparison: requires Ms <= 1/2");
  const double r = r_param(coherence, s);
  ExponentComparison out;
  out.theta = r / (2.0 * (2.0 + r));
  out.sga_exp = 0.25 + 0.5 * out.theta;
  out.sga_wins = out.sga_exp >= out.pga_exp;
  return out;
}

// ---------------------------------------------------------------------------
// Reports over m = 1..m_max (m = 2.. for the WSGA bound).

inline BoundReport report_thm1(std::size_t m_max, std::size_t s, double coherence, double t, double budget = 1.0) {
  BoundReport rep{BoundName::thm1_wsga, {}, {{"B", budget}, {"M", coherence}, {"s", double(s)}, {"t", t}}, ""};
  const double a = (t + 3.0) / (2.0 * t);
  rep.parameters["a"] = a;
  rep.parameters["C"] = wsga_constant(t);
  rep.parameters["r"] = r_param(coherence, s);
  rep.note = "C = 6^{1/2}(a+1); gamma factor is the weak greedy surrogate with weakness r*t";
  for (std::size_t m = 2; m <= m_max; ++m) rep.per_iteration.emplace_back(m, thm1_wsga_bound(m, s, coherence, t, budget));
  return rep;
}

inline BoundReport report_thm2(std::size_t m_max, const Weakness& tau, double budget = 1.0) {
  BoundReport rep{BoundName::thm2_wga, {}, {{"B", budget}, {"t_1", tau.at(1)}}, "weak greedy surrogate"};
  for (std::size_t m = 1; m <= m_max; ++m) rep.per_iteration.emplace_back(m, gamma_upper(m, tau, budget));
  return rep;
}

inline BoundReport report_pga(std::size_t m_max, double budget = 1.0) {
  BoundReport rep{BoundName::pga_corollary, {}, {{"B", budget}}, ""};
  for (std::size_t m = 1; m <= m_max; ++m) rep.per_iteration.emplace_back(m, pga_bound(m, budget));
  return rep;
}

inline BoundReport report_thm3(std::size_t m_max, std::size_t s, double t) {
  BoundReport rep{BoundName::thm3_wosga, {}, {{"s", double(s)}, {"t", t}, {"A", wosga_constant(t)}},
                  "bound on the residual norm, square root of A(t)/(sm)"};
  for (std::size_t m = 1; m <= m_max; ++m) rep.per_iteration.emplace_back(m, thm3_wosga_bound(m, s, t));
  return rep;
}

/// Per-iteration WOSGAT envelope for an observed s_1, s_2, ... sequence.
inline BoundReport report_thm4(std::span<const std::size_t> s_list, double t, double beta) {
  BoundReport rep{BoundName::thm4_wosgat, {}, {{"t", t}, {"beta", beta}}, ""};
  for (std::size_t m = 1; m <= s_list.size(); ++m)
    rep.per_iteration.emplace_back(m, thm4_wosgat_bound(s_list.first(m), t, beta));
  return rep;
}

inline BoundReport report_lemma_l1(double a, std::span<const double> lambdas) {
  BoundReport rep{BoundName::lemma_l1, {}, {{"A", a}}, ""};
  for (std::size_t m = 1; m <= lambdas.size(); ++m) rep.per_iteration.emplace_back(m, lemma_l1_bound(a, lambdas, m));
  return rep;
}

}  // namespace sgreedy
