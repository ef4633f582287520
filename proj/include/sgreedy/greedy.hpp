#pragma once

// Unified engine for the super greedy family.
//
//   block projection (residual projected onto the current block only):
//       PGA, WGA (s = 1), SGA, WSGA
//   cumulative projection, weak top-s selection:
//       OGA, WOGA (s = 1), WOSGA
//   cumulative projection, thresholding selection:
//       MWOGA (s = 1), WOSGAT

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sgreedy/dictionary.hpp"
#include "sgreedy/errors.hpp"
#include "sgreedy/hilbert.hpp"

namespace sgreedy {

enum class Variant { PGA, WGA, OGA, WOGA, SGA, WSGA, WOSGA, WOSGAT, MWOGA };
enum class SelectionPolicy { top_magnitude, weakest_admissible };
enum class ProjectionPath { incremental, full_resolve };
enum class HaltReason { max_iter, residual_below_tol, empty_selection };

inline constexpr Variant kAllVariants[] = {Variant::PGA,  Variant::WGA,   Variant::OGA,    Variant::WOGA, Variant::SGA,
                                           Variant::WSGA, Variant::WOSGA, Variant::WOSGAT, Variant::MWOGA};

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::PGA: return "PGA";
    case Variant::WGA: return "WGA";
    case Variant::OGA: return "OGA";
    case Variant::WOGA: return "WOGA";
    case Variant::SGA: return "SGA";
    case Variant::WSGA: return "WSGA";
    case Variant::WOSGA: return "WOSGA";
    case Variant::WOSGAT: return "WOSGAT";
    case Variant::MWOGA: return "MWOGA";
  }
  return "?";
}

inline Variant parse_variant(const std::string& name) {
  for (Variant v : kAllVariants)
    if (name == to_string(v)) return v;
  throw InvalidInput("unknown variant '" + name + "'");
}

inline const char* to_string(SelectionPolicy p) {
  return p == SelectionPolicy::top_magnitude ? "top_magnitude" : "weakest_admissible";
}

inline SelectionPolicy parse_policy(const std::string& name) {
  if (name == "top_magnitude") return SelectionPolicy::top_magnitude;
  if (name == "weakest_admissible") return SelectionPolicy::weakest_admissible;
  throw InvalidInput("unknown selection policy '" + name + "'");
}

inline const char* to_string(ProjectionPath p) { return p == ProjectionPath::incremental ? "incremental" : "full_resolve"; }

inline ProjectionPath parse_projection(const std::string& name) {
  if (name == "incremental") return ProjectionPath::incremental;
  if (name == "full_resolve" || name == "full") return ProjectionPath::full_resolve;
  throw InvalidInput("unknown projection path '" + name + "'");
}

inline const char* to_string(HaltReason h) {
  switch (h) {
    case HaltReason::max_iter: return "max_iter";
    case HaltReason::residual_below_tol: return "residual_below_tol";
    case HaltReason::empty_selection: return "empty_selection";
  }
  return "?";
}

inline HaltReason parse_halt_reason(const std::string& name) {
  for (HaltReason h : {HaltReason::max_iter, HaltReason::residual_below_tol, HaltReason::empty_selection})
    if (name == to_string(h)) return h;
  throw InvalidInput("unknown halt reason '" + name + "'");
}

inline bool is_block_family(Variant v) {
  return v == Variant::PGA || v == Variant::WGA || v == Variant::SGA || v == Variant::WSGA;
}
inline bool uses_threshold(Variant v) { return v == Variant::WOSGAT || v == Variant::MWOGA; }
inline bool is_cumulative(Variant v) { return !is_block_family(v); }

/// Weakness sequence t_1, t_2, ... Either a constant or an explicit list;
/// past the end of a list the last value repeats.
class Weakness {
 public:
  static Weakness constant(double t) { return Weakness({t}, true); }
  static Weakness sequence(std::vector<double> values) {
    if (values.empty()) throw InvalidInput("weakness sequence: empty");
    return Weakness(std::move(values), false);
  }

  /// t_k for 1-based k.
  double at(std::size_t k) const {
    if (k == 0) throw InvalidInput("weakness sequence is 1-based");
    return values_[std::min(k, values_.size()) - 1];
  }

  bool is_constant() const {
    return std::all_of(values_.begin(), values_.end(), [&](double t) { return t == values_.front(); });
  }
  std::optional<double> constant_value() const {
    return is_constant() ? std::optional<double>(values_.front()) : std::nullopt;
  }
  bool declared_constant() const { return constant_; }

  bool nonincreasing_through(std::size_t m) const {
    for (std::size_t k = 2; k <= m; ++k)
      if (at(k) > at(k - 1)) return false;
    return true;
  }

  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const Weakness&, const Weakness&) = default;

 private:
  Weakness(std::vector<double> values, bool constant) : values_(std::move(values)), constant_(constant) {}
  std::vector<double> values_;
  bool constant_ = true;
};

struct GreedyConfig {
  Variant variant = Variant::WSGA;
  std::size_t s = 1;
  Weakness tau = Weakness::constant(1.0);
  /// Defaults to 10 * ceil(K / s).
  std::optional<std::size_t> max_iter;
  /// Halt once ||f_m|| <= residual_tol * ||f||.
  double residual_tol = 1e-12;
  /// Relative pivot threshold for projections (see project_span).
  double reg_tol = kDefaultRegTol;
  SelectionPolicy policy = SelectionPolicy::top_magnitude;
  ProjectionPath projection = ProjectionPath::incremental;
  /// Block family only: whether elements of earlier blocks may be picked again.
  bool allow_reselect = true;
  /// Keep f_{m-1} for every iteration in the trace (for post-hoc checks).
  bool record_residuals = false;

  static GreedyConfig of(Variant v, std::size_t s = 1, double t = 1.0) {
    GreedyConfig c;
    c.variant = v;
    c.s = s;
    c.tau = Weakness::constant(t);
    return c;
  }

  friend bool operator==(const GreedyConfig&, const GreedyConfig&) = default;
};

inline void validate(const GreedyConfig& c) {
  const std::string name = to_string(c.variant);
  if (c.s < 1) throw InvalidInput(name + ": block size s must be >= 1");
  if (c.max_iter && *c.max_iter < 1) throw InvalidInput(name + ": max_iter must be >= 1");
  if (!(c.residual_tol > 0.0)) throw InvalidInput(name + ": residual_tol must be > 0");
  if (!(c.reg_tol > 0.0)) throw InvalidInput(name + ": reg_tol must be > 0");
  for (double t : c.tau.values())
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput(name + ": every t_k must lie in [0, 1]");

  const bool tau_one = c.tau.is_constant() && c.tau.values().front() == 1.0;
  switch (c.variant) {
    case Variant::PGA:
    case Variant::OGA:
      if (c.s != 1) throw InvalidInput(name + " requires s = 1");
      if (!tau_one) throw InvalidInput(name + " requires t = 1");
      break;
    case Variant::WGA:
    case Variant::WOGA:
    case Variant::MWOGA:
      if (c.s != 1) throw InvalidInput(name + " requires s = 1");
      break;
    case Variant::SGA:
      if (!tau_one) throw InvalidInput(name + " requires t = 1");
      break;
    case Variant::WSGA:
    case Variant::WOSGA:
    case Variant::WOSGAT:
      break;
  }
}

struct IterationRecord {
  std::size_t m = 0;
  std::vector<std::size_t> selected;
  std::size_t s_m = 0;
  double residual_norm_before = 0.0;
  double residual_norm_after = 0.0;
  /// ||p_m||; for cumulative variants the norm of P_{H_m} f - P_{H_{m-1}} f.
  double projection_norm = 0.0;
  std::optional<HaltReason> halt_reason;
};

struct RunTrace {
  GreedyConfig config;
  std::string dictionary_id;
  double initial_norm = 0.0;
  std::vector<IterationRecord> records;
  /// Coefficient per selected dictionary index.
  std::map<std::size_t, double> approximant;
  Point final_residual;
  HaltReason halt_reason = HaltReason::max_iter;
  /// f_{m-1} per record, only when config.record_residuals is set.
  std::vector<Point> residuals_before;

  Point approximant_point(const Dictionary& dict) const {
    Point g(dict.dim());
    for (const auto& [k, c] : approximant) g.axpy(c, dict[k]);
    return g;
  }
};

// ---------------------------------------------------------------------------
// Selection rules

namespace detail {

// Candidate positions ordered by magnitude descending, lowest index on ties.
// Magnitudes at or below `zero_floor` rank as exact zeros so roundoff cannot
// reorder them; when nothing clears the floor there are no candidates.
inline std::vector<std::size_t> ranked_candidates(std::span<const double> mags, const std::vector<bool>& excluded,
                                                  double zero_floor, double min_mag = 0.0) {
  std::vector<std::size_t> cand;
  bool any_nonzero = false;
  for (std::size_t i = 0; i < mags.size(); ++i) {
    if (!excluded.empty() && excluded[i]) continue;
    if (mags[i] < min_mag) continue;
    any_nonzero = any_nonzero || mags[i] > zero_floor;
    cand.push_back(i);
  }
  if (!any_nonzero) return {};
  auto key = [&](std::size_t i) { return mags[i] > zero_floor ? mags[i] : 0.0; };
  std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
    return key(a) != key(b) ? key(a) > key(b) : a < b;
  });
  return cand;
}

}  // namespace detail

/// Weak top-s selection from precomputed magnitudes |<residual, g_i>|.
///
/// Returns up to s indices (in selection order) with
///   min_{chosen} mag >= t * max_{unchosen, unexcluded} mag.
/// top_magnitude takes the s largest. weakest_admissible keeps the s-1
/// largest and substitutes the smallest magnitude that still satisfies the
/// inequality, which minimizes the chosen minimum over all admissible sets.
inline std::vector<std::size_t> select_weak_top(std::span<const double> mags, std::size_t s, double t,
                                                const std::vector<bool>& excluded, SelectionPolicy policy,
                                                double zero_floor = 0.0) {
  if (s < 1) throw InvalidInput("select_weak_top: s must be >= 1");
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("select_weak_top: t must lie in [0, 1]");
  std::vector<double> clamped(mags.begin(), mags.end());
  for (double& m : clamped)
    if (m <= zero_floor) m = 0.0;
  mags = clamped;
  std::vector<std::size_t> cand = detail::ranked_candidates(mags, excluded, 0.0);
  if (cand.size() <= s) return cand;

  if (policy == SelectionPolicy::top_magnitude) {
    cand.resize(s);
    return cand;
  }

  // Complement max once position s-1 is swapped out is mags[cand[s-1]].
  const double ref = mags[cand[s - 1]];
  std::size_t p = s - 1;
  for (std::size_t q = s; q < cand.size(); ++q)
    if (mags[cand[q]] >= t * ref) p = q;
  std::vector<std::size_t> out(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(s - 1));
  if (mags[cand[p]] == ref) {
    out.push_back(cand[s - 1]);
    return out;
  }
  std::size_t first = p;
  while (first > s && mags[cand[first - 1]] == mags[cand[p]]) --first;
  out.push_back(cand[first]);
  return out;
}

inline std::vector<double> inner_magnitudes(const Point& residual, const Dictionary& dict) {
  require_same_dim(residual, dict[0], "inner_magnitudes");
  std::vector<double> mags(dict.size());
  for (std::size_t i = 0; i < dict.size(); ++i) mags[i] = std::abs(inner(residual, dict[i]));
  return mags;
}

/// Inner products at or below this fraction of ||residual|| count as zero.
inline constexpr double kZeroInnerFloor = 1e-13;

inline std::vector<std::size_t> select_weak_top(const Point& residual, const Dictionary& dict, std::size_t s, double t,
                                                const std::vector<bool>& excluded,
                                                SelectionPolicy policy = SelectionPolicy::top_magnitude) {
  const auto mags = inner_magnitudes(residual, dict);
  return select_weak_top(mags, s, t, excluded, policy, kZeroInnerFloor * norm(residual));
}

/// Thresholding selection: indices with |<r, g_i>| >= t ||r||^2, the s
/// largest of them when more qualify.
inline std::vector<std::size_t> select_threshold(const Point& residual, const Dictionary& dict, std::size_t s, double t,
                                                 const std::vector<bool>& excluded) {
  if (s < 1) throw InvalidInput("select_threshold: s must be >= 1");
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("select_threshold: t must lie in [0, 1]");
  const double norm2 = inner(residual, residual);
  if (norm2 == 0.0) return {};
  const auto mags = inner_magnitudes(residual, dict);
  auto cand = detail::ranked_candidates(mags, excluded, kZeroInnerFloor * std::sqrt(norm2), t * norm2);
  if (cand.size() > s) cand.resize(s);
  return cand;
}

// ---------------------------------------------------------------------------
// Cumulative projection state: orthonormal basis of H_m by modified
// Gram-Schmidt with one reorthogonalization pass, plus the triangular factor
// so that coefficients on the dictionary elements can be recovered.

class CumulativeSpan {
 public:
  CumulativeSpan(const Point& f, double reg_tol) : f_(f), reg_tol_(reg_tol) {}

  /// Returns the basis vectors added (dependent elements add none).
  std::size_t extend(std::size_t index, const Point& g) {
    Point v = g;
    std::vector<double> rcol(basis_.size() + 1, 0.0);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < basis_.size(); ++i) {
        const double r = inner(basis_[i], v);
        v.axpy(-r, basis_[i]);
        rcol[i] += r;
      }
    }
    const double g2 = inner(g, g);
    const double nv = norm(v);
    if (!(nv * nv > reg_tol_ * g2)) return 0;
    v *= 1.0 / nv;
    rcol.back() = nv;
    z_.push_back(inner(v, f_));
    basis_.push_back(std::move(v));
    columns_.push_back(std::move(rcol));
    kept_.push_back(index);
    return 1;
  }

  const std::vector<Point>& basis() const { return basis_; }

  /// Subtracts the components of r along the last `fresh` basis vectors,
  /// then along the whole basis once more.
  void orthogonalize(Point& r, std::size_t fresh) const {
    for (std::size_t i = basis_.size() - fresh; i < basis_.size(); ++i) r.axpy(-inner(basis_[i], r), basis_[i]);
    for (const auto& q : basis_) r.axpy(-inner(q, r), q);
  }

  /// Coefficients on the kept dictionary indices, by back substitution.
  std::vector<std::pair<std::size_t, double>> coefficients() const {
    const std::size_t n = basis_.size();
    std::vector<double> c(n, 0.0);
    for (std::size_t l = n; l-- > 0;) {
      double sum = z_[l];
      for (std::size_t j = l + 1; j < n; ++j) sum -= columns_[j][l] * c[j];
      c[l] = sum / columns_[l][l];
    }
    std::vector<std::pair<std::size_t, double>> out;
    for (std::size_t l = 0; l < n; ++l) out.emplace_back(kept_[l], c[l]);
    return out;
  }

 private:
  const Point& f_;
  double reg_tol_;
  std::vector<Point> basis_;
  std::vector<std::vector<double>> columns_;  // R column l has l+1 entries
  std::vector<double> z_;                     // <q_l, f>
  std::vector<std::size_t> kept_;
};

inline std::size_t default_max_iter(std::size_t k, std::size_t s) { return 10 * ((k + s - 1) / s); }

inline RunTrace run_greedy(const GreedyConfig& config, const Dictionary& dict, const Point& f) {
  validate(config);
  if (f.dim() != dict.dim())
    throw InvalidInput("run_greedy: signal dimension " + std::to_string(f.dim()) + " does not match dictionary " +
                       std::to_string(dict.dim()));
  if (!f.is_finite()) throw InvalidInput("run_greedy: signal is not finite");

  const Variant variant = config.variant;
  const std::size_t k = dict.size();
  const std::size_t max_iter = config.max_iter.value_or(default_max_iter(k, config.s));

  RunTrace trace;
  trace.config = config;
  trace.dictionary_id = dict.id();
  trace.initial_norm = norm(f);
  const double tol_abs = config.residual_tol * trace.initial_norm;

  Point residual = f;
  if (trace.initial_norm == 0.0) {
    trace.halt_reason = HaltReason::residual_below_tol;
    trace.final_residual = residual;
    return trace;
  }

  std::vector<bool> excluded(k, false);
  std::vector<std::size_t> selected_all;
  CumulativeSpan span(f, config.reg_tol);
  std::optional<Projection> last_full;

  for (std::size_t m = 1; m <= max_iter; ++m) {
    const double t = config.tau.at(m);
    IterationRecord rec;
    rec.m = m;
    rec.residual_norm_before = norm(residual);
    if (config.record_residuals) trace.residuals_before.push_back(residual);

    rec.selected = uses_threshold(variant) ? select_threshold(residual, dict, config.s, t, excluded)
                                           : select_weak_top(residual, dict, config.s, t, excluded, config.policy);
    rec.s_m = rec.selected.size();

    if (rec.selected.empty()) {
      rec.residual_norm_after = rec.residual_norm_before;
      rec.halt_reason = HaltReason::empty_selection;
      trace.records.push_back(std::move(rec));
      trace.halt_reason = HaltReason::empty_selection;
      break;
    }

    if (is_block_family(variant)) {
      const auto block = dict.select(rec.selected);
      const Projection p = project_span(residual, std::span<const Point* const>(block), config.reg_tol);
      for (std::size_t idx : rec.selected) trace.approximant.try_emplace(idx, 0.0);
      for (std::size_t j = 0; j < p.kept.size(); ++j) trace.approximant[rec.selected[p.kept[j]]] += p.coeffs[j];
      residual -= p.projection;
      rec.projection_norm = norm(p.projection);
      if (!config.allow_reselect)
        for (std::size_t idx : rec.selected) excluded[idx] = true;
    } else {
      const Point previous = residual;
      for (std::size_t idx : rec.selected) {
        excluded[idx] = true;
        selected_all.push_back(idx);
      }
      if (config.projection == ProjectionPath::incremental) {
        std::size_t fresh = 0;
        for (std::size_t idx : rec.selected) fresh += span.extend(idx, dict[idx]);
        span.orthogonalize(residual, fresh);
      } else {
        const auto all = dict.select(selected_all);
        last_full = project_span(f, std::span<const Point* const>(all), config.reg_tol);
        residual = f - last_full->projection;
      }
      rec.projection_norm = norm(previous - residual);
    }

    rec.residual_norm_after = norm(residual);
    if (rec.residual_norm_after <= tol_abs) {
      rec.halt_reason = HaltReason::residual_below_tol;
    } else if (m == max_iter) {
      rec.halt_reason = HaltReason::max_iter;
    }
    const bool stop = rec.halt_reason.has_value();
    if (stop) trace.halt_reason = *rec.halt_reason;
    trace.records.push_back(std::move(rec));
    if (stop) break;
  }

  if (is_cumulative(variant)) {
    for (std::size_t idx : selected_all) trace.approximant.try_emplace(idx, 0.0);
    if (config.projection == ProjectionPath::incremental) {
      for (const auto& [idx, c] : span.coefficients()) trace.approximant[idx] = c;
    } else if (last_full) {
      for (std::size_t j = 0; j < last_full->kept.size(); ++j) trace.approximant[selected_all[last_full->kept[j]]] = last_full->coeffs[j];
    }
  }
  trace.final_residual = std::move(residual);
  return trace;
}

/// Same selected index sequences and residual norms within `tol` at every
/// iteration.
inline bool traces_equal(const RunTrace& a, const RunTrace& b, double tol) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& ra = a.records[i];
    const auto& rb = b.records[i];
    if (ra.selected != rb.selected) return false;
    if (!(std::abs(ra.residual_norm_after - rb.residual_norm_after) <= tol)) return false;
  }
  return true;
}

}  // namespace sgreedy
