#pragma once

// Batch experiments: seeded dictionaries and signals, greedy runs, and the
// join of empirical residual norms with the theoretical envelopes.
//
// Spec files are flat "key = value" text. Keys before the first [run]
// header are global; each [run] section configures one algorithm.
//
//   dictionary = two_ortho          # orthonormal | random_unit | two_ortho | coherence_capped | file
//   dict.d = 128
//   signal = random_a1              # random_a1 | element | file
//   signal.sparsity = 8
//   trials = 100
//   output_dir = out
//   [run]
//   id = wosga4
//   variant = WOSGA
//   s = 4
//   bounds = thm3

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgreedy/bounds.hpp"
#include "sgreedy/dictionary.hpp"
#include "sgreedy/errors.hpp"
#include "sgreedy/greedy.hpp"
#include "sgreedy/signals.hpp"
#include "sgreedy/trace_io.hpp"

namespace sgreedy {

enum class BoundColumn { thm1, thm2, thm3, thm4 };
inline constexpr BoundColumn kAllBoundColumns[] = {BoundColumn::thm1, BoundColumn::thm2, BoundColumn::thm3,
                                                   BoundColumn::thm4};

inline const char* to_string(BoundColumn b) {
  switch (b) {
    case BoundColumn::thm1: return "thm1";
    case BoundColumn::thm2: return "thm2";
    case BoundColumn::thm3: return "thm3";
    case BoundColumn::thm4: return "thm4";
  }
  return "?";
}

inline BoundColumn parse_bound_column(const std::string& name) {
  for (BoundColumn b : kAllBoundColumns)
    if (name == to_string(b)) return b;
  throw InvalidInput("unknown bound '" + name + "'");
}

enum class BetaSource { prop1, exhaustive };

struct DictionarySource {
  std::string generator = "orthonormal";
  std::size_t d = 8;
  std::size_t k = 0;  // random_unit / coherence_capped
  double m_max = 0.5;
  std::uint64_t seed = 1;
  std::uint64_t max_attempts = 1000000;
  std::string path;
  /// Random generators draw a fresh dictionary per trial (seed + stride * trial).
  bool per_trial = true;
};

struct SignalSource {
  std::string kind = "random_a1";
  std::size_t sparsity = 1;
  double budget = 1.0;
  Decay decay = FlatDecay{};
  std::uint64_t seed = 1;
  std::size_t index = 0;
  std::string path;
};

struct RunSpec {
  std::string id;
  GreedyConfig config;
  std::vector<BoundColumn> bounds;
  BetaSource beta = BetaSource::prop1;
  /// Multiplies every bound column. Values below 1 tighten the envelopes,
  /// which probes how sharp they are on a given workload.
  double bound_scale = 1.0;
};

struct ExperimentSpec {
  DictionarySource dictionary;
  SignalSource signal;
  std::vector<RunSpec> runs;
  std::size_t trials = 1;
  std::uint64_t seed_stride = 1;
  std::string output_dir = ".";
  std::vector<std::size_t> compare_n;
  bool write_traces = false;
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    const auto x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw InvalidInput("spec: key '" + key + "' expects a nonnegative integer, got '" + v + "'");
  }
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw InvalidInput("spec: key '" + key + "' expects a real number, got '" + v + "'");
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidInput("spec: key '" + key + "' expects true/false, got '" + v + "'");
}

}  // namespace detail

inline ExperimentSpec parse_experiment_spec(std::istream& is) {
  using namespace detail;
  ExperimentSpec spec;
  RunSpec* run = nullptr;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line == "[run]") {
      spec.runs.emplace_back();
      run = &spec.runs.back();
      run->id = "run" + std::to_string(spec.runs.size());
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidInput("spec line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::string where = "spec line " + std::to_string(lineno) + ": ";

    if (run != nullptr) {
      GreedyConfig& c = run->config;
      if (key == "id") run->id = val;
      else if (key == "variant") c.variant = parse_variant(val);
      else if (key == "s") c.s = to_u64(key, val);
      else if (key == "t") c.tau = Weakness::constant(to_double(key, val));
      else if (key == "tau") {
        std::vector<double> ts;
        for (const auto& item : split_list(val)) ts.push_back(to_double(key, item));
        c.tau = Weakness::sequence(std::move(ts));
      } else if (key == "max_iter") c.max_iter = to_u64(key, val);
      else if (key == "residual_tol") c.residual_tol = to_double(key, val);
      else if (key == "reg_tol") c.reg_tol = to_double(key, val);
      else if (key == "policy") c.policy = parse_policy(val);
      else if (key == "projection") c.projection = parse_projection(val);
      else if (key == "allow_reselect") c.allow_reselect = to_bool(key, val);
      else if (key == "bounds") {
        run->bounds.clear();
        for (const auto& item : split_list(val)) run->bounds.push_back(parse_bound_column(item));
      } else if (key == "beta") {
        if (val == "prop1") run->beta = BetaSource::prop1;
        else if (val == "exhaustive") run->beta = BetaSource::exhaustive;
        else throw InvalidInput(where + "beta must be prop1 or exhaustive");
      } else if (key == "bound_scale") {
        run->bound_scale = to_double(key, val);
        if (!(run->bound_scale > 0.0)) throw InvalidInput(where + "bound_scale must be > 0");
      } else throw InvalidInput(where + "unknown run key '" + key + "'");
      continue;
    }

    DictionarySource& d = spec.dictionary;
    SignalSource& s = spec.signal;
    if (key == "dictionary") d.generator = val;
    else if (key == "dict.d") d.d = to_u64(key, val);
    else if (key == "dict.K") d.k = to_u64(key, val);
    else if (key == "dict.M_max") d.m_max = to_double(key, val);
    else if (key == "dict.seed") d.seed = to_u64(key, val);
    else if (key == "dict.max_attempts") d.max_attempts = to_u64(key, val);
    else if (key == "dict.path") d.path = val;
    else if (key == "dict.per_trial") d.per_trial = to_bool(key, val);
    else if (key == "signal") s.kind = val;
    else if (key == "signal.sparsity") s.sparsity = to_u64(key, val);
    else if (key == "signal.B") s.budget = to_double(key, val);
    else if (key == "signal.decay") s.decay = parse_decay(val);
    else if (key == "signal.seed") s.seed = to_u64(key, val);
    else if (key == "signal.index") s.index = to_u64(key, val);
    else if (key == "signal.path") s.path = val;
    else if (key == "trials") spec.trials = to_u64(key, val);
    else if (key == "seed_stride") spec.seed_stride = to_u64(key, val);
    else if (key == "output_dir") spec.output_dir = val;
    else if (key == "traces") spec.write_traces = to_bool(key, val);
    else if (key == "compare.N") {
      spec.compare_n.clear();
      for (const auto& item : split_list(val)) spec.compare_n.push_back(to_u64(key, item));
    } else throw InvalidInput(where + "unknown key '" + key + "'");
  }
  return spec;
}

inline ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open spec file " + path);
  return parse_experiment_spec(is);
}

inline void validate(const ExperimentSpec& spec, bool need_runs = true) {
  static const char* generators[] = {"orthonormal", "random_unit", "two_ortho", "coherence_capped", "file"};
  if (std::find(std::begin(generators), std::end(generators), spec.dictionary.generator) == std::end(generators))
    throw InvalidInput("spec: unknown dictionary generator '" + spec.dictionary.generator + "'");
  if (spec.dictionary.generator == "file" && spec.dictionary.path.empty())
    throw InvalidInput("spec: dictionary = file needs dict.path");
  if ((spec.dictionary.generator == "random_unit" || spec.dictionary.generator == "coherence_capped") &&
      spec.dictionary.k == 0)
    throw InvalidInput("spec: generator '" + spec.dictionary.generator + "' needs dict.K");
  if (spec.signal.kind != "random_a1" && spec.signal.kind != "element" && spec.signal.kind != "file")
    throw InvalidInput("spec: unknown signal source '" + spec.signal.kind + "'");
  if (spec.signal.kind == "file" && spec.signal.path.empty()) throw InvalidInput("spec: signal = file needs signal.path");
  if (spec.trials < 1) throw InvalidInput("spec: trials must be >= 1");
  if (spec.seed_stride < 1) throw InvalidInput("spec: seed_stride must be >= 1");
  if (need_runs && spec.runs.empty()) throw InvalidInput("spec: no [run] sections");
  std::map<std::string, int> ids;
  for (const auto& r : spec.runs) {
    if (++ids[r.id] > 1) throw InvalidInput("spec: duplicate run id '" + r.id + "'");
    validate(r.config);
  }
}

// ---------------------------------------------------------------------------
// Trial inputs

inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t stride, std::size_t trial) {
  return base + stride * static_cast<std::uint64_t>(trial);
}

inline bool is_random_generator(const std::string& g) { return g == "random_unit" || g == "coherence_capped"; }

inline Dictionary make_dictionary(const DictionarySource& src, std::uint64_t seed) {
  if (src.generator == "orthonormal") return gen_orthonormal(src.d);
  if (src.generator == "two_ortho") return gen_two_ortho_bases(src.d);
  if (src.generator == "random_unit") return gen_random_unit(src.d, src.k, seed);
  if (src.generator == "coherence_capped") return gen_coherence_capped(src.d, src.k, src.m_max, seed, src.max_attempts);
  if (src.generator == "file") return load_dictionary(src.path);
  throw InvalidInput("unknown dictionary generator '" + src.generator + "'");
}

/// The signal handed to the engine, rescaled to budget 1 when an A1
/// expansion is known (bounds are stated for f in A1(D)).
struct TrialSignal {
  Point f;
  std::optional<A1Element> a1;
};

inline TrialSignal make_signal(const SignalSource& src, const Dictionary& dict, std::uint64_t seed) {
  std::optional<A1Element> el;
  Point raw;
  if (src.kind == "random_a1") {
    el = random_a1(dict, src.sparsity, src.budget, src.decay, seed);
  } else if (src.kind == "element") {
    if (src.index >= dict.size()) throw InvalidInput("spec: signal.index out of range");
    el = make_a1(dict, {src.index}, {1.0}, 1.0);
  } else {
    SignalFile file = load_signal(src.path, &dict);
    el = std::move(file.a1);
    raw = std::move(file.point);
  }
  if (!el) {
    if (raw.dim() != dict.dim()) throw InvalidInput("signal file dimension does not match the dictionary");
    return TrialSignal{std::move(raw), std::nullopt};
  }
  const double b = el->budget;
  if (b != 1.0) {
    for (double& c : el->coeffs) c /= b;
    el->budget = 1.0;
    el->point = Point(dict.dim());
    for (std::size_t i = 0; i < el->support.size(); ++i) el->point.axpy(el->coeffs[i], dict[el->support[i]]);
  }
  Point f = el->point;
  return TrialSignal{std::move(f), std::move(el)};
}

// ---------------------------------------------------------------------------
// Bound columns

struct BoundColumnValues {
  bool applicable = false;
  std::string reason;
  std::vector<std::optional<double>> values;  // per record; nullopt = not applicable at that m
};

inline BoundColumnValues bound_column(BoundColumn which, const RunTrace& trace, const Dictionary& dict, bool in_a1,
                                      BetaSource beta_source, std::string* beta_note = nullptr) {
  BoundColumnValues out;
  const GreedyConfig& c = trace.config;
  const Variant v = c.variant;
  const double m_coh = dict.size() >= 2 ? *dict.cached_coherence() : 0.0;
  auto na = [&](std::string why) {
    out.applicable = false;
    out.reason = std::move(why);
    out.values.assign(trace.records.size(), std::nullopt);
    return out;
  };
  if (!in_a1) return na("signal has no certified A1(D) expansion");
  const auto t_const = c.tau.constant_value();

  switch (which) {
    case BoundColumn::thm1: {
      if (!is_block_family(v)) return na("thm1 applies to WSGA/SGA/PGA/WGA only");
      if (!t_const || !(*t_const > 0.0)) return na("thm1 needs a constant weakness t > 0");
      if (!within_incoherence_regime(m_coh, c.s)) return na("thm1 needs s <= 1/(2M)");
      out.applicable = true;
      for (const auto& r : trace.records)
        out.values.push_back(r.m >= 2 ? std::optional<double>(thm1_wsga_bound(r.m, c.s, m_coh, *t_const)) : std::nullopt);
      return out;
    }
    case BoundColumn::thm2: {
      if (!(v == Variant::PGA || v == Variant::WGA)) return na("thm2 applies to PGA/WGA only");
      for (double t : c.tau.values())
        if (!(t > 0.0)) return na("thm2 needs every t_k > 0");
      const std::size_t horizon = std::max<std::size_t>(trace.records.size(), c.tau.values().size());
      if (!c.tau.nonincreasing_through(horizon)) return na("thm2 needs a nonincreasing weakness sequence");
      out.applicable = true;
      for (const auto& r : trace.records) out.values.push_back(gamma_upper(r.m, c.tau, 1.0));
      return out;
    }
    case BoundColumn::thm3: {
      if (!(v == Variant::WOSGA || v == Variant::OGA || v == Variant::WOGA)) return na("thm3 applies to WOSGA/OGA/WOGA only");
      if (!t_const || !(*t_const > 0.0)) return na("thm3 needs a constant weakness t > 0");
      if (!within_incoherence_regime(m_coh, c.s)) return na("thm3 needs s <= 1/(2M)");
      out.applicable = true;
      for (const auto& r : trace.records) out.values.push_back(thm3_wosga_bound(r.m, c.s, *t_const));
      return out;
    }
    case BoundColumn::thm4: {
      if (!uses_threshold(v)) return na("thm4 applies to WOSGAT/MWOGA only");
      if (!t_const || !(*t_const > 0.0)) return na("thm4 needs a constant weakness t > 0");
      double beta = bessel_from_coherence(m_coh, c.s).beta;
      std::string note = "prop1";
      if (beta_source == BetaSource::exhaustive) {
        try {
          beta = bessel_constant(dict, std::min(c.s, dict.size())).beta;
          note = "exhaustive";
        } catch (const CapacityError& e) {
          note = std::string("prop1 (exhaustive infeasible: ") + e.what() + ")";
        }
      }
      if (beta_note) *beta_note = note;
      beta = std::min(beta, 1.0);
      out.applicable = true;
      std::vector<std::size_t> s_list;
      for (const auto& r : trace.records) {
        s_list.push_back(r.s_m);
        out.values.push_back(thm4_wosgat_bound(s_list, *t_const, beta));
      }
      return out;
    }
  }
  return na("unknown bound");
}

// ---------------------------------------------------------------------------
// Reports

struct BoundSummary {
  bool applicable = false;
  std::string reason;
  double max_ratio = 0.0;  // max residual / bound over applicable rows
  std::size_t violations = 0;
  std::size_t rows_checked = 0;
  std::string beta_source;
};

struct TrialResult {
  std::size_t trial = 0;
  RunTrace trace;
  std::map<BoundColumn, BoundColumnValues> columns;
};

struct RunResult {
  RunSpec spec;
  std::vector<TrialResult> trials;
  std::map<BoundColumn, BoundSummary> bounds;
  std::map<std::string, std::size_t> halt_reasons;
  double wall_time_s = 0.0;
  std::string csv_path;
  std::string csv_text;
};

struct ExperimentResult {
  std::vector<RunResult> runs;
  std::string summary_path;
  std::size_t total_violations = 0;
};

inline std::string csv_header(const RunSpec& run) {
  std::string h = "run_id,variant,trial,m,s_m,selected_indices,residual_norm,residual_norm_before,projection_norm";
  for (BoundColumn b : kAllBoundColumns)
    if (std::find(run.bounds.begin(), run.bounds.end(), b) != run.bounds.end()) h += std::string(",bound_") + to_string(b);
  return h + ",halt_reason\n";
}

inline void append_csv_rows(std::string& out, const RunSpec& run, const TrialResult& tr) {
  for (std::size_t i = 0; i < tr.trace.records.size(); ++i) {
    const auto& r = tr.trace.records[i];
    std::string sel;
    for (std::size_t j = 0; j < r.selected.size(); ++j) sel += (j ? ";" : "") + std::to_string(r.selected[j]);
    out += run.id + ',' + to_string(run.config.variant) + ',' + std::to_string(tr.trial) + ',' + std::to_string(r.m) +
           ',' + std::to_string(r.s_m) + ',' + sel + ',' + fmt17(r.residual_norm_after) + ',' +
           fmt17(r.residual_norm_before) + ',' + fmt17(r.projection_norm);
    for (BoundColumn b : kAllBoundColumns) {
      if (std::find(run.bounds.begin(), run.bounds.end(), b) == run.bounds.end()) continue;
      const auto& col = tr.columns.at(b);
      out += ',';
      out += col.values[i] ? fmt17(*col.values[i]) : std::string("NA");
    }
    out += ',';
    if (r.halt_reason) out += to_string(*r.halt_reason);
    out += '\n';
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << text;
  if (!os) throw IoError("write failed: " + path);
}

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory " + dir);
}

inline nlohmann::json summary_json(const ExperimentResult& res) {
  nlohmann::json j;
  j["total_violations"] = res.total_violations;
  j["runs"] = nlohmann::json::array();
  for (const auto& r : res.runs) {
    nlohmann::json jr;
    jr["id"] = r.spec.id;
    jr["variant"] = to_string(r.spec.config.variant);
    jr["s"] = r.spec.config.s;
    jr["tau"] = r.spec.config.tau.values();
    jr["trials"] = r.trials.size();
    if (r.spec.bound_scale != 1.0) jr["bound_scale"] = r.spec.bound_scale;
    jr["csv"] = r.csv_path;
    jr["wall_time_s"] = r.wall_time_s;
    jr["halt_reasons"] = r.halt_reasons;
    nlohmann::json jb = nlohmann::json::object();
    for (const auto& [b, s] : r.bounds) {
      nlohmann::json e;
      e["applicable"] = s.applicable;
      if (s.applicable) {
        e["max_ratio"] = s.max_ratio;
        e["violations"] = s.violations;
        e["rows_checked"] = s.rows_checked;
        if (!s.beta_source.empty()) e["beta"] = s.beta_source;
      } else {
        e["reason"] = s.reason;
      }
      jb[to_string(b)] = e;
    }
    jr["bounds"] = jb;
    j["runs"].push_back(jr);
  }
  return j;
}

/// Runs every [run] over every trial, writes <output_dir>/<run_id>.csv and
/// <output_dir>/summary.json. When `write_files` is false nothing touches the
/// filesystem (CSV text is still assembled in the result).
inline ExperimentResult run_experiment(const ExperimentSpec& spec, bool write_files = true,
                                       std::ostream* log = &std::cerr) {
  validate(spec);
  if (write_files) ensure_dir(spec.output_dir);

  const bool redraw = is_random_generator(spec.dictionary.generator) && spec.dictionary.per_trial;
  std::optional<Dictionary> shared;
  if (!redraw) shared = make_dictionary(spec.dictionary, spec.dictionary.seed);

  ExperimentResult res;
  for (const auto& run : spec.runs) {
    RunResult rr;
    rr.spec = run;
    rr.csv_text = csv_header(run);
    const auto start = std::chrono::steady_clock::now();
    for (BoundColumn b : run.bounds) rr.bounds[b];

    for (std::size_t trial = 0; trial < spec.trials; ++trial) {
      const Dictionary dict =
          redraw ? make_dictionary(spec.dictionary, trial_seed(spec.dictionary.seed, spec.seed_stride, trial)) : *shared;
      const TrialSignal sig = make_signal(spec.signal, dict, trial_seed(spec.signal.seed, spec.seed_stride, trial));

      TrialResult tr;
      tr.trial = trial;
      tr.trace = run_greedy(run.config, dict, sig.f);
      for (BoundColumn b : run.bounds) {
        std::string beta_note;
        auto col = bound_column(b, tr.trace, dict, sig.a1.has_value(), run.beta, &beta_note);
        if (run.bound_scale != 1.0)
          for (auto& v : col.values)
            if (v) *v *= run.bound_scale;
        BoundSummary& bs = rr.bounds[b];
        bs.applicable = col.applicable;
        bs.reason = col.reason;
        if (!beta_note.empty()) bs.beta_source = beta_note;
        for (std::size_t i = 0; i < col.values.size(); ++i) {
          if (!col.values[i]) continue;
          const double residual = tr.trace.records[i].residual_norm_after;
          ++bs.rows_checked;
          bs.max_ratio = std::max(bs.max_ratio, residual / *col.values[i]);
          if (residual > *col.values[i]) ++bs.violations;
        }
        tr.columns.emplace(b, std::move(col));
      }
      ++rr.halt_reasons[to_string(tr.trace.halt_reason)];
      append_csv_rows(rr.csv_text, run, tr);
      if (write_files && spec.write_traces) {
        write_text_file(spec.output_dir + "/" + run.id + "_trial" + std::to_string(trial) + ".json",
                        trace_to_json(tr.trace));
      }
      rr.trials.push_back(std::move(tr));
    }
    rr.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& [b, s] : rr.bounds) {
      if (!s.applicable && log) *log << "run " << run.id << ": bound " << to_string(b) << " not applicable: " << s.reason << '\n';
      res.total_violations += s.violations;
    }
    if (write_files) {
      rr.csv_path = spec.output_dir + "/" + run.id + ".csv";
      write_text_file(rr.csv_path, rr.csv_text);
    }
    res.runs.push_back(std::move(rr));
  }
  if (write_files) {
    res.summary_path = spec.output_dir + "/summary.json";
    write_text_file(res.summary_path, summary_json(res).dump(2) + "\n");
  }
  return res;
}

// ---------------------------------------------------------------------------
// Equal-term comparison: PGA for N iterations vs SGA(s) for m iterations,
// s = m = sqrt(N).

struct ComparisonRow {
  std::size_t n = 0, s = 0, m = 0, trial = 0;
  double pga_error = 0.0;
  double sga_error = 0.0;
  std::optional<ExponentComparison> exponents;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::string csv_text;
  std::string csv_path;
};

inline std::size_t exact_sqrt(std::size_t n) {
  auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  if (r * r != n) throw InvalidInput("compare: N = " + std::to_string(n) + " is not a perfect square");
  return r;
}

inline std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "N,s,m,trial,pga_error,sga_error,theta,pga_exp,sga_exp,sga_wins\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + ',' + std::to_string(r.s) + ',' + std::to_string(r.m) + ',' + std::to_string(r.trial) +
           ',' + fmt17(r.pga_error) + ',' + fmt17(r.sga_error) + ',';
    if (r.exponents) {
      out += fmt17(r.exponents->theta) + ',' + fmt17(r.exponents->pga_exp) + ',' + fmt17(r.exponents->sga_exp) + ',' +
             (r.exponents->sga_wins ? "true" : "false");
    } else {
      out += "NA,NA,NA,NA";
    }
    out += '\n';
  }
  return out;
}

inline ComparisonTable compare_algorithms(const ExperimentSpec& spec, bool write_files = true) {
  validate(spec, false);
  if (spec.compare_n.empty()) throw InvalidInput("spec: compare needs compare.N");
  const bool redraw = is_random_generator(spec.dictionary.generator) && spec.dictionary.per_trial;
  std::optional<Dictionary> shared;
  if (!redraw) shared = make_dictionary(spec.dictionary, spec.dictionary.seed);

  ComparisonTable table;
  for (std::size_t n : spec.compare_n) {
    if (n < 1) throw InvalidInput("compare: N must be >= 1");
    const std::size_t s = exact_sqrt(n);
    for (std::size_t trial = 0; trial < spec.trials; ++trial) {
      const Dictionary dict =
          redraw ? make_dictionary(spec.dictionary, trial_seed(spec.dictionary.seed, spec.seed_stride, trial)) : *shared;
      const TrialSignal sig = make_signal(spec.signal, dict, trial_seed(spec.signal.seed, spec.seed_stride, trial));

      GreedyConfig pga = GreedyConfig::of(Variant::PGA);
      pga.max_iter = n;
      GreedyConfig sga = GreedyConfig::of(Variant::SGA, s);
      sga.max_iter = s;
      const RunTrace tp = run_greedy(pga, dict, sig.f);
      const RunTrace ts = run_greedy(sga, dict, sig.f);

      ComparisonRow row;
      row.n = n;
      row.s = s;
      row.m = s;
      row.trial = trial;
      row.pga_error = norm(tp.final_residual);
      row.sga_error = norm(ts.final_residual);
      const double m_coh = dict.size() >= 2 ? *dict.cached_coherence() : 0.0;
      if (within_incoherence_regime(m_coh, s)) row.exponents = exponent_comparison(m_coh, s);
      table.rows.push_back(row);
    }
  }
  table.csv_text = comparison_csv(table.rows);
  if (write_files) {
    ensure_dir(spec.output_dir);
    table.csv_path = spec.output_dir + "/compare.csv";
    write_text_file(table.csv_path, table.csv_text);
  }
  return table;
}

}  // namespace sgreedy
