#pragma once

// Elements of A1(D, B): finite expansions f = sum c_k g_k with sum |c_k| <= B.
//
// The budget B carried by an A1Element is an upper bound on the true
// A1(D) norm of f (which is an infimum over all representations and is
// never computed here). Every error bound scales with B, so overestimating
// it only loosens the bounds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "sgreedy/dictionary.hpp"
#include "sgreedy/errors.hpp"
#include "sgreedy/hilbert.hpp"
#include "sgreedy/rng.hpp"

namespace sgreedy {

inline constexpr double kBudgetTol = 1e-12;

struct A1Element {
  std::vector<std::size_t> support;
  std::vector<double> coeffs;
  double budget = 1.0;
  Point point;

  double l1() const {
    double s = 0.0;
    for (double c : coeffs) s += std::abs(c);
    return s;
  }
};

inline A1Element make_a1(const Dictionary& dict, std::vector<std::size_t> support, std::vector<double> coeffs,
                         double budget = 1.0) {
  if (support.size() != coeffs.size()) throw InvalidInput("make_a1: support and coeffs differ in length");
  if (!(budget > 0.0) || !std::isfinite(budget)) throw InvalidInput("make_a1: budget must be positive");
  std::vector<std::size_t> sorted = support;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidInput("make_a1: support indices must be distinct");
  for (std::size_t k : support)
    if (k >= dict.size()) throw InvalidInput("make_a1: index " + std::to_string(k) + " out of range");
  for (double c : coeffs)
    if (!std::isfinite(c)) throw InvalidInput("make_a1: non-finite coefficient");

  A1Element el{std::move(support), std::move(coeffs), budget, Point(dict.dim())};
  const double l1 = el.l1();
  if (l1 > budget * (1.0 + kBudgetTol)) {
    std::ostringstream msg;
    msg << std::setprecision(17) << "make_a1: sum |c_k| = " << l1 << " exceeds budget " << budget << " by "
        << l1 - budget;
    throw InvalidInput(msg.str());
  }
  for (std::size_t i = 0; i < el.support.size(); ++i) el.point.axpy(el.coeffs[i], dict[el.support[i]]);
  return el;
}

struct FlatDecay {};
struct GeometricDecay {
  double rho = 0.5;
};
struct PowerDecay {
  double p = 1.0;
};
using Decay = std::variant<FlatDecay, GeometricDecay, PowerDecay>;

/// Unnormalized magnitude of the k-th (0-based) coefficient.
inline double decay_weight(const Decay& decay, std::size_t k) {
  return std::visit(
      [k](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, FlatDecay>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, GeometricDecay>) {
          return std::pow(d.rho, static_cast<double>(k));
        } else {
          return std::pow(static_cast<double>(k + 1), -d.p);
        }
      },
      decay);
}

/// Parses "flat", "geometric:RHO" or "power:P".
inline Decay parse_decay(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  auto param = [&]() {
    if (colon == std::string::npos) throw InvalidInput("decay '" + text + "' needs a parameter");
    try {
      return std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw InvalidInput("decay '" + text + "': bad parameter");
    }
  };
  if (kind == "flat") return FlatDecay{};
  if (kind == "geometric") {
    const double rho = param();
    if (!(rho > 0.0 && rho <= 1.0)) throw InvalidInput("geometric decay needs 0 < rho <= 1");
    return GeometricDecay{rho};
  }
  if (kind == "power") {
    const double p = param();
    if (!(p >= 0.0)) throw InvalidInput("power decay needs p >= 0");
    return PowerDecay{p};
  }
  throw InvalidInput("unknown decay profile '" + text + "'");
}

inline std::string to_string(const Decay& decay) {
  std::ostringstream os;
  os << std::setprecision(17);
  std::visit(
      [&os](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, FlatDecay>) os << "flat";
        else if constexpr (std::is_same_v<T, GeometricDecay>) os << "geometric:" << d.rho;
        else os << "power:" << d.p;
      },
      decay);
  return os.str();
}

/// Random element with `sparsity` distinct uniformly chosen atoms, magnitudes
/// from the decay profile (nonincreasing along the support list), normalized
/// to sum |c| = B, and independent random signs.
inline A1Element random_a1(const Dictionary& dict, std::size_t sparsity, double budget, const Decay& decay,
                           std::uint64_t seed) {
  if (sparsity > dict.size()) throw InvalidInput("random_a1: sparsity exceeds dictionary size");
  if (sparsity == 0) throw InvalidInput("random_a1: sparsity must be >= 1");
  if (!(budget > 0.0)) throw InvalidInput("random_a1: budget must be positive");
  Rng rng(seed);

  std::vector<std::size_t> pool(dict.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  for (std::size_t i = 0; i < sparsity; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  std::vector<std::size_t> support(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(sparsity));

  std::vector<double> mags(sparsity);
  for (std::size_t k = 0; k < sparsity; ++k) mags[k] = decay_weight(decay, k);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double total = 0.0;
  for (double m : mags) total += m;
  std::vector<double> coeffs(sparsity);
  for (std::size_t k = 0; k < sparsity; ++k) coeffs[k] = (rng.coin() ? -1.0 : 1.0) * budget * mags[k] / total;
  return make_a1(dict, std::move(support), std::move(coeffs), budget);
}

// ---------------------------------------------------------------------------
// Signal files. Two forms:
//   bare point:   "d" then d reals
//   expansion:    "a1 n", n lines "index coeff", then "budget B"

struct SignalFile {
  Point point;
  std::optional<A1Element> a1;
};

inline void write_point(std::ostream& os, const Point& p) {
  os << p.dim() << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < p.dim(); ++i) os << p[i] << '\n';
}

inline void write_a1(std::ostream& os, const A1Element& el) {
  os << "a1 " << el.support.size() << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < el.support.size(); ++i) os << el.support[i] << ' ' << el.coeffs[i] << '\n';
  os << "budget " << el.budget << '\n';
}

/// An expansion needs the dictionary to synthesize its point; a bare point
/// does not.
inline SignalFile read_signal(std::istream& is, const Dictionary* dict) {
  std::string head;
  if (!(is >> head)) throw InvalidInput("signal file: empty");
  if (head == "a1") {
    std::size_t n = 0;
    if (!(is >> n)) throw InvalidInput("signal file: bad 'a1' header");
    std::vector<std::size_t> support(n);
    std::vector<double> coeffs(n);
    for (std::size_t i = 0; i < n; ++i)
      if (!(is >> support[i] >> coeffs[i])) throw InvalidInput("signal file: truncated term list");
    std::string tag;
    double budget = 0.0;
    if (!(is >> tag >> budget) || tag != "budget") throw InvalidInput("signal file: missing 'budget' line");
    if (dict == nullptr) throw InvalidInput("signal file: an a1 expansion needs a dictionary");
    auto el = make_a1(*dict, std::move(support), std::move(coeffs), budget);
    Point p = el.point;
    return SignalFile{std::move(p), std::move(el)};
  }
  std::size_t d = 0;
  try {
    d = std::stoul(head);
  } catch (const std::exception&) {
    throw InvalidInput("signal file: expected a dimension or 'a1', got '" + head + "'");
  }
  std::vector<double> v(d);
  for (auto& x : v)
    if (!(is >> x)) throw InvalidInput("signal file: truncated point");
  return SignalFile{Point(std::move(v)), std::nullopt};
}

inline SignalFile load_signal(const std::string& path, const Dictionary* dict) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  return read_signal(is, dict);
}

}  // namespace sgreedy
