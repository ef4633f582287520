#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sgreedy/errors.hpp"
#include "sgreedy/hilbert.hpp"
#include "sgreedy/rng.hpp"

namespace sgreedy {

inline constexpr double kUnitNormTol = 1e-12;
inline constexpr std::uint64_t kDefaultEnumerationCap = 200000;

/// Ordered, immutable list of unit-norm elements of R^d.
///
/// Construction validates unit norms and that no two elements coincide up
/// to sign, and computes the coherence eagerly.
class Dictionary {
 public:
  Dictionary(std::vector<Point> elements, std::string id = "anonymous") : elements_(std::move(elements)), id_(std::move(id)) {
    if (elements_.empty()) throw InvalidInput("Dictionary: needs at least one element");
    dim_ = elements_.front().dim();
    if (dim_ == 0) throw InvalidInput("Dictionary: zero ambient dimension");
    for (std::size_t k = 0; k < elements_.size(); ++k) {
      const Point& g = elements_[k];
      if (g.dim() != dim_) throw InvalidInput("Dictionary: element " + std::to_string(k) + " has wrong dimension");
      if (!g.is_finite()) throw InvalidInput("Dictionary: element " + std::to_string(k) + " is not finite");
      if (std::abs(norm(g) - 1.0) > kUnitNormTol)
        throw InvalidInput("Dictionary: element " + std::to_string(k) + " is not unit norm");
    }
    if (elements_.size() >= 2) {
      double m = 0.0;
      for (std::size_t i = 0; i < elements_.size(); ++i)
        for (std::size_t j = i + 1; j < elements_.size(); ++j) {
          const double c = std::abs(inner(elements_[i], elements_[j]));
          if (c >= 1.0 - kUnitNormTol)
            throw InvalidInput("Dictionary: elements " + std::to_string(i) + " and " + std::to_string(j) +
                               " coincide up to sign");
          m = std::max(m, c);
        }
      coherence_ = m;
    }
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return elements_.size(); }
  const Point& operator[](std::size_t k) const { return elements_[k]; }
  const std::vector<Point>& elements() const { return elements_; }
  const std::string& id() const { return id_; }

  /// Coherence computed at construction; empty for a singleton.
  std::optional<double> cached_coherence() const { return coherence_; }

  std::vector<const Point*> select(std::span<const std::size_t> indices) const {
    std::vector<const Point*> out;
    out.reserve(indices.size());
    for (std::size_t k : indices) {
      if (k >= elements_.size()) throw InvalidInput("Dictionary: index " + std::to_string(k) + " out of range");
      out.push_back(&elements_[k]);
    }
    return out;
  }

 private:
  std::vector<Point> elements_;
  std::string id_;
  std::size_t dim_ = 0;
  std::optional<double> coherence_;
};

/// M(D): the largest |<g_i, g_j>| over distinct pairs.
inline double coherence(const Dictionary& dict) {
  if (dict.size() < 2) throw InvalidInput("coherence: undefined for fewer than two elements");
  return *dict.cached_coherence();
}

enum class BesselMethod { exhaustive, prop1_lower, prop2_lower };

inline const char* to_string(BesselMethod m) {
  switch (m) {
    case BesselMethod::exhaustive: return "exhaustive";
    case BesselMethod::prop1_lower: return "prop1_lower";
    case BesselMethod::prop2_lower: return "prop2_lower";
  }
  return "?";
}

struct BesselCertificate {
  std::size_t n = 0;
  double beta = 0.0;
  std::vector<std::size_t> witness_subset;
  BesselMethod method = BesselMethod::exhaustive;
};

/// Extreme spectral data over every N-subset Gram matrix.
struct SubsetSpectrum {
  std::size_t n = 0;
  double max_lambda_max = 0.0;                     // stability constant A
  double min_lambda_min = 0.0;
  double rip_delta = 0.0;
  std::vector<std::size_t> max_lambda_witness;     // subset attaining A (and minimal beta)
  std::uint64_t subsets_scanned = 0;
};

inline std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  // Exact with 128-bit intermediates while the running value stays below cap.
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > cap) return cap + 1;
  }
  return static_cast<std::uint64_t>(r);
}

/// Scans all N-subsets in lexicographic order.
inline SubsetSpectrum subset_spectrum(const Dictionary& dict, std::size_t n,
                                      std::uint64_t cap = kDefaultEnumerationCap) {
  const std::size_t k = dict.size();
  if (n < 1 || n > k) throw InvalidInput("subset analysis: need 1 <= N <= K");
  const std::uint64_t count = binomial_capped(k, n, cap);
  if (count > cap) {
    throw CapacityError("subset analysis: binomial(" + std::to_string(k) + ", " + std::to_string(n) +
                        ") exceeds the enumeration cap " + std::to_string(cap) +
                        "; use a randomized audit instead");
  }
  SubsetSpectrum out;
  out.n = n;
  out.min_lambda_min = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> subset(n);
  for (std::size_t i = 0; i < n; ++i) subset[i] = i;
  while (true) {
    const auto eig = eigenvalues_sym(gram(std::span<const Point* const>(dict.select(subset))));
    const double hi = eig.back();
    const double lo = eig.front();
    if (out.subsets_scanned == 0 || hi > out.max_lambda_max) {
      out.max_lambda_max = hi;
      out.max_lambda_witness = subset;
    }
    out.min_lambda_min = std::min(out.min_lambda_min, lo);
    out.rip_delta = std::max(out.rip_delta, std::max(hi - 1.0, 1.0 - lo));
    ++out.subsets_scanned;

    std::size_t i = n;
    while (i > 0 && subset[i - 1] == k - n + (i - 1)) --i;
    if (i == 0) break;
    ++subset[i - 1];
    for (std::size_t j = i; j < n; ++j) subset[j] = subset[j - 1] + 1;
  }
  return out;
}

/// Best (N,beta)-Bessel constant. For a subset with Gram G and b_i = <f,psi_i>,
/// ||P f||^2 = b^T G^{-1} b >= b^T b / lambda_max(G); so beta is the minimum
/// over N-subsets of 1/lambda_max.
inline BesselCertificate bessel_constant(const Dictionary& dict, std::size_t n,
                                         std::uint64_t cap = kDefaultEnumerationCap) {
  const SubsetSpectrum spec = subset_spectrum(dict, n, cap);
  return BesselCertificate{n, 1.0 / spec.max_lambda_max, spec.max_lambda_witness, BesselMethod::exhaustive};
}

/// Smallest A with ||sum c_i psi_i||^2 <= A sum c_i^2 on every N-subset.
inline double stability_constant(const Dictionary& dict, std::size_t n, std::uint64_t cap = kDefaultEnumerationCap) {
  return subset_spectrum(dict, n, cap).max_lambda_max;
}

inline double rip_delta(const Dictionary& dict, std::size_t n, std::uint64_t cap = kDefaultEnumerationCap) {
  return subset_spectrum(dict, n, cap).rip_delta;
}

/// beta = (1 + M (N-1))^{-1}, valid for any M-coherent dictionary.
inline BesselCertificate bessel_from_coherence(double m, std::size_t n) {
  if (m < 0.0 || n < 1) throw InvalidInput("bessel_from_coherence: need M >= 0, N >= 1");
  return BesselCertificate{n, 1.0 / (1.0 + m * static_cast<double>(n - 1)), {}, BesselMethod::prop1_lower};
}

inline BesselCertificate bessel_from_rip(double delta, std::size_t n) {
  if (delta < 0.0) throw InvalidInput("bessel_from_rip: need delta >= 0");
  return BesselCertificate{n, 1.0 / (1.0 + delta), {}, BesselMethod::prop2_lower};
}

struct SandwichCheck {
  bool lower_ok = false;
  bool upper_ok = false;
  double ratio = 0.0;  // ||sum c psi||^2 / sum c^2
};

/// Checks (1 - Ms) sum c^2 <= ||sum c_i psi_i||^2 <= (1 + Ms) sum c^2 with
/// s = |subset| and M the cached coherence (0 for a singleton dictionary).
/// Both sides carry a 1e-12 relative allowance for floating-point roundoff.
inline SandwichCheck check_det_sandwich(const Dictionary& dict, std::span<const std::size_t> subset,
                                        std::span<const double> coeffs) {
  if (subset.empty()) throw InvalidInput("check_det_sandwich: empty subset");
  if (subset.size() != coeffs.size()) throw InvalidInput("check_det_sandwich: subset/coeff length mismatch");
  std::vector<std::size_t> sorted(subset.begin(), subset.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidInput("check_det_sandwich: subset indices must be distinct");

  const double m = dict.cached_coherence().value_or(0.0);
  const double ms = m * static_cast<double>(subset.size());
  Point sum(dict.dim());
  double sq = 0.0;
  const auto elems = dict.select(subset);
  for (std::size_t i = 0; i < subset.size(); ++i) {
    sum.axpy(coeffs[i], *elems[i]);
    sq += coeffs[i] * coeffs[i];
  }
  const double energy = inner(sum, sum);
  constexpr double kSlack = 1e-12;
  SandwichCheck out;
  out.lower_ok = (1.0 - ms) * sq <= energy + kSlack * sq;
  out.upper_ok = energy <= (1.0 + ms) * sq + kSlack * sq;
  out.ratio = sq > 0.0 ? energy / sq : 1.0;
  return out;
}

// ---------------------------------------------------------------------------
// Generators

inline Point random_unit_point(std::size_t d, Rng& rng) {
  while (true) {
    std::vector<double> v(d);
    for (auto& x : v) x = rng.normal();
    Point p(std::move(v));
    const double n = norm(p);
    if (n > 0.0) {
      p *= 1.0 / n;
      return p;
    }
  }
}

/// K independent uniform draws from the unit sphere of R^d.
inline Dictionary gen_random_unit(std::size_t d, std::size_t k, std::uint64_t seed) {
  if (d < 1 || k < 1) throw InvalidInput("gen_random_unit: need d >= 1, K >= 1");
  Rng rng(seed);
  std::vector<Point> elems;
  elems.reserve(k);
  for (std::size_t i = 0; i < k; ++i) elems.push_back(random_unit_point(d, rng));
  return Dictionary(std::move(elems), "random_unit(d=" + std::to_string(d) + ",K=" + std::to_string(k) +
                                          ",seed=" + std::to_string(seed) + ")");
}

inline Dictionary gen_orthonormal(std::size_t d) {
  if (d < 1) throw InvalidInput("gen_orthonormal: need d >= 1");
  std::vector<Point> elems;
  for (std::size_t i = 0; i < d; ++i) {
    Point e(d);
    e[i] = 1.0;
    elems.push_back(std::move(e));
  }
  return Dictionary(std::move(elems), "orthonormal(d=" + std::to_string(d) + ")");
}

/// Identity basis followed by the Sylvester-Hadamard basis scaled by
/// 1/sqrt(d). K = 2d, coherence 1/sqrt(d).
inline Dictionary gen_two_ortho_bases(std::size_t d) {
  if (d < 1 || !std::has_single_bit(d)) throw InvalidInput("gen_two_ortho_bases: d must be a power of 2");
  std::vector<Point> elems;
  elems.reserve(2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    Point e(d);
    e[i] = 1.0;
    elems.push_back(std::move(e));
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t j = 0; j < d; ++j) {
    Point h(d);
    for (std::size_t i = 0; i < d; ++i) h[i] = (std::popcount(i & j) % 2 == 0) ? scale : -scale;
    elems.push_back(std::move(h));
  }
  return Dictionary(std::move(elems), "two_ortho(d=" + std::to_string(d) + ")");
}

/// Rejection sampling on the sphere: a draw is kept only if its |inner|
/// against every kept element is <= m_max.
inline Dictionary gen_coherence_capped(std::size_t d, std::size_t k, double m_max, std::uint64_t seed,
                                       std::uint64_t max_attempts) {
  if (!(m_max > 0.0 && m_max < 1.0)) throw InvalidInput("gen_coherence_capped: need 0 < M_max < 1");
  if (d < 1 || k < 1) throw InvalidInput("gen_coherence_capped: need d >= 1, K >= 1");
  Rng rng(seed);
  std::vector<Point> elems;
  elems.reserve(k);
  std::uint64_t attempts = 0;
  while (elems.size() < k) {
    if (attempts == max_attempts) {
      throw CapacityError("gen_coherence_capped: attempts exhausted after placing " + std::to_string(elems.size()) +
                          " of " + std::to_string(k) + " elements");
    }
    ++attempts;
    Point cand = random_unit_point(d, rng);
    const bool ok = std::all_of(elems.begin(), elems.end(),
                                [&](const Point& g) { return std::abs(inner(g, cand)) <= m_max; });
    if (ok) elems.push_back(std::move(cand));
  }
  std::ostringstream id;
  id << "coherence_capped(d=" << d << ",K=" << k << ",M_max=" << m_max << ",seed=" << seed << ")";
  return Dictionary(std::move(elems), id.str());
}

// ---------------------------------------------------------------------------
// Text format: "d K" then K lines of d reals, printed with 17 significant digits.

inline void write_dictionary(std::ostream& os, const Dictionary& dict) {
  os << dict.dim() << ' ' << dict.size() << '\n';
  os << std::setprecision(17);
  for (const auto& g : dict.elements()) {
    for (std::size_t i = 0; i < g.dim(); ++i) os << (i ? " " : "") << g[i];
    os << '\n';
  }
}

inline Dictionary read_dictionary(std::istream& is, std::string id = "file") {
  std::size_t d = 0, k = 0;
  if (!(is >> d >> k) || d == 0 || k == 0) throw InvalidInput("dictionary file: bad header, expected \"d K\"");
  std::vector<Point> elems;
  elems.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> v(d);
    for (auto& x : v)
      if (!(is >> x)) throw InvalidInput("dictionary file: truncated at element " + std::to_string(j));
    elems.emplace_back(std::move(v));
  }
  return Dictionary(std::move(elems), std::move(id));
}

inline void save_dictionary(const std::string& path, const Dictionary& dict) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_dictionary(os, dict);
  if (!os) throw IoError("write failed: " + path);
}

inline Dictionary load_dictionary(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  return read_dictionary(is, "file:" + path);
}

}  // namespace sgreedy
