#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "sgreedy/dictionary.hpp"

using namespace sgreedy;

namespace {

const double kH = 1 / std::sqrt(2.0);

Dictionary e1_and_diagonal() { return Dictionary({Point{1, 0}, Point{kH, kH}}); }

}  // namespace

TEST(DictionaryType, RejectsNonUnitAndDuplicates) {
  EXPECT_THROW(Dictionary({Point{1, 1}}), InvalidInput);
  EXPECT_THROW(Dictionary({Point{1, 0}, Point{-1, 0}}), InvalidInput);
  EXPECT_THROW(Dictionary({Point{1, 0}, Point{1, 0, 0}}), InvalidInput);
  EXPECT_THROW(Dictionary(std::vector<Point>{}), InvalidInput);
  EXPECT_NO_THROW(Dictionary({Point{1, 0}}));
}

TEST(Coherence, Examples) {
  EXPECT_EQ(coherence(gen_orthonormal(5)), 0.0);
  EXPECT_NEAR(coherence(gen_two_ortho_bases(4)), 0.5, 1e-15);
  EXPECT_NEAR(coherence(e1_and_diagonal()), kH, 1e-15);
}

TEST(Coherence, SingletonRejected) { EXPECT_THROW(coherence(Dictionary({Point{1, 0}})), InvalidInput); }

TEST(TwoOrthoBases, Examples) {
  const auto d2 = gen_two_ortho_bases(2);
  EXPECT_EQ(d2.size(), 4u);
  EXPECT_NEAR(coherence(d2), kH, 1e-15);
  EXPECT_NEAR(coherence(gen_two_ortho_bases(4)), 0.5, 1e-15);
  EXPECT_NEAR(coherence(gen_two_ortho_bases(16)), 0.25, 1e-15);
  EXPECT_NEAR(coherence(gen_two_ortho_bases(128)), 1 / std::sqrt(128.0), 1e-15);
  EXPECT_THROW(gen_two_ortho_bases(6), InvalidInput);
  EXPECT_THROW(gen_two_ortho_bases(0), InvalidInput);
}

TEST(Bessel, Examples) {
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto cert = bessel_constant(gen_orthonormal(4), n);
    EXPECT_NEAR(cert.beta, 1.0, 1e-12);
    EXPECT_EQ(cert.witness_subset.size(), n);
    EXPECT_EQ(cert.method, BesselMethod::exhaustive);
  }
  const auto cert = bessel_constant(e1_and_diagonal(), 2);
  EXPECT_NEAR(cert.beta, 1.0 / (1.0 + kH), 1e-10);
  EXPECT_NEAR(cert.beta, 0.58579, 1e-5);
  EXPECT_EQ(cert.witness_subset, (std::vector<std::size_t>{0, 1}));
}

TEST(Bessel, Errors) {
  EXPECT_THROW(bessel_constant(gen_orthonormal(3), 4), InvalidInput);
  EXPECT_THROW(bessel_constant(gen_orthonormal(3), 0), InvalidInput);
  // binomial(40, 10) is far above the default cap.
  EXPECT_THROW(bessel_constant(gen_random_unit(8, 40, 1), 10), CapacityError);
  EXPECT_THROW(bessel_constant(gen_orthonormal(6), 3, 10), CapacityError);
  EXPECT_NO_THROW(bessel_constant(gen_orthonormal(6), 3, 20));
}

TEST(Stability, Examples) {
  EXPECT_NEAR(stability_constant(gen_orthonormal(4), 2), 1.0, 1e-12);
  EXPECT_NEAR(stability_constant(e1_and_diagonal(), 2), 1.0 + kH, 1e-10);
}

TEST(Stability, GershgorinBoundOnRandomDictionaries) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto dict = gen_random_unit(6, 9, seed);
    const double m = coherence(dict);
    for (std::size_t n = 1; n <= 4; ++n)
      EXPECT_LE(stability_constant(dict, n), 1.0 + m * static_cast<double>(n - 1) + 1e-10);
  }
}

TEST(Rip, Examples) {
  EXPECT_NEAR(rip_delta(gen_orthonormal(4), 2), 0.0, 1e-12);
  EXPECT_NEAR(rip_delta(e1_and_diagonal(), 2), kH, 1e-10);
  const auto dict = gen_random_unit(8, 12, 17);
  EXPECT_NEAR(rip_delta(dict, 3), oracle::subset_extremes_bitmask(dict, 3).delta, 1e-10);
}

TEST(Bessel, LowerBoundsHoldInstancewise) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const std::size_t k = 4 + seed % 11;  // 5..14
    const auto dict = gen_random_unit(6, k, 1000 + seed);
    const double m = coherence(dict);
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto cert = bessel_constant(dict, n);
      EXPECT_GE(cert.beta, bessel_from_coherence(m, n).beta - 1e-10);
      EXPECT_GE(cert.beta, 1.0 / stability_constant(dict, n) - 1e-10);
      EXPECT_GE(cert.beta, bessel_from_rip(rip_delta(dict, n), n).beta - 1e-10);
      const auto ref = oracle::subset_extremes_bitmask(dict, n);
      EXPECT_NEAR(cert.beta, 1.0 / ref.max_lambda, 1e-10);
    }
  }
}

// The Bessel inequality itself: ||P f||^2 >= beta * sum <f, psi_i>^2 on the
// witness subset, for random f.
TEST(Bessel, DefinitionHoldsOnWitness) {
  const auto dict = gen_random_unit(5, 8, 23);
  const auto cert = bessel_constant(dict, 3);
  Rng rng(4);
  for (int k = 0; k < 200; ++k) {
    const Point f = oracle::random_point(5, rng);
    const auto elems = dict.select(cert.witness_subset);
    const auto p = project_span(f, std::span<const Point* const>(elems));
    double sum = 0.0;
    for (const Point* g : elems) sum += inner(f, *g) * inner(f, *g);
    EXPECT_GE(inner(p.projection, p.projection), cert.beta * sum - 1e-12);
  }
}

TEST(DetSandwich, Examples) {
  const auto ortho = gen_orthonormal(4);
  const std::vector<std::size_t> sub = {0, 2, 3};
  const auto chk = check_det_sandwich(ortho, sub, std::vector<double>{0.3, -2.0, 1.5});
  EXPECT_TRUE(chk.lower_ok);
  EXPECT_TRUE(chk.upper_ok);
  EXPECT_NEAR(chk.ratio, 1.0, 1e-15);

  const auto single = check_det_sandwich(gen_two_ortho_bases(4), std::vector<std::size_t>{5}, std::vector<double>{1.0});
  EXPECT_NEAR(single.ratio, 1.0, 1e-15);
  EXPECT_TRUE(single.lower_ok && single.upper_ok);

  EXPECT_THROW(check_det_sandwich(ortho, std::vector<std::size_t>{}, std::vector<double>{}), InvalidInput);
  EXPECT_THROW(check_det_sandwich(ortho, std::vector<std::size_t>{1, 1}, std::vector<double>{1, 1}), InvalidInput);
}

TEST(DetSandwich, RandomSweepInIncoherentRegime) {
  for (const auto& dict : {gen_coherence_capped(32, 64, 0.3, 11, 1000000), gen_two_ortho_bases(32)}) {
    const double m = coherence(dict);
    const std::size_t s_max = static_cast<std::size_t>(std::floor(1.0 / (2.0 * m)));
    ASSERT_GE(s_max, 1u);
    Rng rng(12);
    for (int draw = 0; draw < 1000; ++draw) {
      const std::size_t s = 1 + rng.below(s_max);
      std::vector<std::size_t> pool(dict.size());
      for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
      for (std::size_t i = 0; i < s; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
      std::vector<std::size_t> sub(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(s));
      std::vector<double> c(s);
      for (auto& x : c) x = rng.normal();
      const auto chk = check_det_sandwich(dict, sub, c);
      ASSERT_TRUE(chk.lower_ok && chk.upper_ok) << dict.id() << " draw " << draw;
    }
  }
}

TEST(RandomUnit, DeterministicAndUnitNorm) {
  const auto a = gen_random_unit(64, 128, 5);
  const auto b = gen_random_unit(64, 128, 5);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k], b[k]);
    EXPECT_NEAR(norm(a[k]), 1.0, 1e-12);
  }
  EXPECT_LT(coherence(a), 1.0);
}

// Regression data recorded on the first run of the fixed xoshiro256**/Box-Muller
// stream. The band check is loose; the frozen mean is exact.
TEST(RandomUnit, CoherenceRegression) {
  double sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) sum += coherence(gen_random_unit(64, 128, seed));
  const double mean = sum / 20.0;
  const double ref = std::sqrt(2.0 * std::log(128.0) / 64.0);
  EXPECT_GT(mean, 0.75 * ref);
  EXPECT_LT(mean, 1.5 * ref);
  EXPECT_NEAR(mean, 0.48022758602954835, 1e-12);
  EXPECT_NEAR(coherence(gen_random_unit(64, 128, 1)), 0.48964811399683578, 1e-12);
}

TEST(CoherenceCapped, MeetsCap) {
  const auto dict = gen_coherence_capped(16, 8, 0.5, 3, 100000);
  EXPECT_EQ(dict.size(), 8u);
  EXPECT_LE(coherence(dict), 0.5);
  for (const auto& g : dict.elements()) EXPECT_NEAR(norm(g), 1.0, 1e-12);

  const auto square = gen_coherence_capped(6, 6, 0.9, 4, 100000);
  EXPECT_LE(coherence(square), 0.9);
}

TEST(CoherenceCapped, CrowdedSphereIsCapacityError) {
  try {
    gen_coherence_capped(4, 50, 0.01, 1, 2000);
    FAIL() << "expected CapacityError";
  } catch (const CapacityError& e) {
    EXPECT_NE(std::string(e.what()).find("of 50"), std::string::npos);
  }
  EXPECT_THROW(gen_coherence_capped(4, 2, 1.0, 1, 10), InvalidInput);
  EXPECT_THROW(gen_coherence_capped(4, 2, 0.0, 1, 10), InvalidInput);
}

TEST(DictionaryFile, RoundTripIsBitExact) {
  const auto dict = gen_random_unit(7, 9, 31);
  std::stringstream ss;
  write_dictionary(ss, dict);
  const auto back = read_dictionary(ss);
  ASSERT_EQ(back.size(), dict.size());
  for (std::size_t k = 0; k < dict.size(); ++k) EXPECT_EQ(back[k], dict[k]);
}

TEST(DictionaryFile, LoaderValidates) {
  std::stringstream bad_norm("2 1\n1 1\n");
  EXPECT_THROW(read_dictionary(bad_norm), InvalidInput);
  std::stringstream dup("2 2\n1 0\n1 0\n");
  EXPECT_THROW(read_dictionary(dup), InvalidInput);
  std::stringstream truncated("2 2\n1 0\n");
  EXPECT_THROW(read_dictionary(truncated), InvalidInput);
  std::stringstream header("x\n");
  EXPECT_THROW(read_dictionary(header), InvalidInput);
  EXPECT_THROW(load_dictionary("/nonexistent/dir/file.dict"), IoError);
}
