#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "sgreedy/dictionary.hpp"
#include "sgreedy/signals.hpp"

using namespace sgreedy;

TEST(MakeA1, SingleElement) {
  const auto dict = gen_two_ortho_bases(8);
  const auto el = make_a1(dict, {3}, {1.0}, 1.0);
  EXPECT_EQ(el.point, dict[3]);
  EXPECT_EQ(el.l1(), 1.0);
}

TEST(MakeA1, HandSynthesis) {
  const auto dict = gen_orthonormal(4);
  const auto el = make_a1(dict, {0, 1}, {0.6, 0.4}, 1.0);
  EXPECT_EQ(el.point, (Point{0.6, 0.4, 0, 0}));
}

TEST(MakeA1, BudgetViolationNamesExcess) {
  const auto dict = gen_orthonormal(4);
  try {
    make_a1(dict, {0, 1}, {0.7, 0.4}, 1.0);
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("exceeds budget"), std::string::npos);
  }
}

TEST(MakeA1, BadIndices) {
  const auto dict = gen_orthonormal(4);
  EXPECT_THROW(make_a1(dict, {4}, {0.5}, 1.0), InvalidInput);
  EXPECT_THROW(make_a1(dict, {1, 1}, {0.2, 0.2}, 1.0), InvalidInput);
  EXPECT_THROW(make_a1(dict, {1, 2}, {0.2}, 1.0), InvalidInput);
}

TEST(RandomA1, Examples) {
  const auto dict = gen_random_unit(10, 20, 1);
  const auto one = random_a1(dict, 1, 1.0, FlatDecay{}, 5);
  ASSERT_EQ(one.coeffs.size(), 1u);
  EXPECT_EQ(std::abs(one.coeffs[0]), 1.0);

  const auto flat = random_a1(dict, 4, 1.0, FlatDecay{}, 6);
  for (double c : flat.coeffs) EXPECT_EQ(std::abs(c), 0.25);

  const auto geo = random_a1(dict, 3, 1.0, GeometricDecay{0.5}, 7);
  EXPECT_NEAR(std::abs(geo.coeffs[0]), 4.0 / 7.0, 1e-15);
  EXPECT_NEAR(std::abs(geo.coeffs[1]), 2.0 / 7.0, 1e-15);
  EXPECT_NEAR(std::abs(geo.coeffs[2]), 1.0 / 7.0, 1e-15);

  EXPECT_THROW(random_a1(dict, 21, 1.0, FlatDecay{}, 1), InvalidInput);
  EXPECT_THROW(random_a1(dict, 2, 0.0, FlatDecay{}, 1), InvalidInput);
}

TEST(RandomA1, InvariantsAcrossProfilesAndSeeds) {
  const auto dict = gen_random_unit(12, 30, 2);
  const Decay profiles[] = {FlatDecay{}, GeometricDecay{0.7}, PowerDecay{1.5}, PowerDecay{0.0}};
  for (const auto& decay : profiles) {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      const std::size_t sparsity = 1 + seed % 12;
      const double budget = 0.5 + 0.25 * static_cast<double>(seed % 5);
      const auto el = random_a1(dict, sparsity, budget, decay, seed);
      EXPECT_NEAR(el.l1(), budget, 1e-12);
      for (std::size_t i = 1; i < el.coeffs.size(); ++i)
        EXPECT_GE(std::abs(el.coeffs[i - 1]), std::abs(el.coeffs[i]));
      EXPECT_LE(norm(el.point), budget + 1e-9);
      std::vector<std::size_t> s = el.support;
      std::sort(s.begin(), s.end());
      EXPECT_EQ(std::adjacent_find(s.begin(), s.end()), s.end());
    }
  }
}

TEST(RandomA1, DeterministicPerSeed) {
  const auto dict = gen_random_unit(12, 30, 2);
  const auto a = random_a1(dict, 5, 1.0, PowerDecay{1.0}, 77);
  const auto b = random_a1(dict, 5, 1.0, PowerDecay{1.0}, 77);
  EXPECT_EQ(a.support, b.support);
  EXPECT_EQ(a.coeffs, b.coeffs);
  EXPECT_EQ(a.point, b.point);
}

TEST(Decay, ParseAndPrint) {
  EXPECT_EQ(to_string(parse_decay("flat")), "flat");
  EXPECT_EQ(to_string(parse_decay("geometric:0.5")), "geometric:0.5");
  EXPECT_EQ(to_string(parse_decay("power:2")), "power:2");
  EXPECT_THROW(parse_decay("geometric"), InvalidInput);
  EXPECT_THROW(parse_decay("geometric:1.5"), InvalidInput);
  EXPECT_THROW(parse_decay("zipf:1"), InvalidInput);
}

TEST(SignalFile, ExpansionAndPointForms) {
  const auto dict = gen_random_unit(6, 10, 3);
  const auto el = random_a1(dict, 3, 2.0, GeometricDecay{0.5}, 9);

  std::stringstream a1_text;
  write_a1(a1_text, el);
  const auto back = read_signal(a1_text, &dict);
  ASSERT_TRUE(back.a1.has_value());
  EXPECT_EQ(back.a1->support, el.support);
  EXPECT_EQ(back.a1->coeffs, el.coeffs);
  EXPECT_EQ(back.a1->budget, 2.0);
  EXPECT_EQ(back.point, el.point);

  std::stringstream pt_text;
  write_point(pt_text, el.point);
  const auto bare = read_signal(pt_text, nullptr);
  EXPECT_FALSE(bare.a1.has_value());
  EXPECT_EQ(bare.point, el.point);
}

TEST(SignalFile, Errors) {
  const auto dict = gen_orthonormal(3);
  std::stringstream no_budget("a1 1\n0 0.5\n");
  EXPECT_THROW(read_signal(no_budget, &dict), InvalidInput);
  std::stringstream over("a1 2\n0 0.8\n1 0.8\nbudget 1\n");
  EXPECT_THROW(read_signal(over, &dict), InvalidInput);
  std::stringstream needs_dict("a1 1\n0 0.5\nbudget 1\n");
  EXPECT_THROW(read_signal(needs_dict, nullptr), InvalidInput);
  std::stringstream junk("hello\n");
  EXPECT_THROW(read_signal(junk, nullptr), InvalidInput);
  std::stringstream short_point("3\n1\n2\n");
  EXPECT_THROW(read_signal(short_point, nullptr), InvalidInput);
  EXPECT_THROW(load_signal("/nonexistent/x.sig", nullptr), IoError);
}
