#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "json.hpp"
#include "sgreedy/harness.hpp"

using namespace sgreedy;

namespace {

ExperimentSpec parse(const std::string& text) {
  std::istringstream is(text);
  return parse_experiment_spec(is);
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  for (std::string f; std::getline(is, f, ',');) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

const char* kTwoOrthoSpec = R"(
dictionary = two_ortho
dict.d = 64
signal = random_a1
signal.sparsity = 8
signal.B = 1
trials = 4
[run]
id = wosga4
variant = WOSGA
s = 4
t = 1
max_iter = 40
bounds = thm3
)";

}  // namespace

TEST(SpecParse, GlobalAndRunKeys) {
  const auto spec = parse(R"(
# comment
dictionary = coherence_capped   # trailing comment
dict.d = 32
dict.K = 48
dict.M_max = 0.3
signal.decay = geometric:0.5
trials = 3
seed_stride = 7
compare.N = 4, 9
[run]
variant = WOSGAT
s = 3
t = 0.5
policy = weakest_admissible
bounds = thm4
beta = exhaustive
[run]
id = wga
variant = WGA
tau = 1, 0.8, 0.5
projection = full
allow_reselect = false
)");
  EXPECT_EQ(spec.dictionary.generator, "coherence_capped");
  EXPECT_EQ(spec.dictionary.k, 48u);
  EXPECT_EQ(spec.dictionary.m_max, 0.3);
  EXPECT_EQ(to_string(spec.signal.decay), "geometric:0.5");
  EXPECT_EQ(spec.trials, 3u);
  EXPECT_EQ(spec.seed_stride, 7u);
  EXPECT_EQ(spec.compare_n, (std::vector<std::size_t>{4, 9}));
  ASSERT_EQ(spec.runs.size(), 2u);
  EXPECT_EQ(spec.runs[0].id, "run1");
  EXPECT_EQ(spec.runs[0].config.variant, Variant::WOSGAT);
  EXPECT_EQ(spec.runs[0].config.policy, SelectionPolicy::weakest_admissible);
  EXPECT_EQ(spec.runs[0].bounds, (std::vector<BoundColumn>{BoundColumn::thm4}));
  EXPECT_EQ(spec.runs[0].beta, BetaSource::exhaustive);
  EXPECT_EQ(spec.runs[1].id, "wga");
  EXPECT_EQ(spec.runs[1].config.tau.values(), (std::vector<double>{1.0, 0.8, 0.5}));
  EXPECT_EQ(spec.runs[1].config.projection, ProjectionPath::full_resolve);
  EXPECT_FALSE(spec.runs[1].config.allow_reselect);
  EXPECT_NO_THROW(validate(spec));
}

TEST(SpecParse, Errors) {
  EXPECT_THROW(parse("dict.D = 4\n"), InvalidInput);
  EXPECT_THROW(parse("[run]\nwidth = 3\n"), InvalidInput);
  EXPECT_THROW(parse("trials = -1\n"), InvalidInput);
  EXPECT_THROW(parse("trials = 3x\n"), InvalidInput);
  EXPECT_THROW(parse("no equals sign\n"), InvalidInput);
  EXPECT_THROW(parse("[run]\nbounds = thm9\n"), InvalidInput);
  EXPECT_THROW(parse("[run]\nvariant = CoSaMP\n"), InvalidInput);
  EXPECT_THROW(parse("[run]\nbound_scale = 0\n"), InvalidInput);
  EXPECT_THROW(validate(parse("dictionary = lattice\n[run]\n")), InvalidInput);
  EXPECT_THROW(validate(parse("dictionary = random_unit\n[run]\n")), InvalidInput);
  EXPECT_THROW(validate(parse("signal = noise\n[run]\n")), InvalidInput);
  EXPECT_THROW(validate(parse("trials = 0\n[run]\n")), InvalidInput);
  EXPECT_THROW(validate(parse("dictionary = orthonormal\n")), InvalidInput);
  EXPECT_THROW(validate(parse("[run]\nid = a\n[run]\nid = a\n")), InvalidInput);
  EXPECT_THROW(validate(parse("[run]\nvariant = PGA\ns = 2\n")), InvalidInput);
  EXPECT_THROW(load_experiment_spec("/nonexistent/x.spec"), IoError);
}

TEST(RunExperiment, SingleElementUnderPga) {
  const auto spec = parse(R"(
dictionary = orthonormal
dict.d = 8
signal = element
signal.index = 3
[run]
id = pga
variant = PGA
bounds = thm2
)");
  const auto res = run_experiment(spec, false, nullptr);
  ASSERT_EQ(res.runs.size(), 1u);
  const auto rows = lines(res.runs[0].csv_text);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "run_id,variant,trial,m,s_m,selected_indices,residual_norm,residual_norm_before,projection_norm,"
                     "bound_thm2,halt_reason");
  const auto f = fields(rows[1]);
  EXPECT_EQ(f[3], "1");
  EXPECT_EQ(f[5], "3");
  EXPECT_EQ(std::stod(f[6]), 0.0);
  EXPECT_NEAR(std::stod(f[9]), std::pow(2.0, -1.0 / 6.0), 1e-15);
  EXPECT_EQ(f[10], "residual_below_tol");
  // The corollary form B m^{-1/6} at m = 1.
  EXPECT_EQ(pga_bound(std::stoul(f[3])), 1.0);
}

TEST(RunExperiment, TwoOrthoWosgaUnderThm3) {
  const auto res = run_experiment(parse(kTwoOrthoSpec), false, nullptr);
  const auto& run = res.runs[0];
  EXPECT_EQ(res.total_violations, 0u);
  EXPECT_TRUE(run.bounds.at(BoundColumn::thm3).applicable);
  const auto rows = lines(run.csv_text);
  ASSERT_GT(rows.size(), 1u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields(rows[i]);
    const double m = std::stod(f[3]);
    const double r = std::stod(f[6]);
    EXPECT_LE(r * r, 40.5 / (4.0 * m));
  }
}

TEST(RunExperiment, ByteIdenticalReruns) {
  const auto spec = parse(kTwoOrthoSpec);
  EXPECT_EQ(run_experiment(spec, false, nullptr).runs[0].csv_text, run_experiment(spec, false, nullptr).runs[0].csv_text);
}

TEST(RunExperiment, NotApplicableColumns) {
  // s = 8 exceeds 1/(2M) = 4 on the 64-dimensional pair.
  const auto spec = parse(R"(
dictionary = two_ortho
dict.d = 64
signal.sparsity = 8
[run]
id = big
variant = WOSGA
s = 8
max_iter = 5
bounds = thm3, thm4
)");
  std::ostringstream log;
  const auto res = run_experiment(spec, false, &log);
  const auto& b = res.runs[0].bounds;
  EXPECT_FALSE(b.at(BoundColumn::thm3).applicable);
  EXPECT_NE(b.at(BoundColumn::thm3).reason.find("1/(2M)"), std::string::npos);
  EXPECT_FALSE(b.at(BoundColumn::thm4).applicable);
  EXPECT_NE(log.str().find("not applicable"), std::string::npos);
  const auto rows = lines(res.runs[0].csv_text);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields(rows[i]);
    EXPECT_EQ(f[9], "NA");
    EXPECT_EQ(f[10], "NA");
  }
}

TEST(RunExperiment, BareSignalFileGivesNaColumns) {
  const auto dir = std::filesystem::temp_directory_path() / "sgreedy_test_bare";
  std::filesystem::create_directories(dir);
  const std::string sig = (dir / "f.pt").string();
  {
    std::ofstream os(sig);
    write_point(os, Point{0.5, 0.1, 0.2, 0.0});
  }
  const auto spec = parse("dictionary = orthonormal\ndict.d = 4\nsignal = file\nsignal.path = " + sig +
                          "\n[run]\nvariant = OGA\nbounds = thm3\n");
  const auto res = run_experiment(spec, false, nullptr);
  EXPECT_FALSE(res.runs[0].bounds.at(BoundColumn::thm3).applicable);
  EXPECT_EQ(res.runs[0].trials[0].trace.records.size(), 3u);
}

TEST(RunExperiment, BudgetIsNormalized) {
  const auto spec = parse(R"(
dictionary = orthonormal
dict.d = 16
signal.sparsity = 4
signal.B = 5
[run]
variant = OGA
)");
  const auto res = run_experiment(spec, false, nullptr);
  EXPECT_NEAR(res.runs[0].trials[0].trace.initial_norm, 0.5, 1e-15);  // four flat atoms of weight 1/4
}

TEST(RunExperiment, WritesFilesAndSummary) {
  auto spec = parse(kTwoOrthoSpec);
  const auto dir = std::filesystem::temp_directory_path() / "sgreedy_test_out";
  std::filesystem::remove_all(dir);
  spec.output_dir = dir.string();
  spec.write_traces = true;
  const auto res = run_experiment(spec, true, nullptr);
  EXPECT_TRUE(std::filesystem::exists(dir / "wosga4.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "wosga4_trial0.json"));
  std::ifstream is(dir / "summary.json");
  const auto j = nlohmann::json::parse(is);
  EXPECT_EQ(j["total_violations"], 0);
  EXPECT_EQ(j["runs"][0]["bounds"]["thm3"]["violations"], 0);
  EXPECT_LE(j["runs"][0]["bounds"]["thm3"]["max_ratio"].get<double>(), 1.0);
  EXPECT_EQ(j["runs"][0]["trials"], 4);

  spec.output_dir = "/proc/definitely/not/writable";
  EXPECT_THROW(run_experiment(spec, true, nullptr), IoError);
}

TEST(RunExperiment, BoundScaleReportsViolations) {
  std::string text = kTwoOrthoSpec;
  text += "bound_scale = 1e-6\n";
  const auto res = run_experiment(parse(text), false, nullptr);
  EXPECT_GT(res.total_violations, 0u);
}

TEST(Compare, SixteenTermsOnOrthonormal) {
  const auto spec = parse(R"(
dictionary = orthonormal
dict.d = 32
signal.sparsity = 16
signal.seed = 3
trials = 2
compare.N = 16
)");
  const auto table = compare_algorithms(spec, false);
  ASSERT_EQ(table.rows.size(), 2u);
  for (const auto& r : table.rows) {
    EXPECT_EQ(r.s, 4u);
    EXPECT_TRUE(std::isfinite(r.pga_error));
    EXPECT_TRUE(std::isfinite(r.sga_error));
    ASSERT_TRUE(r.exponents.has_value());
    EXPECT_NEAR(r.exponents->theta, 1.0 / 6.0, 1e-15);
    EXPECT_GE(r.exponents->sga_exp, 1.0 / 6.0);
    // On an orthonormal basis both pick the 16 atoms of a flat 16-sparse signal.
    EXPECT_NEAR(r.pga_error, 0.0, 1e-12);
    EXPECT_NEAR(r.sga_error, 0.0, 1e-12);
  }
  EXPECT_EQ(lines(table.csv_text).front(), "N,s,m,trial,pga_error,sga_error,theta,pga_exp,sga_exp,sga_wins");
}

TEST(Compare, SingleTermIsDegenerate) {
  const auto spec = parse("dictionary = random_unit\ndict.d = 16\ndict.K = 40\nsignal.sparsity = 5\ntrials = 3\ncompare.N = 1\n");
  const auto table = compare_algorithms(spec, false);
  for (const auto& r : table.rows) EXPECT_EQ(r.pga_error, r.sga_error);
}

TEST(Compare, RejectsNonSquares) {
  EXPECT_THROW(compare_algorithms(parse("compare.N = 8\n"), false), InvalidInput);
  EXPECT_THROW(compare_algorithms(parse("dictionary = orthonormal\n"), false), InvalidInput);
}
