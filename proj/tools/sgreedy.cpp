// sgreedy: command-line front end for the super greedy library.
//
//   sgreedy run <spec-file> [--assert-bounds]
//   sgreedy compare <spec-file>
//   sgreedy audit-dict <dict-file> --N <n>
//   sgreedy gen-dict --kind two_ortho --d 16 [--out file]
//   sgreedy gen-signal --dict file --sparsity 4 [--out file]
//
// Exit codes: 0 success, 2 spec/input error, 3 bound violation (with
// --assert-bounds), 4 I/O error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sgreedy/bounds.hpp"
#include "sgreedy/dictionary.hpp"
#include "sgreedy/harness.hpp"
#include "sgreedy/signals.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSpec = 2;
constexpr int kExitViolation = 3;
constexpr int kExitIo = 4;

template <class F>
void with_output(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream os(path);
  if (!os) throw sgreedy::IoError("cannot open " + path + " for writing");
  write(os);
  if (!os) throw sgreedy::IoError("write failed: " + path);
}

int cmd_run(const std::string& spec_path, bool assert_bounds) {
  const auto spec = sgreedy::load_experiment_spec(spec_path);
  const auto res = sgreedy::run_experiment(spec);
  for (const auto& r : res.runs) {
    std::cout << r.spec.id << " (" << sgreedy::to_string(r.spec.config.variant) << ", s=" << r.spec.config.s
              << "): " << r.trials.size() << " trials -> " << r.csv_path << '\n';
    for (const auto& [b, s] : r.bounds) {
      std::cout << "  bound_" << sgreedy::to_string(b) << ": ";
      if (s.applicable)
        std::cout << s.rows_checked << " rows, max ratio " << sgreedy::fmt17(s.max_ratio) << ", violations "
                  << s.violations << '\n';
      else
        std::cout << "not applicable (" << s.reason << ")\n";
    }
  }
  std::cout << "summary: " << res.summary_path << '\n';
  if (assert_bounds && res.total_violations > 0) {
    std::cerr << "bound domination violated in " << res.total_violations << " rows\n";
    return kExitViolation;
  }
  return kExitOk;
}

int cmd_compare(const std::string& spec_path) {
  const auto spec = sgreedy::load_experiment_spec(spec_path);
  const auto table = sgreedy::compare_algorithms(spec);
  std::cout << table.csv_text;
  std::cerr << "written: " << table.csv_path << '\n';
  return kExitOk;
}

int cmd_audit(const std::string& path, std::size_t n, std::uint64_t cap) {
  const auto dict = sgreedy::load_dictionary(path);
  std::cout << "d " << dict.dim() << "\nK " << dict.size() << '\n';
  if (dict.size() < 2) {
    std::cout << "coherence undefined (K < 2)\n";
  } else {
    const double m = sgreedy::coherence(dict);
    std::cout << "coherence " << sgreedy::fmt17(m) << '\n';
    std::cout << "incoherence_s_max " << (m > 0 ? sgreedy::fmt17(1.0 / (2.0 * m)) : std::string("inf")) << '\n';
    std::cout << "bessel_prop1 " << sgreedy::fmt17(sgreedy::bessel_from_coherence(m, n).beta) << '\n';
  }
  const auto spec = sgreedy::subset_spectrum(dict, n, cap);
  std::cout << "N " << n << "\nsubsets " << spec.subsets_scanned << '\n';
  std::cout << "bessel_exhaustive " << sgreedy::fmt17(1.0 / spec.max_lambda_max) << '\n';
  std::cout << "bessel_witness";
  for (auto i : spec.max_lambda_witness) std::cout << ' ' << i;
  std::cout << '\n';
  std::cout << "stability " << sgreedy::fmt17(spec.max_lambda_max) << '\n';
  std::cout << "rip_delta " << sgreedy::fmt17(spec.rip_delta) << '\n';
  std::cout << "bessel_prop2 " << sgreedy::fmt17(sgreedy::bessel_from_rip(spec.rip_delta, n).beta) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Super greedy approximation: runs, comparisons, dictionary audits"};
  app.require_subcommand(1);

  std::string spec_path;
  bool assert_bounds = false;
  auto* run = app.add_subcommand("run", "Run an experiment spec and write CSV/JSON reports");
  run->add_option("spec", spec_path, "Experiment spec file")->required();
  run->add_flag("--assert-bounds", assert_bounds, "Exit 3 if any empirical error exceeds its bound");

  auto* compare = app.add_subcommand("compare", "PGA vs SGA(s) at equal term counts N = s*m");
  compare->add_option("spec", spec_path, "Experiment spec file with compare.N")->required();

  std::string dict_path;
  std::size_t audit_n = 1;
  std::uint64_t cap = sgreedy::kDefaultEnumerationCap;
  auto* audit = app.add_subcommand("audit-dict", "Coherence and Bessel/stability/RIP certificates");
  audit->add_option("dict", dict_path, "Dictionary file")->required();
  audit->add_option("--N", audit_n, "Subset size")->required();
  audit->add_option("--cap", cap, "Subset enumeration cap");

  std::string kind = "two_ortho", out_path;
  std::size_t d = 16, k = 0, max_attempts = 1000000;
  double m_max = 0.5;
  std::uint64_t seed = 1;
  auto* gen_dict = app.add_subcommand("gen-dict", "Generate a dictionary file");
  gen_dict->add_option("--kind", kind, "orthonormal | random_unit | two_ortho | coherence_capped");
  gen_dict->add_option("--d", d, "Ambient dimension");
  gen_dict->add_option("--K", k, "Number of elements (random kinds)");
  gen_dict->add_option("--M-max", m_max, "Coherence cap (coherence_capped)");
  gen_dict->add_option("--max-attempts", max_attempts, "Draw budget (coherence_capped)");
  gen_dict->add_option("--seed", seed, "Seed");
  gen_dict->add_option("--out", out_path, "Output file (default stdout)");

  std::size_t sparsity = 1;
  double budget = 1.0;
  std::string decay = "flat", format = "a1";
  auto* gen_signal = app.add_subcommand("gen-signal", "Generate a random A1 signal for a dictionary");
  gen_signal->add_option("--dict", dict_path, "Dictionary file")->required();
  gen_signal->add_option("--sparsity", sparsity, "Number of atoms");
  gen_signal->add_option("--B", budget, "A1 budget");
  gen_signal->add_option("--decay", decay, "flat | geometric:RHO | power:P");
  gen_signal->add_option("--seed", seed, "Seed");
  gen_signal->add_option("--format", format, "a1 (expansion) | point")->check(CLI::IsMember({"a1", "point"}));
  gen_signal->add_option("--out", out_path, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitSpec;
  }

  try {
    if (*run) return cmd_run(spec_path, assert_bounds);
    if (*compare) return cmd_compare(spec_path);
    if (*audit) return cmd_audit(dict_path, audit_n, cap);
    if (*gen_dict) {
      sgreedy::DictionarySource src;
      src.generator = kind;
      src.d = d;
      src.k = k;
      src.m_max = m_max;
      src.max_attempts = max_attempts;
      if (kind == "file") throw sgreedy::InvalidInput("gen-dict: kind 'file' is not a generator");
      if ((kind == "random_unit" || kind == "coherence_capped") && k == 0)
        throw sgreedy::InvalidInput("gen-dict: --K is required for " + kind);
      const auto dict = sgreedy::make_dictionary(src, seed);
      with_output(out_path, [&](std::ostream& os) { sgreedy::write_dictionary(os, dict); });
      return kExitOk;
    }
    if (*gen_signal) {
      const auto dict = sgreedy::load_dictionary(dict_path);
      const auto el = sgreedy::random_a1(dict, sparsity, budget, sgreedy::parse_decay(decay), seed);
      with_output(out_path, [&](std::ostream& os) {
        if (format == "a1") sgreedy::write_a1(os, el);
        else sgreedy::write_point(os, el.point);
      });
      return kExitOk;
    }
  } catch (const sgreedy::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const sgreedy::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSpec;
  } catch (const sgreedy::CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSpec;
  }
  return kExitOk;
}
