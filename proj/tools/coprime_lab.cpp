#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coprime_lab/commands.hpp"

using namespace coprime_lab;

namespace {

void add_constraint_options(CLI::App* cmd, ConstraintArgs& a) {
  cmd->add_option("--class", a.cls, "mutual, pairwise or kwise")->capture_default_str();
  cmd->add_option("-r", a.r, "tuple length")->capture_default_str();
  cmd->add_option("-k", a.k, "k for the kwise class");
  cmd->add_option("--coprime-to", a.coprime_to, "per-coordinate moduli a_j with gcd(a_j, x_j) = 1");
  cmd->add_option("--divisible", a.divisible, "per-coordinate moduli a_j with a_j | x_j");
  cmd->add_option("--modulus", a.modulus, "per-coordinate moduli of a progression");
  cmd->add_option("--residue", a.residue, "per-coordinate residues b_j, x_j = b_j mod a_j");
  cmd->add_option("--groups", a.groups, "block index of every coordinate");
  cmd->add_option("--group-moduli", a.group_moduli, "modulus of every block");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Densities, exact counts and discrepancies of coprime tuples"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  ConstraintArgs cargs;
  std::uint64_t cutoff = kDefaultPrimeCutoff;
  std::uint64_t n = 0;
  std::string format = "jsonl";
  const auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "jsonl or csv")->check(CLI::IsMember({"jsonl", "csv"}))->capture_default_str();
  };

  auto* constant = app.add_subcommand("constant", "density interval of a constrained set");
  add_constraint_options(constant, cargs);
  constant->add_option("--cutoff", cutoff, "prime cutoff of the Euler products")->capture_default_str();

  std::string alpha;
  std::string method = "auto";
  auto* count = app.add_subcommand("count", "exact count in the box x <= n alpha");
  add_constraint_options(count, cargs);
  count->add_option("-n", n, "scale")->required();
  count->add_option("--alpha", alpha, "box shape, comma separated values in [0, 1]");
  count->add_option("--method", method, "auto, brute_force, mobius, toth or prefix_grid")
      ->check(CLI::IsMember({"auto", "brute_force", "mobius", "toth", "prefix_grid"}))
      ->capture_default_str();

  VerifyOptions vopts;
  std::string suite;
  std::string campaign;
  auto* verify = app.add_subcommand("verify", "compare exact frequencies with the density formulas");
  verify->add_option("--suite", suite, "built-in suite")->check(CLI::IsMember({"paper"}));
  verify->add_option("--campaign", campaign, "campaign file");
  verify->add_option("-n", vopts.n, "default scale")->capture_default_str();
  verify->add_option("--tolerance", vopts.tolerance, "default tolerance")->capture_default_str();
  verify->add_option("--cutoff", vopts.cutoff, "prime cutoff")->capture_default_str();
  verify->add_option("--samples", vopts.mc_samples, "Monte Carlo samples")->capture_default_str();
  verify->add_option("--seed", vopts.mc_seed, "Monte Carlo seed")->capture_default_str();
  verify->add_flag("--montecarlo", vopts.montecarlo_all, "Monte Carlo estimate on every row");
  add_format(verify);

  std::string scan;
  std::string measure;
  std::uint64_t step = 8;
  auto* disc = app.add_subcommand("discrepancy", "exact sup-discrepancy, or gcd/lcm measure CDF errors");
  add_constraint_options(disc, cargs);
  disc->add_option("-n", n, "scale");
  disc->add_option("--scan", scan, "comma separated scales");
  disc->add_option("--measure", measure, "gcd or lcm")->check(CLI::IsMember({"gcd", "lcm"}));
  disc->add_option("--step", step, "CDF grid step for --measure")->capture_default_str();
  add_format(disc);

  auto* calibrate = app.add_subcommand("calibrate", "re-measure the frozen regression constants");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_invalid;
  }

  return run_guarded([&]() -> int {
    if (*constant) return cmd_constant(cargs, cutoff, std::cout);
    if (*count) return cmd_count(cargs, n, alpha, method, std::cout);
    if (*verify) {
      if (suite.empty() == campaign.empty()) throw invalid_argument("verify needs exactly one of --suite, --campaign");
      const auto entries = suite.empty() ? load_campaign(campaign) : paper_suite();
      return cmd_verify(entries, vopts, format, std::cout);
    }
    if (*disc) {
      if (!measure.empty()) {
        if (n == 0) throw invalid_argument("--measure needs -n");
        return cmd_measure(measure == "gcd" ? MeasureKind::gcd : MeasureKind::lcm, n, step, format, std::cout);
      }
      std::vector<std::uint64_t> scales = scan.empty() ? std::vector<std::uint64_t>{} : io::parse_u64_list(scan);
      if (n != 0) scales.insert(scales.begin(), n);
      return cmd_discrepancy(cargs, scales, format, std::cout);
    }
    if (*calibrate) return cmd_calibrate(std::cout);
    return exit_invalid;
  });
}
