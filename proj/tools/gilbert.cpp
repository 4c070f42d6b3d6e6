#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <gilbert/io.hpp>
#include <gilbert/optimizer.hpp>
#include <gilbert/oracle.hpp>

namespace {

enum Exit { kPass = 0, kInputError = 1, kCertificateFailed = 2, kConvergenceFailure = 3 };

struct Options {
  std::string input;
  std::string out;
  std::string svg;
  double tol_balance = 1e-8;
  double tol_collapse = 1e-8;
  int max_terminals = gilbert::kDefaultMaxTerminals;
  bool oracle = false;
  std::uint64_t seed = 0;
  int perturb_trials = 1000;
};

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  return static_cast<bool>(f);
}

int run_solve(const Options& opt) {
  std::ifstream in(opt.input, std::ios::binary);
  if (!in) {
    std::cerr << "gilbert: cannot read " << opt.input << '\n';
    return kInputError;
  }
  std::ostringstream text;
  text << in.rdbuf();

  gilbert::ParsedInstance parsed;
  try {
    parsed = gilbert::parse_instance(text.str());
  } catch (const gilbert::InvalidInput& e) {
    std::cerr << "gilbert: " << opt.input << ": " << e.what() << '\n';
    return kInputError;
  }
  for (const std::string& w : parsed.warnings) std::cerr << "gilbert: warning: " << w << '\n';
  const gilbert::Instance& inst = parsed.instance;

  gilbert::OptimizerConfig cfg;
  cfg.balancing_tol = opt.tol_balance;
  cfg.collapsing_tol = opt.tol_collapse;
  cfg.max_terminals = opt.max_terminals;

  gilbert::SolveResult result;
  try {
    result = gilbert::solve(inst, cfg);
  } catch (const gilbert::ConvergenceFailure& e) {
    std::cerr << "gilbert: " << e.what() << '\n';
    return kConvergenceFailure;
  } catch (const gilbert::Error& e) {
    std::cerr << "gilbert: " << e.what() << '\n';
    return kInputError;
  }

  gilbert::ResultMetadata meta;
  meta.topologies_examined = result.topologies_examined;
  meta.topologies_failed = result.topologies_failed;
  meta.iterations = result.iterations;
  meta.topology_key = result.topology_key;
  if (opt.oracle) {
    if (inst.space.dim() == 2 && inst.terminal_count() <= 4) {
      const gilbert::OracleResult g = gilbert::grid_solve(inst, gilbert::OracleOptions{});
      meta.oracle = gilbert::OracleSummary{g.cost, g.bound, g.spacing, g.topology_key};
    } else {
      std::cerr << "gilbert: warning: --oracle needs a planar instance with at most two Steiner points; skipped\n";
    }
  }
  if (opt.perturb_trials > 0) {
    const double magnitude = 1e-4 * gilbert::diameter(inst);
    const double dec = gilbert::perturb_test(result.arborescence, inst, opt.perturb_trials, magnitude, opt.seed);
    meta.perturbation = gilbert::PerturbationSummary{opt.seed, opt.perturb_trials, magnitude, dec};
  }

  const std::string json = gilbert::emit_result(result.arborescence, result.certificate, result.cost, meta);
  if (opt.out.empty()) {
    std::cout << json;
  } else if (!write_file(opt.out, json)) {
    std::cerr << "gilbert: cannot write " << opt.out << '\n';
    return kInputError;
  }
  if (!opt.svg.empty()) {
    try {
      if (!write_file(opt.svg, gilbert::emit_svg(result.arborescence))) {
        std::cerr << "gilbert: cannot write " << opt.svg << '\n';
        return kInputError;
      }
    } catch (const gilbert::InvalidInput& e) {
      std::cerr << "gilbert: " << e.what() << '\n';
      return kInputError;
    }
  }
  return result.certified() ? kPass : kCertificateFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-cost Gilbert arborescences in smooth L_p planes and spaces"};
  app.require_subcommand(1);
  Options opt;
  CLI::App* solve = app.add_subcommand("solve", "Solve and certify an instance file");
  solve->add_option("file", opt.input, "Instance document (JSON)")->required();
  solve->add_option("--out", opt.out, "Write the result JSON here instead of stdout");
  solve->add_option("--svg", opt.svg, "Write an SVG drawing (planar instances)");
  solve->add_option("--tol-balance", opt.tol_balance, "Balancing residual tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve->add_option("--tol-collapse", opt.tol_collapse, "Collapsing slack tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve->add_option("--max-terminals", opt.max_terminals, "Refuse instances with more terminals")
      ->check(CLI::Range(2, 12))
      ->capture_default_str();
  solve->add_flag("--oracle", opt.oracle, "Cross-check with the grid oracle (at most two Steiner points)");
  solve->add_option("--seed", opt.seed, "Seed for the perturbation test")->capture_default_str();
  solve->add_option("--perturb-trials", opt.perturb_trials, "Perturbation trials, 0 to skip")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }
  return run_solve(opt);
}
