#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "grfopt/config.hpp"
#include "grfopt/errors.hpp"
#include "grfopt/experiments.hpp"
#include "grfopt/kernel.hpp"

namespace {

using namespace grfopt;

struct Args {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

// One line on stderr, key=value pairs; the message is quoted.
void report_error(const std::string& kind, const std::string& message) {
  std::string escaped;
  for (char c : message) {
    if (c == '"' || c == '\\') escaped += '\\';
    escaped += c == '\n' ? ' ' : c;
  }
  std::cerr << "error kind=" << kind << " message=\"" << escaped << "\"\n";
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  bool to_file() const { return file_ != nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int run(Mode mode, const Args& args) {
  ExperimentConfig cfg = load_config(args.config);
  cfg.mode = mode;
  if (args.seed) cfg.master_seed = *args.seed;
  cfg.validate();
  const std::string out_path = args.out.empty() ? cfg.output : args.out;

  switch (mode) {
    case Mode::predict: {
      const LimitCurve curve = run_predict(cfg);
      Output out(out_path);
      write_predict_csv(out.stream(), curve);
      if (curve.any_frozen()) std::cerr << "note: dimension frozen at one or more steps\n";
      break;
    }
    case Mode::simulate: {
      const SimulateRun run = run_simulate(cfg);
      Output out(out_path);
      write_simulate_csv(out.stream(), run);
      break;
    }
    case Mode::verify: {
      const VerifyRun run = run_verify(cfg);
      Output out(out_path);
      write_verify_csv(out.stream(), run);
      if (out.to_file()) {
        Output summary(out_path + ".summary.csv");
        write_convergence_summary(summary.stream(), run.report);
        std::cout << "gaps_within_bound=" << run.report.gaps_within_bound()
                  << " slopes_within=" << run.report.slopes_within(-0.65, -0.35) << '\n';
      }
      break;
    }
    case Mode::two_init: {
      const TwoInitReport report = run_two_init(cfg);
      Output out(out_path);
      write_two_init_csv(out.stream(), report);
      if (out.to_file()) {
        for (std::size_t i = 0; i < report.n_list.size(); ++i) {
          std::printf("N=%llu median_max_gap=%.6g\n",
                      static_cast<unsigned long long>(report.n_list[i]), report.median_max_gap[i]);
        }
      }
      break;
    }
    case Mode::halting: {
      const HaltingReport report = run_halting(cfg);
      Output out(out_path);
      write_halting_csv(out.stream(), report);
      break;
    }
    case Mode::barrier: {
      if (cfg.kernel.type != "spin_glass") throw ConfigError("barrier needs kernel.type = spin_glass");
      const double value =
          alg_barrier(SpinGlassMixture(cfg.kernel.coeffs), cfg.numerics.quadrature_points);
      std::printf("%.6f\n", value);
      break;
    }
    case Mode::check_kernel: {
      const KernelModel kernel = build_kernel(cfg.kernel);
      const PartialsReport report = validate_partials(kernel, interior_grid(5), 1e-6);
      Output out(out_path);
      out.stream() << "partial,max_rel_error,max_abs_error,passed\n";
      for (const auto& c : report.checks) {
        out.stream() << c.partial << ',' << c.max_rel_error << ',' << c.max_abs_error << ','
                     << (c.passed ? 1 : 0) << '\n';
      }
      if (!report.passed()) {
        report_error("partials_mismatch", "analytic partials disagree with finite differences");
        return 3;
      }
      break;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Limit curves and exact finite-N simulation of gradient span algorithms on "
               "isotropic Gaussian random functions"};
  app.require_subcommand(1, 1);

  Args args;
  const std::pair<const char*, Mode> commands[] = {
      {"predict", Mode::predict},   {"simulate", Mode::simulate},
      {"verify", Mode::verify},     {"two-init", Mode::two_init},
      {"halting", Mode::halting},   {"barrier", Mode::barrier},
      {"check-kernel", Mode::check_kernel}};
  std::optional<Mode> chosen;
  for (const auto& [name, mode] : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", args.config, "experiment config file")->required();
    sub->add_option("--out", args.out, "output path (default: experiment.output or stdout)");
    sub->add_option("--seed", args.seed, "override experiment.master_seed");
    sub->callback([&chosen, mode = mode] { chosen = mode; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what());
    return 2;
  }

  try {
    return run(*chosen, args);
  } catch (const Error& e) {
    report_error(e.kind(), e.what());
    return e.error_class() == ErrorClass::numerical ? 3 : 2;
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 3;
  }
}
