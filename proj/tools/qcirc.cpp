// qcirc: run optical circuits and the built-in single-photon protocols.
//
//   qcirc run   --protocol superposition --source squeezed --r 0.5 --tau pi/2
//   qcirc run   --circuit samples/superposition.qcirc
//   qcirc sweep --protocol superposition --sweep r:0.1:1.0:10 --workers 4
//   qcirc check
//
// Exit codes: 0 success, 1 input diagnostics, 2 numerical errors.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qoptics/acceptance.hpp"
#include "qoptics/runner.hpp"

namespace {

using qoptics::runner::RunConfig;

std::atomic<bool> g_interrupted{false};

extern "C" void on_interrupt(int) { g_interrupted.store(true); }

struct CliArgs {
  std::string protocol;
  std::string circuit;
  std::string source = "squeezed";
  std::string source2;
  double r = 0.5, r2 = 0.5;
  std::string phi = "0", phi2 = "0";
  double alpha_re = 1.0, alpha_im = 0.0, alpha2_re = 1.0, alpha2_im = 0.0;
  std::string tau = "pi/2", tau2 = "pi/2", theta = "0";
  std::size_t cutoff = 0;
  double epsilon = qoptics::kDefaultLeakage;
  std::string format;
  std::string out;
  std::size_t workers = 0;
  std::vector<std::string> sweeps;
  bool trace = false;
  bool timing = false;
};

void add_run_options(CLI::App* cmd, CliArgs& a) {
  cmd->add_option("--protocol", a.protocol, "Built-in protocol")->check(CLI::IsMember({"superposition", "entanglement"}));
  cmd->add_option("--circuit", a.circuit, "Circuit file (.qcirc)");
  cmd->add_option("--source", a.source, "Kind of the mode-a input")->check(CLI::IsMember({"squeezed", "coherent"}));
  cmd->add_option("--source2", a.source2, "Kind of the mode-a2 input (entanglement)")
      ->check(CLI::IsMember({"squeezed", "coherent"}));
  cmd->add_option("--r", a.r, "Squeeze magnitude of mode a");
  cmd->add_option("--phi", a.phi, "Squeeze phase of mode a (angle)");
  cmd->add_option("--alpha-re", a.alpha_re, "Coherent amplitude of mode a, real part");
  cmd->add_option("--alpha-im", a.alpha_im, "Coherent amplitude of mode a, imaginary part");
  cmd->add_option("--r2", a.r2, "Squeeze magnitude of mode a2");
  cmd->add_option("--phi2", a.phi2, "Squeeze phase of mode a2 (angle)");
  cmd->add_option("--alpha2-re", a.alpha2_re, "Coherent amplitude of mode a2, real part");
  cmd->add_option("--alpha2-im", a.alpha2_im, "Coherent amplitude of mode a2, imaginary part");
  cmd->add_option("--tau", a.tau, "Kerr phase of the first medium (angle)");
  cmd->add_option("--tau2", a.tau2, "Kerr phase of the second medium (angle)");
  cmd->add_option("--theta", a.theta, "Phase shifter angle");
  cmd->add_option("--cutoff", a.cutoff, "Photon cutoff for the sources (default: from --epsilon)");
  cmd->add_option("--epsilon", a.epsilon, "Truncation leakage budget");
  cmd->add_option("--format", a.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", a.out, "Write output to this file instead of stdout");
  cmd->add_flag("--trace", a.trace, "Include intermediate states");
  cmd->add_flag("--timing", a.timing, "Print wall time to stderr");
}

RunConfig to_config(const CliArgs& a, const CLI::App& cmd, const std::string& default_format) {
  using qoptics::runner::parse_angle_arg;
  RunConfig c;
  if (!a.protocol.empty()) c.protocol = a.protocol;
  if (!a.circuit.empty()) c.circuit_path = a.circuit;
  c.source = {a.source, a.r, parse_angle_arg(a.phi), a.alpha_re, a.alpha_im};
  const bool any2 = !a.source2.empty() || cmd.count("--r2") || cmd.count("--phi2") || cmd.count("--alpha2-re") ||
                    cmd.count("--alpha2-im");
  if (any2) {
    c.source2 = qoptics::runner::SourceArgs{a.source2.empty() ? a.source : a.source2,
                                            cmd.count("--r2") ? a.r2 : a.r,
                                            cmd.count("--phi2") ? parse_angle_arg(a.phi2) : c.source.phi,
                                            cmd.count("--alpha2-re") ? a.alpha2_re : a.alpha_re,
                                            cmd.count("--alpha2-im") ? a.alpha2_im : a.alpha_im};
  }
  c.tau = parse_angle_arg(a.tau);
  c.tau2 = parse_angle_arg(a.tau2);
  c.theta = parse_angle_arg(a.theta);
  if (cmd.count("--cutoff")) c.cutoff = a.cutoff;
  c.epsilon = a.epsilon;
  c.format = a.format.empty() ? default_format : a.format;
  c.trace = a.trace;
  for (const auto& s : a.sweeps) c.sweeps.push_back(qoptics::runner::parse_sweep(s));
  c.workers = a.workers ? a.workers : qoptics::runner::default_workers();
  return c;
}

int emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "qcirc: cannot write '" << path << "'\n";
    return 1;
  }
  f << text;
  return 0;
}

// Maps library exceptions to exit codes.
template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const qoptics::runner::CircuitError& e) {
    std::cerr << e.rendered();
    return 1;
  } catch (const qoptics::runner::ConfigError& e) {
    std::cerr << "qcirc: " << e.what() << "\n";
    return 1;
  } catch (const qoptics::Error& e) {
    std::cerr << "qcirc: numerical error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated Fock-space simulator for single-photon Kerr protocols"};
  app.require_subcommand(1);

  CliArgs run_args;
  auto* run = app.add_subcommand("run", "Run one protocol or circuit and print a report");
  add_run_options(run, run_args);

  CliArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Evaluate a protocol over a parameter grid");
  add_run_options(sweep, sweep_args);
  sweep->add_option("--sweep", sweep_args.sweeps, "param:start:stop:steps (repeatable)")->required();
  sweep->add_option("--workers", sweep_args.workers, "Worker threads (default: $QOPTICS_WORKERS or 1)");

  bool perturb_bs = false;
  auto* check = app.add_subcommand("check", "Run the built-in acceptance checks");
  check->add_flag("--perturb-bs", perturb_bs, "Use a wrong beam-splitter convention (self-test of the checks)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*run) {
    return guarded([&] {
      const auto t0 = std::chrono::steady_clock::now();
      const auto cfg = to_config(run_args, *run, "json");
      if (cfg.format != "json") throw qoptics::runner::ConfigError("run reports are JSON only; use sweep for CSV");
      const auto rep = qoptics::runner::run(cfg);
      for (const auto& w : rep.result.warnings) std::cerr << "qcirc: warning: " << w << (w.ends_with('\n') ? "" : "\n");
      const int rc = emit(qoptics::runner::dump(rep.body), run_args.out);
      if (run_args.timing) {
        std::cerr << "wall time: " << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s\n";
      }
      return rc;
    });
  }

  if (*sweep) {
    return guarded([&] {
      const auto t0 = std::chrono::steady_clock::now();
      std::signal(SIGINT, on_interrupt);
      const auto cfg = to_config(sweep_args, *sweep, "csv");
      const auto text = qoptics::runner::sweep(cfg, &g_interrupted);
      int rc = emit(text, sweep_args.out);
      if (sweep_args.timing) {
        std::cerr << "wall time: " << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s\n";
      }
      if (g_interrupted.load()) {
        std::cerr << "qcirc: interrupted; completed points written\n";
        rc = 130;
      }
      return rc;
    });
  }

  // check
  qoptics::acceptance::Options opt;
  if (perturb_bs) opt.bs_convention = qoptics::BsConvention::Conjugate;
  bool all = true;
  for (const auto& r : qoptics::acceptance::run_all(opt)) {
    std::cout << qoptics::acceptance::format_line(r) << "\n";
    all = all && r.passed;
  }
  std::cout << (all ? "all checks passed\n" : "some checks FAILED\n");
  return all ? 0 : 1;
}
