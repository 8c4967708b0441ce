#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polybound/branch_bound.hpp"
#include "polybound/driver.hpp"
#include "polybound/mps.hpp"
#include "polybound/parse.hpp"
#include "polybound/report.hpp"

namespace {

using namespace polybound;

constexpr int kExitOk = 0;
constexpr int kExitParseError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitUndecided = 3;

struct CommonOpts {
  std::string input;
  std::vector<std::string> sigma;
  std::vector<std::string> kappa;
  double tol = 1e-6;
  double time_limit = 0.0;
  long long node_limit = 0;
  int threads = 1;
  bool refine = false;
  std::string format = "text";
  std::string export_path;
  bool oracle = false;
  bool no_meta = false;
};

void add_common(CLI::App* cmd, CommonOpts* o) {
  cmd->add_option("input", o->input, "problem file (.pp)")->required();
  cmd->add_option("--sigma", o->sigma,
                  "per-variable unit counts, e.g. --sigma x1=3,x2=2")
      ->delimiter(',');
  cmd->add_option("--kappa", o->kappa, "per-variable error limits, e.g. --kappa x1=0.375")
      ->delimiter(',');
  cmd->add_option("--tol", o->tol, "feasibility tolerance (default 1e-6)");
  cmd->add_option("--time-limit", o->time_limit, "solver time limit in seconds");
  cmd->add_option("--node-limit", o->node_limit, "branch-and-bound node limit");
  cmd->add_option("--threads", o->threads, "parallel branch-and-bound workers");
  cmd->add_flag("--refine", o->refine, "focused refinement when LP-up is infeasible");
  cmd->add_option("--format", o->format, "report format")
      ->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--export", o->export_path,
                  "write the reformulated MILP (.json for native dump, else MPS)");
  cmd->add_flag("--oracle", o->oracle, "cross-check against exhaustive enumeration");
  cmd->add_flag("--no-meta", o->no_meta, "omit non-deterministic metadata from reports");
}

ReformParams make_params(const PolynomialProgram& pp, const CommonOpts& o) {
  ReformParams params;
  auto assign = [&](const std::string& entry, bool is_sigma) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw DomainError("expected name=value, got '" + entry + "'");
    }
    const std::string name = entry.substr(0, eq);
    const int idx = pp.var_index(name);
    if (idx < 0) throw DomainError("unknown variable '" + name + "'");
    auto& slot = params.per_variable[idx];
    if (is_sigma) {
      slot.sigma = std::stoi(entry.substr(eq + 1));
    } else {
      slot.kappa = std::stod(entry.substr(eq + 1));
    }
    if (slot.sigma && slot.kappa) {
      throw DomainError("variable '" + name + "': give sigma or kappa, not both");
    }
  };
  for (const auto& e : o.sigma) assign(e, true);
  for (const auto& e : o.kappa) assign(e, false);
  return params;
}

void write_export(const MilpModel& model, const std::string& path) {
  const bool json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  const ExportResult res =
      export_milp(model, json ? ExportFormat::NativeJson : ExportFormat::MpsFixed);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write export file '" + path + "'");
  out << res.content;
  if (!res.renamed.empty()) {
    std::ofstream side(path + ".names", std::ios::binary);
    for (const auto& [orig, renamed] : res.renamed) {
      side << orig << "\t" << renamed << "\n";
    }
  }
}

int run(const std::string& mode, const CommonOpts& o) {
  std::ifstream in(o.input, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open '" << o.input << "'\n";
    return kExitParseError;
  }
  std::ostringstream buf;
  buf << in.rdbuf();

  std::string default_name = o.input;
  if (const auto slash = default_name.find_last_of('/'); slash != std::string::npos) {
    default_name = default_name.substr(slash + 1);
  }
  if (const auto dot = default_name.find_last_of('.'); dot != std::string::npos) {
    default_name = default_name.substr(0, dot);
  }

  PolynomialProgram pp;
  ReformParams params;
  try {
    pp = parse_program(buf.str(), default_name);
    params = make_params(pp, o);
  } catch (const ParseError& e) {
    std::cerr << o.input << ":" << e.line() << ":" << e.column() << ": error: " << e.what()
              << "\n";
    return kExitParseError;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  }

  DriverOptions options;
  options.milp.node_limit = o.node_limit;
  options.milp.time_limit = o.time_limit;
  options.milp.threads = o.threads;
  options.refine = o.refine;
  options.feas_tol = o.tol;
  const ReportFormat fmt = o.format == "json" ? ReportFormat::Json : ReportFormat::Text;

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  try {
    if (!o.export_path.empty() || mode == "reformulate-only") {
      const MilpModel model = build_lower_program(pp, params);
      if (!o.export_path.empty()) write_export(model, o.export_path);
      if (mode == "reformulate-only") {
        const BoundReport rep = make_model_report(pp, params, model, elapsed());
        std::cout << write_report(rep, fmt, !o.no_meta);
        return kExitOk;
      }
    }

    if (mode == "tau") {
      const TauResult res = tau_variant(pp, params, options);
      BoundReport rep = make_tau_report(pp, params, res, elapsed());
      std::cout << write_report(rep, fmt, !o.no_meta);
      return kExitOk;
    }

    const IntervalResult res = bound_global_minimum(pp, params, options);
    BoundReport rep = make_bound_report(pp, params, res, 0.0);
    if (o.oracle) {
      const MilpModel model = build_lower_program(pp, params);
      if (model.stats.phi <= 22) {
        const MilpOutcome fast = solve_milp(model, options.milp);
        const MilpOutcome exact = enumerate_oracle(model);
        const bool agree =
            fast.status == exact.status &&
            (!fast.optimal() || std::abs(fast.value - exact.value) <= 1e-5);
        rep.oracle_agrees = agree;
      } else {
        std::cerr << "note: --oracle skipped (phi = " << model.stats.phi << " > 22)\n";
      }
    }
    rep.wall_seconds = elapsed();
    std::cout << write_report(rep, fmt, !o.no_meta);
    if (res.verdict == Verdict::InfeasibleProven) return kExitInfeasible;
    if (res.verdict == Verdict::Undecided) return kExitUndecided;
    return kExitOk;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUndecided;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified interval bounds on polynomial programs via binary reformulation"};
  app.require_subcommand(1);

  CommonOpts bound_opts, tau_opts, reform_opts;
  CLI::App* bound = app.add_subcommand("bound", "solve LP-down/LP-up and report an interval");
  add_common(bound, &bound_opts);
  CLI::App* tau = app.add_subcommand("tau", "single-MILP variant with violation tolerances");
  add_common(tau, &tau_opts);
  CLI::App* reform =
      app.add_subcommand("reformulate-only", "build and export the MILP without solving");
  add_common(reform, &reform_opts);

  CLI11_PARSE(app, argc, argv);

  if (bound->parsed()) return run("bound", bound_opts);
  if (tau->parsed()) return run("tau", tau_opts);
  return run("reformulate-only", reform_opts);
}
