// Command line front end. Links only the C interface.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "csofp/csofp.h"

namespace {

enum ExitCode { kOk = 0, kInvalid = 1, kPrecondition = 2, kConvergence = 3, kInternal = 4 };

int exit_code(csofp_status s) {
  switch (s) {
    case CSOFP_OK:
      return kOk;
    case CSOFP_INVALID_ARGUMENT:
      return kInvalid;
    case CSOFP_PRECONDITION:
      return kPrecondition;
    case CSOFP_CONVERGENCE:
      return kConvergence;
    default:
      return kInternal;
  }
}

int report_error(csofp_status s) {
  std::cerr << "error: " << csofp_last_error() << "\n";
  return exit_code(s);
}

// Writes the report to `out` or stdout and releases it.
int deliver(csofp_status s, char** slot, const std::string& out) {
  if (s != CSOFP_OK) return report_error(s);
  char* report = *slot;
  *slot = nullptr;
  int code = kOk;
  if (out.empty()) {
    std::fputs(report, stdout);
  } else {
    std::ofstream file(out, std::ios::binary);
    if (!file || !(file << report)) {
      std::cerr << "error: cannot write " << out << "\n";
      code = kInvalid;
    }
  }
  csofp_string_free(report);
  return code;
}

struct OperatorHandle {
  csofp_operator* op = nullptr;
  ~OperatorHandle() { csofp_operator_free(op); }
};

struct ChoiceFlags {
  std::vector<double> pin;
  std::optional<std::size_t> project;

  void attach(CLI::App* cmd) {
    auto* p = cmd->add_option("--pin", pin, "Use T f - (T f)(c) with c = RE IM")->expected(2);
    cmd->add_option("--project", project, "Use the projected operator T_j for map J")->excludes(p);
  }

  csofp_operator_choice get() const {
    csofp_operator_choice c{};
    if (pin.size() == 2) {
      c.has_pin = 1;
      c.pin_re = pin[0];
      c.pin_im = pin[1];
    }
    if (project) {
      c.has_project = 1;
      c.project = *project;
    }
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Affine composition sum operators: contraction diagnostics and singular fixed points"};
  app.require_subcommand(1);
  bool timing = false;
  app.add_flag("--timing", timing, "Print wall time to stderr");

  std::string config_path, out;
  std::optional<double> radius;
  double tol = 1e-10;
  bool parallel = false;
  int code = kOk;

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "Contraction, polynomial and seed diagnostics");
  csofp_diagnose_request dreq;
  csofp_diagnose_request_init(&dreq);
  ChoiceFlags dchoice;
  diagnose->add_option("--config", config_path, "Operator config (JSON)")->required()->check(CLI::ExistingFile);
  diagnose->add_option("--radius", radius, "Disc radius (default: config)");
  diagnose->add_option("--n-max", dreq.n_max, "Basis ratios computed exactly up to this index");
  diagnose->add_option("--m-max", dreq.m_max, "Largest polynomial degree examined");
  diagnose->add_option("--out", out, "Write the report here instead of stdout");
  dchoice.attach(diagnose);

  // fixpoint
  auto* fixpoint = app.add_subcommand("fixpoint", "Construct a singular fixed point from a seed");
  csofp_fixpoint_request freq;
  csofp_fixpoint_request_init(&freq);
  ChoiceFlags fchoice;
  std::string seed_kind = "log", route = "auto";
  fixpoint->add_option("--config", config_path, "Operator config (JSON)")->required()->check(CLI::ExistingFile);
  fixpoint->add_option("--seed", seed_kind, "Seed kind")->check(CLI::IsMember({"log", "pole"}));
  fixpoint->add_option("--index", freq.index, "Seed at the fixed point of map I (0-based)");
  fixpoint->add_option("--order", freq.order, "Pole order");
  fixpoint->add_option("--route", route, "Construction route")
      ->check(CLI::IsMember({"auto", "direct", "generalized", "derivative"}));
  fixpoint->add_option("--m", freq.m, "Derivative order for the derivative route (0: smallest contracting)");
  fixpoint->add_option("--radius", radius, "Disc radius (default: config)");
  fixpoint->add_option("--tol", tol, "Residual tolerance");
  fixpoint->add_option("--k-max", freq.k_max, "Largest iterate tried by the generalized route");
  fixpoint->add_option("--max-iter", freq.max_iter, "Neumann iteration cap");
  fixpoint->add_option("--out", out, "Write the report here instead of stdout");
  fchoice.attach(fixpoint);

  // polyfix
  auto* polyfix = app.add_subcommand("polyfix", "Polynomial fixed points");
  std::size_t poly_m_max = 10;
  polyfix->add_option("--config", config_path, "Operator config (JSON)")->required()->check(CLI::ExistingFile);
  polyfix->add_option("--m-max", poly_m_max, "Largest degree");
  polyfix->add_option("--out", out, "Write the report here instead of stdout");

  // golden
  auto* golden = app.add_subcommand("golden", "Golden-mean case study");
  golden->require_subcommand(1);
  csofp_golden_request greq;
  csofp_golden_request_init(&greq);
  std::string csv_path = "figure1.csv";
  auto* gfp = golden->add_subcommand("fp", "Engine fixed points against the word expansion");
  gfp->add_option("--depth", greq.depth, "Word depth");
  gfp->add_option("--radius", greq.radius, "Disc radius of the engine construction");
  gfp->add_option("--tol", greq.tol, "Residual tolerance");
  gfp->add_option("--samples", greq.samples, "Comparison points per fixed point");
  gfp->add_option("--seed", greq.seed, "Sample generator seed");
  gfp->add_flag("--parallel", parallel, "Spread the sample points over threads");
  gfp->add_option("--out", out, "Write the report here instead of stdout");
  auto* gid = golden->add_subcommand("identity", "Partial products of the word identity");
  gid->add_option("--depth", greq.depth, "Word depth");
  gid->add_option("--out", out, "Write the report here instead of stdout");
  auto* gfig = golden->add_subcommand("figure", "CSV of the two multiplicative fixed points");
  gfig->add_option("--depth", greq.depth, "Word depth");
  gfig->add_option("--out", csv_path, "CSV destination");
  gfig->add_flag("--parallel", parallel, "Spread the grid over threads");
  auto* gsfs = golden->add_subcommand("sfs", "Zero-shear spectrum example");
  gsfs->add_option("--n", greq.n, "Polynomials of degree <= 2n - 1");
  gsfs->add_option("--out", out, "Write the report here instead of stdout");

  CLI11_PARSE(app, argc, argv);
  const auto start = std::chrono::steady_clock::now();

  auto load = [&](OperatorHandle& h) -> bool {
    const csofp_status s = csofp_operator_load(config_path.c_str(), &h.op);
    if (s != CSOFP_OK) {
      code = report_error(s);
      return false;
    }
    return true;
  };

  char* report = nullptr;
  if (*diagnose) {
    OperatorHandle h;
    if (load(h)) {
      dreq.radius = radius.value_or(0.0);
      dreq.choice = dchoice.get();
      code = deliver(csofp_diagnose(h.op, &dreq, &report), &report, out);
    }
  } else if (*fixpoint) {
    OperatorHandle h;
    if (load(h)) {
      freq.seed = seed_kind == "pole" ? CSOFP_SEED_POLE : CSOFP_SEED_LOG;
      freq.route = route == "direct"        ? CSOFP_ROUTE_DIRECT
                   : route == "generalized" ? CSOFP_ROUTE_GENERALIZED
                   : route == "derivative"  ? CSOFP_ROUTE_DERIVATIVE
                                            : CSOFP_ROUTE_AUTO;
      freq.radius = radius.value_or(0.0);
      freq.tol = tol;
      freq.choice = fchoice.get();
      code = deliver(csofp_fixpoint(h.op, &freq, &report), &report, out);
    }
  } else if (*polyfix) {
    OperatorHandle h;
    if (load(h)) code = deliver(csofp_polyfix(h.op, poly_m_max, &report), &report, out);
  } else if (*golden) {
    if (parallel) greq.threads = std::max(1u, std::thread::hardware_concurrency());
    if (*gfp) {
      code = deliver(csofp_golden_fp(&greq, &report), &report, out);
    } else if (*gid) {
      code = deliver(csofp_golden_identity(&greq, &report), &report, out);
    } else if (*gfig) {
      greq.csv_path = csv_path.c_str();
      code = deliver(csofp_golden_figure(&greq, &report), &report, out);
    } else if (*gsfs) {
      code = deliver(csofp_golden_sfs(&greq, &report), &report, out);
    }
  }

  if (timing) {
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "wall time: " << seconds << " s\n";
  }
  return code;
}
