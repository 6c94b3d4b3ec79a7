// conerepair: diagnose and repair unsolvable parametrized cone programs.
//
// Exit codes: 0 repaired/solvable, 1 not repaired/unsolvable, 2 input error,
// 3 solver error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "conerepair/generators.hpp"
#include "conerepair/problem_io.hpp"
#include "conerepair/repair.hpp"

namespace {

using namespace conerepair;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitNotRepaired = 1;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

struct CommonOptions {
  double lambda0 = 1.0;
  double alpha0 = 1.0;
  Index max_iters = 500;
  double eps_in = 1e-6;
  double eps_out = 1e-5;
  double solver_eps = 1e-8;
  Index solver_max_iters = 100000;
  unsigned seed = 0;
  bool exact = false;
  double eps_interior = 0.0;
  std::string out_path;
  bool trace = false;
};

void add_common_flags(CLI::App* cmd, CommonOptions* opts) {
  cmd->add_option("--lambda0", opts->lambda0, "Initial penalty weight");
  cmd->add_option("--alpha0", opts->alpha0, "Initial step size");
  cmd->add_option("--max-iters", opts->max_iters, "Outer iteration limit");
  cmd->add_option("--eps-in", opts->eps_in, "Inner stopping tolerance");
  cmd->add_option("--eps-out", opts->eps_out, "Outer stopping tolerance");
  cmd->add_option("--solver-eps", opts->solver_eps, "Conic solver tolerance");
  cmd->add_option("--solver-max-iters", opts->solver_max_iters,
                  "Conic solver iteration limit");
  cmd->add_option("--seed", opts->seed, "Random seed (reserved; runs are "
                  "deterministic)");
  cmd->add_flag("--exact", opts->exact,
                "Use the exact convex formulation (requires constant A)");
  cmd->add_option("--eps-interior", opts->eps_interior,
                  "Interior margin for the exact formulation's curved cones");
  cmd->add_option("--out", opts->out_path, "Write machine-readable JSON here");
  cmd->add_flag("--trace", opts->trace, "Print the per-iteration trace");
}

SolverSettings solver_settings(const CommonOptions& opts) {
  SolverSettings s;
  s.eps_abs = opts.solver_eps;
  s.eps_rel = opts.solver_eps;
  s.max_iters = opts.solver_max_iters;
  s.eps_infeas = 1e-7;
  return s;
}

// Digest of the input for the report header (length + FNV-1a of the text).
std::string input_digest(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::to_string(text.size()) + ":" + buf;
}

json theta_to_json(const Vector& theta) {
  json arr = json::array();
  for (Index i = 0; i < theta.size(); ++i) arr.push_back(theta[i]);
  return arr;
}

int cmd_diagnose(const std::string& path, const CommonOptions& opts) {
  ProblemFile pf = parse_problem_file(path);
  const SolverSettings settings = solver_settings(opts);

  EmbeddingWitness w = eval_tstar(pf.pcp, pf.theta0, settings);
  const bool solvable = w.tstar <= opts.eps_out;

  // Raw status of (P) itself for context: distinguishes infeasible,
  // unbounded, and pathological causes of a positive t*.
  auto data = pf.pcp.materialize(pf.theta0);
  Solution direct = solve(data.A, data.b, data.c, pf.pcp.cones(), settings);

  std::printf("t*(theta0) = %.12g\n", w.tstar);
  std::printf("verdict: %s\n", solvable ? "SOLVABLE" : "UNSOLVABLE");
  std::printf("direct solve status: %s\n", to_string(direct.status));
  if (!opts.out_path.empty()) {
    json report;
    report["input_digest"] = input_digest(serialize_problem(pf));
    report["tstar"] = w.tstar;
    report["verdict"] = solvable ? "SOLVABLE" : "UNSOLVABLE";
    report["direct_status"] = to_string(direct.status);
    std::ofstream out(opts.out_path);
    out << report.dump(2) << "\n";
  }
  return solvable ? kExitOk : kExitNotRepaired;
}

int cmd_repair(const std::string& path, const CommonOptions& opts) {
  ProblemFile pf = parse_problem_file(path);
  const std::string text = serialize_problem(pf);
  const SolverSettings solver = solver_settings(opts);

  const auto t_begin = std::chrono::steady_clock::now();

  json report;
  report["input_digest"] = input_digest(text);
  report["settings"] = {
      {"lambda0", opts.lambda0},       {"alpha0", opts.alpha0},
      {"max_iters", opts.max_iters},   {"eps_in", opts.eps_in},
      {"eps_out", opts.eps_out},       {"solver_eps", opts.solver_eps},
      {"exact", opts.exact},           {"eps_interior", opts.eps_interior}};

  int exit_code = kExitOk;
  if (opts.exact) {
    Vector theta =
        exact_repair_affine(pf.pcp, pf.regularizer, opts.eps_interior, solver);
    const double r_final = pf.regularizer.eval(theta);
    const double tstar = eval_tstar(pf.pcp, theta, solver).tstar;
    std::printf("exact repair: r = %.12g, t* = %.12g\n", r_final, tstar);
    for (Index i = 0; i < theta.size(); ++i) {
      std::printf("theta[%lld] = %.17g\n", static_cast<long long>(i),
                  theta[i]);
    }
    report["mode"] = "exact";
    report["theta_final"] = theta_to_json(theta);
    report["r_final"] = r_final;
    report["tstar_final"] = tstar;
  } else {
    RepairSettings settings;
    settings.lambda0 = opts.lambda0;
    settings.alpha0 = opts.alpha0;
    settings.n_iter = opts.max_iters;
    settings.eps_in = opts.eps_in;
    settings.eps_out = opts.eps_out;
    settings.solver = solver;

    const double r_initial = pf.regularizer.eval(pf.theta0);
    const double tstar_initial = eval_tstar(pf.pcp, pf.theta0, solver).tstar;
    RepairResult res = repair(pf.pcp, pf.regularizer, pf.theta0, settings);

    std::printf("initial: t* = %.12g, r = %.12g\n", tstar_initial, r_initial);
    std::printf("status: %s after %zu iterations (%lld embedding solves)\n",
                to_string(res.status), res.trace.size() - 1,
                static_cast<long long>(res.embedding_solves));
    std::printf("final: t* = %.12g, r = %.12g\n", res.tstar_final,
                res.r_final);
    for (Index i = 0; i < res.theta_final.size(); ++i) {
      std::printf("theta[%lld] = %.17g\n", static_cast<long long>(i),
                  res.theta_final[i]);
    }
    if (opts.trace) {
      std::printf("iter lambda alpha tstar r accepted\n");
      for (const TraceEntry& e : res.trace) {
        std::printf("%lld %.6g %.6g %.12g %.12g %d\n",
                    static_cast<long long>(e.iter), e.lambda, e.alpha,
                    e.tstar, e.r_value, e.accepted ? 1 : 0);
      }
    }

    report["mode"] = "penalty";
    report["status"] = to_string(res.status);
    report["tstar_initial"] = tstar_initial;
    report["r_initial"] = r_initial;
    report["theta_final"] = theta_to_json(res.theta_final);
    report["tstar_final"] = res.tstar_final;
    report["r_final"] = res.r_final;
    json trace = json::array();
    for (const TraceEntry& e : res.trace) {
      trace.push_back({{"iter", e.iter},
                       {"lambda", e.lambda},
                       {"alpha", e.alpha},
                       {"tstar", e.tstar},
                       {"r", e.r_value},
                       {"accepted", e.accepted}});
    }
    report["trace"] = std::move(trace);
    if (res.status != RepairStatus::Repaired) exit_code = kExitNotRepaired;
  }

  const auto t_end = std::chrono::steady_clock::now();
  const double seconds =
      std::chrono::duration<double>(t_end - t_begin).count();
  std::printf("wall clock: %.3f s\n", seconds);
  report["wall_clock_seconds"] = seconds;

  if (!opts.out_path.empty()) {
    std::ofstream out(opts.out_path);
    out << report.dump(2) << "\n";
  }
  return exit_code;
}

Eigen::MatrixXd read_returns_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open returns file '" + path + "'");
  Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1) {
    throw ParseError(1, "expected 'rows cols' header in returns file");
  }
  Eigen::MatrixXd R(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (!(in >> R(i, j))) {
        throw ParseError(0, "returns file truncated");
      }
    }
  }
  return R;
}

void write_or_print(const ProblemFile& pf, const std::string& out_path) {
  if (out_path.empty()) {
    serialize_problem(pf, std::cout);
  } else {
    write_problem_file(pf, out_path);
    std::printf("wrote %s\n", out_path.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repair of unsolvable parametrized cone programs"};
  app.require_subcommand(1);

  std::string path;
  CommonOptions opts;

  CLI::App* diagnose =
      app.add_subcommand("diagnose", "Report t*(theta0) and a verdict");
  diagnose->add_option("file", path, "Problem file")->required();
  add_common_flags(diagnose, &opts);

  CLI::App* repair_cmd =
      app.add_subcommand("repair", "Find nearby solvable parameters");
  repair_cmd->add_option("file", path, "Problem file")->required();
  add_common_flags(repair_cmd, &opts);

  SpacecraftParams sc;
  std::string gen_out;
  CLI::App* gen_sc = app.add_subcommand(
      "gen-spacecraft", "Emit the powered-landing example problem file");
  gen_sc->add_option("--T", sc.T, "Touchdown time");
  gen_sc->add_option("--dt", sc.h, "Discretization interval");
  gen_sc->add_option("--g", sc.g, "Gravity");
  gen_sc->add_option("--gamma", sc.gamma, "Fuel consumption coefficient");
  gen_sc->add_option("--out", gen_out, "Output path (default stdout)");

  std::string returns_path;
  CLI::App* gen_arb = app.add_subcommand(
      "gen-arbitrage", "Emit the betting-market example problem file");
  gen_arb->add_option("--returns", returns_path,
                      "Return matrix file: 'rows cols' then row-major entries "
                      "(default: built-in horse race instance)");
  gen_arb->add_option("--out", gen_out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }

  try {
    if (diagnose->parsed()) return cmd_diagnose(path, opts);
    if (repair_cmd->parsed()) return cmd_repair(path, opts);
    if (gen_sc->parsed()) {
      write_or_print(gen_spacecraft(sc), gen_out);
      return kExitOk;
    }
    if (gen_arb->parsed()) {
      Eigen::MatrixXd R = returns_path.empty()
                              ? arbitrage_example_matrix()
                              : read_returns_matrix(returns_path);
      write_or_print(gen_arbitrage(R), gen_out);
      return kExitOk;
    }
  } catch (const ParseError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const UnsupportedError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  }
  return kExitInput;
}
