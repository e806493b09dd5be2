#include "pisos/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "pisos/errors.hpp"
#include "pisos/executives.hpp"
#include "pisos/numeric.hpp"
#include "pisos/operator_json.hpp"
#include "pisos/program.hpp"

namespace pisos {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
}

DegreeSpec parse_deg(const std::string& text) {
  DegreeSpec d;
  char c1 = 0;
  char c2 = 0;
  std::istringstream in(text);
  if (!(in >> d.d1 >> c1 >> d.d2 >> c2 >> d.d3) || c1 != ',' || c2 != ',' ||
      d.d1 < 0 || d.d2 < 0 || d.d3 < 0) {
    throw ParseError("--deg expects d1,d2,d3 with nonnegative integers, got '" +
                     text + "'");
  }
  std::string rest;
  if (in >> rest) throw ParseError("--deg has trailing characters: '" + text + "'");
  return d;
}

int status_exit(const SolveReport& r) {
  switch (r.status) {
    case SdpStatus::Optimal: return kExitOk;
    case SdpStatus::Infeasible:
    case SdpStatus::Unbounded: return kExitInfeasible;
    case SdpStatus::MaxIter: return kExitNumericalFailure;
  }
  return kExitNumericalFailure;
}

// Settings shared by every solving command.
struct Flags {
  std::string deg;
  double eps = kDefaultEps;
  bool eps_set = false;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  std::string export_sdpa;
  std::string solver = "internal";
  std::string sdpa_solution;
  std::string out_prefix;
  int trials = 20;
  double gamma = 0.0;
};

DegreeSpec resolve_deg(const Flags& f, const OperatorFile* file) {
  if (!f.deg.empty()) return parse_deg(f.deg);
  if (file != nullptr && file->deg) return *file->deg;
  return DegreeSpec{};
}

double resolve_eps(const Flags& f, const OperatorFile* file) {
  if (!f.eps_set && file != nullptr && file->eps) return *file->eps;
  return f.eps;
}

// A built program plus the code that interprets its solution.
struct Job {
  Program program;
  std::function<int(Program&, const SolveReport&, std::ostream&)> finish;
};

int run_job(Job& job, const Flags& f, std::ostream& out) {
  const bool external = f.solver == "external-file";
  SolveReport report;
  if (!f.export_sdpa.empty() || external) {
    const AssembledProgram assembled = job.program.assemble();
    if (!f.export_sdpa.empty()) {
      write_file(f.export_sdpa, export_sdpa(assembled.sdp));
      out << "exported: " << f.export_sdpa << '\n';
    }
    if (external) {
      if (f.sdpa_solution.empty()) {
        if (f.export_sdpa.empty()) {
          throw ParseError("--solver external-file needs --export-sdpa or "
                           "--sdpa-solution");
        }
        out << "solve the exported problem externally and rerun with "
               "--sdpa-solution\n";
        return kExitOk;
      }
      report = job.program.load_solution(
          assembled, import_sdpa_solution(read_file(f.sdpa_solution), assembled.sdp));
    }
  }
  if (!external) {
    SdpOptions opts;
    opts.tolerance = f.tol;
    report = job.program.solve(opts);
  }
  out << report.to_text();
  return job.finish(job.program, report, out);
}

void write_operator(const Flags& f, const std::string& name, const OpVar& op,
                    std::ostream& out) {
  if (f.out_prefix.empty()) return;
  const std::string path = f.out_prefix + name + ".json";
  write_file(path, format_operator(op));
  out << "wrote: " << path << '\n';
}

const OpVar& single_operator(const OperatorFile& file) {
  if (file.operators.count("")) return file.operators.at("");
  return file.at("A");
}

Job norm_bound_job(const OpVar& a, DegreeSpec deg, const Flags& f) {
  if (!a.is_numeric()) throw DimMismatch("norm-bound needs a numeric operator");
  Job job{Program(a.interval), {}};
  const DecisionVarId g = job.program.declare_scalar("gamma");
  const OpVar gram = op_compose(op_adjoint(a), a);
  const OpVar lhs = op_sub(
      op_scale(Coefficient::variable(g), op_identity(a.dims.m, a.dims.n, a.interval)),
      gram);
  job.program.constrain_positive(lhs, deg);
  job.program.set_objective(Coefficient::variable(g));
  job.finish = [a, g, f](Program& prog, const SolveReport& r, std::ostream& out) {
    const NormEstimate lower =
        estimate_norm(a, f.trials, default_node_count(a), f.seed);
    if (r.status == SdpStatus::Optimal) {
      out << "upper_bound: " << std::sqrt(std::max(0.0, prog.value(g))) << '\n';
    }
    out << "lower_bound: " << lower.value << '\n';
    return status_exit(r);
  };
  return job;
}

// Second-derivative Green's operator and its derivative on [0, 1]:
// u = H u'' and u' = H2 u'' for u(0) = u(1) = 0.
std::pair<OpVar, OpVar> poincare_operators() {
  const Poly2 s = Poly2::s();
  const Poly2 th = Poly2::theta();
  OpVar h = op_new({0, 0, 1, 1}, Interval(0.0, 1.0));
  h.R1(0, 0) = s * th - th;
  h.R2(0, 0) = s * th - s;
  OpVar h2 = op_new({0, 0, 1, 1}, Interval(0.0, 1.0));
  h2.R1(0, 0) = th;
  h2.R2(0, 0) = th - 1.0;
  return {h, h2};
}

Job poincare_job(DegreeSpec deg, const Flags& f) {
  const auto [h, h2] = poincare_operators();
  Job job{Program(h.interval), {}};
  const DecisionVarId c = job.program.declare_scalar("C");
  const OpVar hh = op_compose(op_adjoint(h), h);
  const OpVar hh2 = op_compose(op_adjoint(h2), h2);
  job.program.constrain_positive(
      op_sub(op_scale(Coefficient::variable(c), hh2), hh), deg);
  job.program.set_objective(Coefficient::variable(c));
  job.finish = [hh, hh2, c, f](Program& prog, const SolveReport& r,
                               std::ostream& out) {
    if (r.status != SdpStatus::Optimal) return status_exit(r);
    const double cval = prog.value(c);
    out << "sqrt_C: " << std::sqrt(std::max(0.0, cval)) << '\n';
    // <z, (C H2*H2 - H*H) z> / ||z||^2 on random samples.
    const OpVar residual = op_sub(op_scale(cval, hh2), hh);
    std::mt19937_64 rng(f.seed);
    const int nodes = default_node_count(residual) + 8;
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 200; ++k) {
      const FunctionSample z = random_sample(rng, residual.interval, 0, 1, 6, nodes);
      const double zz = inner_product(z, z);
      if (zz <= 0.0) continue;
      worst = std::min(worst, inner_product(z, op_apply(residual, z)) / zz);
    }
    out << "constraint_check_min: " << worst << '\n';
    out << "constraint_check: " << (worst >= -1e-6 ? "pass" : "fail") << '\n';
    return status_exit(r);
  };
  return job;
}

Job stability_job(const OperatorFile& file, const Flags& f) {
  StabilityProgram built = build_stability(file.at("H"), file.at("A"),
                                           resolve_deg(f, &file),
                                           resolve_eps(f, &file));
  Job job{std::move(built.program), {}};
  job.finish = [P = built.P, f](Program& prog, const SolveReport& r,
                                std::ostream& out) {
    if (r.status == SdpStatus::Optimal) {
      out << "result: FEASIBLE\n";
      write_operator(f, "P", prog.get_solution_opvar(P), out);
    } else if (r.status == SdpStatus::Infeasible || r.status == SdpStatus::Unbounded) {
      out << "result: INFEASIBLE\n";
    } else {
      out << "result: UNDECIDED\n";
    }
    return status_exit(r);
  };
  return job;
}

Job gain_job(const OperatorFile& file, const Flags& f) {
  GainProgram built = build_hinf_gain(
      file.at("H"), file.at("A"), file.at("B"), file.at("C"), file.at("D"),
      resolve_deg(f, &file), resolve_eps(f, &file));
  Job job{std::move(built.program), {}};
  job.finish = [P = built.P, g = built.gamma, f](Program& prog, const SolveReport& r,
                                                 std::ostream& out) {
    if (r.status == SdpStatus::Optimal || r.status == SdpStatus::MaxIter) {
      out << "gamma: " << prog.value(g) << '\n';
    }
    if (r.status == SdpStatus::Optimal) {
      write_operator(f, "P", prog.get_solution_opvar(P), out);
    }
    return status_exit(r);
  };
  return job;
}

Job estimator_job(const OperatorFile& file, const Flags& f) {
  double gamma = f.gamma;
  if (!(gamma > 0.0) && file.gamma) gamma = *file.gamma;
  if (!(gamma > 0.0)) throw ParseError("hinf-estimator needs a positive --gamma");
  EstimatorProgram built = build_hinf_estimator(
      file.at("H"), file.at("A"), file.at("B"), file.at("C1"), file.at("C2"),
      file.at("D11"), file.at("D21"), gamma, resolve_deg(f, &file),
      resolve_eps(f, &file));
  Job job{std::move(built.program), {}};
  job.finish = [P = built.P, Z = built.Z, f](Program& prog, const SolveReport& r,
                                             std::ostream& out) {
    if (r.status == SdpStatus::Optimal) {
      out << "result: FEASIBLE\n";
      write_operator(f, "P", prog.get_solution_opvar(P), out);
      write_operator(f, "Z", prog.get_solution_opvar(Z), out);
    } else if (r.status == SdpStatus::Infeasible || r.status == SdpStatus::Unbounded) {
      out << "result: INFEASIBLE\n";
    } else {
      out << "result: UNDECIDED\n";
    }
    return status_exit(r);
  };
  return job;
}

Job make_job(const std::string& kind, const std::string& input, const Flags& f) {
  if (kind == "poincare") return poincare_job(resolve_deg(f, nullptr), f);
  if (kind == "empty") {
    Job job{Program(), {}};
    job.finish = [](Program&, const SolveReport& r, std::ostream&) {
      return status_exit(r);
    };
    return job;
  }
  if (input.empty()) throw ParseError(kind + " needs an input file");
  const OperatorFile file = parse_operator_file(read_file(input));
  if (kind == "norm-bound") {
    return norm_bound_job(single_operator(file), resolve_deg(f, &file), f);
  }
  if (kind == "stability") return stability_job(file, f);
  if (kind == "hinf-gain") return gain_job(file, f);
  if (kind == "hinf-estimator") return estimator_job(file, f);
  throw ParseError("unknown problem kind '" + kind + "'");
}

int run_algebra(const std::string& op, const std::vector<std::string>& inputs,
                const std::string& output, std::ostream& out) {
  const std::size_t need = op == "adjoint" ? 1 : 2;
  if (inputs.size() != need) {
    throw ParseError("algebra " + op + " takes " + std::to_string(need) +
                     " input file(s)");
  }
  std::vector<OpVar> ops;
  for (const auto& path : inputs) ops.push_back(parse_operator(read_file(path)));
  OpVar r;
  if (op == "add") {
    r = op_add(ops[0], ops[1]);
  } else if (op == "compose") {
    r = op_compose(ops[0], ops[1]);
  } else if (op == "adjoint") {
    r = op_adjoint(ops[0]);
  } else if (op == "hcat") {
    r = op_hcat(ops[0], ops[1]);
  } else if (op == "vcat") {
    r = op_vcat(ops[0], ops[1]);
  } else {
    throw ParseError("unknown algebra operation '" + op + "'");
  }
  const std::string text = format_operator(r);
  if (output.empty()) {
    out << text;
  } else {
    write_file(output, text);
    out << "wrote: " << output << '\n';
  }
  return kExitOk;
}

void add_solve_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--deg", f.deg, "Degrees d1,d2,d3 (default 2,2,2)");
  cmd->add_option("--eps", f.eps, "Coercivity margin for strict inequalities")
      ->each([&f](const std::string&) { f.eps_set = true; });
  cmd->add_option("--tol", f.tol, "Solver tolerance");
  cmd->add_option("--seed", f.seed, "Seed for sampling checks");
  cmd->add_option("--export-sdpa", f.export_sdpa, "Write the SDP in SDPA format");
  cmd->add_option("--solver", f.solver, "internal or external-file")
      ->check(CLI::IsMember({"internal", "external-file"}));
  cmd->add_option("--sdpa-solution", f.sdpa_solution,
                  "SDPA result file to load with --solver external-file");
  cmd->add_option("--out-prefix", f.out_prefix,
                  "Prefix for extracted operator files");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Partial integral operator algebra and operator inequalities"};
  app.require_subcommand(1);
  Flags f;

  std::string algebra_op;
  std::vector<std::string> algebra_inputs;
  std::string algebra_output;
  auto* algebra = app.add_subcommand("algebra", "add, compose, adjoint, hcat or vcat");
  algebra->add_option("op", algebra_op, "Operation")->required()->check(
      CLI::IsMember({"add", "compose", "adjoint", "hcat", "vcat"}));
  algebra->add_option("inputs", algebra_inputs, "Operator files")->required();
  algebra->add_option("-o,--output", algebra_output, "Result file (default stdout)");

  std::string input;
  auto* norm = app.add_subcommand("norm-bound", "Bounds on the induced L2 norm");
  norm->add_option("input", input, "Operator file")->required();
  norm->add_option("--trials", f.trials, "Random trials for the lower bound");
  add_solve_flags(norm, f);

  auto* poincare = app.add_subcommand("poincare", "Poincare constant on [0,1]");
  add_solve_flags(poincare, f);

  auto* stability = app.add_subcommand("stability", "Lyapunov stability test");
  stability->add_option("input", input, "File with operators H and A")->required();
  add_solve_flags(stability, f);

  auto* gain = app.add_subcommand("hinf-gain", "L2-gain bound");
  gain->add_option("input", input, "File with operators H, A, B, C and D")->required();
  add_solve_flags(gain, f);

  auto* estimator = app.add_subcommand("hinf-estimator", "Estimator feasibility");
  estimator->add_option("input", input,
                        "File with operators H, A, B, C1, C2, D11 and D21")
      ->required();
  estimator->add_option("--gamma", f.gamma, "Performance level");
  add_solve_flags(estimator, f);

  std::string export_kind;
  std::string export_output;
  auto* exporter = app.add_subcommand("export-sdpa", "Write a problem as SDPA sparse");
  exporter->add_option("kind", export_kind, "Problem kind")
      ->required()
      ->check(CLI::IsMember({"empty", "norm-bound", "poincare", "stability",
                             "hinf-gain", "hinf-estimator"}));
  exporter->add_option("input", input, "Operator file (if the kind needs one)");
  exporter->add_option("-o,--output", export_output, "Output file")->required();
  exporter->add_option("--deg", f.deg, "Degrees d1,d2,d3");
  exporter->add_option("--eps", f.eps, "Coercivity margin")
      ->each([&f](const std::string&) { f.eps_set = true; });
  exporter->add_option("--gamma", f.gamma, "Performance level (hinf-estimator)");

  std::vector<std::string> argv_store{"pisos"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  out << std::setprecision(10);
  try {
    if (algebra->parsed()) {
      return run_algebra(algebra_op, algebra_inputs, algebra_output, out);
    }
    if (exporter->parsed()) {
      Job job = make_job(export_kind, input, f);
      const AssembledProgram assembled = job.program.assemble();
      write_file(export_output, export_sdpa(assembled.sdp));
      out << "wrote: " << export_output << '\n';
      out << "constraints: " << assembled.sdp.constraints.size() << '\n';
      out << "blocks: " << assembled.sdp.block_sizes.size() << '\n';
      return kExitOk;
    }
    std::string kind;
    if (norm->parsed()) kind = "norm-bound";
    if (poincare->parsed()) kind = "poincare";
    if (stability->parsed()) kind = "stability";
    if (gain->parsed()) kind = "hinf-gain";
    if (estimator->parsed()) kind = "hinf-estimator";
    Job job = make_job(kind, input, f);
    return run_job(job, f, out);
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumericalFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace pisos
