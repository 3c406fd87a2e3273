#include "nashpde/commands.hpp"

#include "nashpde/game.hpp"
#include "nashpde/io.hpp"
#include "nashpde/objectives.hpp"
#include "nashpde/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>

#ifndef NASHPDE_VERSION
#define NASHPDE_VERSION "0.0.0"
#endif

namespace nashpde {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double min_alpha(const ProblemSpec& spec) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : spec.players) m = std::min(m, p.alpha);
  return m;
}

/// Output bookkeeping shared by the three commands.
class Run {
 public:
  Run(std::string command, const CliOptions& options) : command_(std::move(command)), options_(options) {}

  const CliOptions& options() const { return options_; }

  void write_json(const std::string& name, const json& doc) {
    write_text_file(options_.out / name, doc.dump(2) + "\n");
    outputs_.push_back(name);
  }

  void record(const std::string& name) { outputs_.push_back(name); }

  void write_manifest(const std::string& config_text, double seconds) {
    json manifest;
    manifest["command"] = command_;
    manifest["config_path"] = options_.config.string();
    manifest["config_sha256"] = sha256_hex(config_text);
    manifest["seed"] = options_.seed;
    manifest["tool_version"] = tool_version();
    manifest["outputs"] = outputs_;
    manifest["outputs"].push_back("manifest.json");
    manifest["timings"] = {{"total_seconds", seconds}};
    write_text_file(options_.out / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::string command_;
  const CliOptions& options_;
  std::vector<std::string> outputs_;
};

struct Loaded {
  std::string text;
  ProblemSpec spec;
};

// Returns nullopt after logging when the configuration is unusable.
std::optional<Loaded> load(const CliOptions& options, std::ostream& log) {
  try {
    Loaded loaded;
    loaded.text = read_text_file(options.config);
    loaded.spec = parse_config(loaded.text, options.config.parent_path());
    if (options.check_manifest) {
      const auto manifest_path = options.out / "manifest.json";
      if (!std::filesystem::exists(manifest_path)) {
        log << "error: --check-manifest: no manifest at " << manifest_path.string() << "\n";
        return std::nullopt;
      }
      const json manifest = json::parse(read_text_file(manifest_path));
      const std::string expected = manifest.value("config_sha256", "");
      const std::string actual = sha256_hex(loaded.text);
      if (expected != actual) {
        log << "error: --check-manifest: config hash " << actual << " does not match manifest " << expected << "\n";
        return std::nullopt;
      }
      log << "manifest check: config hash matches\n";
    }
    return loaded;
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
  }
  return std::nullopt;
}

std::optional<std::string> pick_solver(const CliOptions& options, const NashOperator& op, std::ostream& log) {
  const std::string solver =
      options.solver.value_or(op.mode() == OperatorMode::symmetric ? std::string("cg") : std::string("gmres"));
  if (solver != "cg" && solver != "gmres") {
    log << "error: unknown solver '" << solver << "' (expected cg or gmres)\n";
    return std::nullopt;
  }
  if (solver == "cg" && op.mode() != OperatorMode::symmetric) {
    log << "error: --solver cg needs common rho and eta across players\n";
    return std::nullopt;
  }
  return solver;
}

NashReport run_solver(const std::string& solver, const NashOperator& op, const SolverOptions& options) {
  return solver == "cg" ? solve_cg(op, options) : solve_general(op, options);
}

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

json to_json(const Check& c) {
  json j{{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}};
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

void print_check(std::ostream& log, const Check& c) {
  char line[160];
  std::snprintf(line, sizeof line, "  %-34s %-4s value=%-12.4g threshold=%.3g", c.name.c_str(),
                c.passed ? "PASS" : "FAIL", c.value, c.threshold);
  log << line << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
}

}  // namespace

const char* tool_version() { return NASHPDE_VERSION; }

int cmd_solve(const CliOptions& options, std::ostream& log) {
  const auto start = Clock::now();
  const auto loaded = load(options, log);
  if (!loaded) return kExitConfig;
  const ProblemSpec& spec = loaded->spec;
  const NashOperator op(spec, options.threads);
  const auto solver = pick_solver(options, op, log);
  if (!solver) return kExitConfig;

  SolverOptions solver_options;
  solver_options.rtol = options.rtol;
  solver_options.seed = options.seed;
  solver_options.ellipticity_samples = 8;

  Run run("solve", options);
  int code = kExitOk;
  NashReport report;
  std::string note;
  try {
    report = run_solver(*solver, op, solver_options);
  } catch (const NonConvergenceError& e) {
    report = e.report();
    note = e.what();
    code = kExitNonConvergence;
    log << "non-convergence: " << e.what() << "\n";
  }

  json doc = to_json(report);
  doc["players"] = spec.num_players();
  doc["control_dimension"] = spec.control_dimension();
  if (!note.empty()) doc["note"] = note;
  run.write_json("report.json", doc);
  for (int i = 0; i < spec.num_players(); ++i) {
    const std::string name = "control_player" + std::to_string(i + 1) + ".csv";
    write_control_csv(options.out / name, spec, report.u, i);
    run.record(name);
  }
  write_field_csv(options.out / "state.csv", solve_state(spec, report.u).y, spec.grid);
  run.record("state.csv");
  run.write_manifest(loaded->text, seconds_since(start));

  log << "mode=" << to_string(report.mode) << " solver=" << report.solver << " iterations=" << report.iterations
      << " residual=" << format_double(report.residual) << "\n";
  for (std::size_t i = 0; i < report.J_values.size(); ++i) {
    log << "J_" << (i + 1) << " = " << format_double(report.J_values[i]) << "\n";
  }
  return code;
}

int cmd_verify(const CliOptions& options, std::ostream& log) {
  const auto start = Clock::now();
  const auto loaded = load(options, log);
  if (!loaded) return kExitConfig;
  const ProblemSpec& spec = loaded->spec;
  const NashOperator op(spec, options.threads);
  const auto solver = pick_solver(options, op, log);
  if (!solver) return kExitConfig;
  const bool symmetric = op.mode() == OperatorMode::symmetric;

  std::vector<Check> checks;
  json equivalence = json::array();
  std::mt19937_64 rng(options.seed);

  for (int i = 0; i < spec.num_players(); ++i) {
    const ControlBundle v = random_bundle(spec, rng);
    const double err = fd_gradient_check(spec, i, v, 10, 1e-5, options.seed + static_cast<std::uint64_t>(i));
    checks.push_back({"gradient_fd_player" + std::to_string(i + 1), err < 1e-6, err, 1e-6, ""});
  }

  double identity = 0.0;
  for (int s = 0; s < 5; ++s) identity = std::max(identity, adjoint_identity_defect(spec, rng));
  checks.push_back({"adjoint_identity", identity < 1e-10, identity, 1e-10, ""});

  {
    const ControlBundle v = random_bundle(spec, rng);
    const ControlBundle affine = op.apply(v) - op.rhs();
    ControlBundle stacked(spec);
    for (int i = 0; i < spec.num_players(); ++i) stacked[i] = riesz_gradient(spec, i, v);
    const Vector diff = (stacked - affine).flatten();
    const double scale = std::max(1.0, affine.flatten().cwiseAbs().maxCoeff());
    const double defect = diff.cwiseAbs().maxCoeff() / scale;
    checks.push_back({"affine_consistency", defect <= 1e-12, defect, 1e-12, ""});
  }

  if (symmetric) {
    const ControlBundle v = random_bundle(spec, rng);
    const ControlBundle w = random_bundle(spec, rng);
    const double defect = std::abs(op.inner(op.apply(v), w) - op.inner(v, op.apply(w)));
    checks.push_back({"operator_symmetry", defect <= 1e-10, defect, 1e-10, ""});
    try {
      const double probe = ellipticity_probe(op, 10, options.seed);
      checks.push_back({"coercivity", true, probe, min_alpha(spec) - 1e-10, ""});
    } catch (const std::logic_error& e) {
      checks.push_back({"coercivity", false, 0.0, min_alpha(spec) - 1e-10, e.what()});
    }
  }

  SolverOptions solver_options;
  solver_options.rtol = options.rtol;
  solver_options.seed = options.seed;
  NashReport nash;
  try {
    nash = run_solver(*solver, op, solver_options);
  } catch (const NonConvergenceError& e) {
    log << "non-convergence: " << e.what() << "\n";
    json doc{{"passed", false}, {"first_failure", "nash_solve"}, {"note", e.what()}};
    Run run("verify", options);
    run.write_json("report.json", doc);
    run.write_manifest(loaded->text, seconds_since(start));
    return kExitNonConvergence;
  }
  checks.push_back({"nash_residual", nash.residual <= options.rtol, nash.residual, options.rtol, *solver});

  const double worst = unilateral_check(op, nash.u, 40, options.seed);
  checks.push_back({"unilateral_deviation", worst >= -1e-12, worst, -1e-12, "40 trials"});

  if (symmetric) {
    const CoefficientSet coefficients = options.literal_coefficients ? CoefficientSet::literal : CoefficientSet::derived;
    std::vector<FunctionalFamily> families{FunctionalFamily::coop()};
    int pairs = 0;
    for (int j = 0; j < spec.num_players() && pairs < options.max_pairs; ++j) {
      for (int p = 0; p < spec.num_players() && pairs < options.max_pairs; ++p, ++pairs) {
        families.push_back(FunctionalFamily::jp(j, p));
      }
    }
    log << "  functional  constant(mean)          max deviation   argmin distance\n";
    for (const auto& family : families) {
      const EquivalenceReport r = certify_equivalence(op, family, 20, options.seed, coefficients);
      equivalence.push_back(to_json(r));
      char line[160];
      std::snprintf(line, sizeof line, "  %-10s  %-22.15g  %-14.3e  %s", family.label().c_str(), r.constant_mean,
                    r.constant_max_deviation,
                    r.argmin_evaluated ? format_double(r.argmin_distance).c_str() : "not evaluated");
      log << line << "\n";
      checks.push_back({"equivalence_" + family.label() + "_constant", r.constant_pass, r.constant_max_deviation,
                        1e-10 * (1.0 + std::abs(r.constant_mean)), ""});
      if (coefficients == CoefficientSet::derived) {
        checks.push_back({"equivalence_" + family.label() + "_gradient", r.gradient_consistent, r.gradient_mismatch,
                          1e-10, ""});
        checks.push_back(
            {"equivalence_" + family.label() + "_argmin", r.argmin_distance < 1e-8, r.argmin_distance, 1e-8, ""});
      }
    }
  }

  json doc;
  doc["mode"] = to_string(op.mode());
  doc["seed"] = options.seed;
  doc["checks"] = json::array();
  std::string first_failure;
  for (const auto& c : checks) {
    doc["checks"].push_back(to_json(c));
    print_check(log, c);
    if (!c.passed && first_failure.empty()) first_failure = c.name;
  }
  doc["equivalence"] = equivalence;
  doc["passed"] = first_failure.empty();
  if (!first_failure.empty()) doc["first_failure"] = first_failure;
  doc["timings"] = {{"total_seconds", seconds_since(start)}};

  Run run("verify", options);
  run.write_json("report.json", doc);
  run.write_manifest(loaded->text, seconds_since(start));

  if (!first_failure.empty()) {
    log << "verification failed: " << first_failure << "\n";
    return kExitVerification;
  }
  log << "all checks passed\n";
  return kExitOk;
}

int cmd_oracle(const CliOptions& options, std::ostream& log) {
  const auto start = Clock::now();
  const auto loaded = load(options, log);
  if (!loaded) return kExitConfig;
  const ProblemSpec& spec = loaded->spec;
  const NashOperator op(spec, options.threads);
  const auto solver = pick_solver(options, op, log);
  if (!solver) return kExitConfig;
  const bool symmetric = op.mode() == OperatorMode::symmetric;

  DenseOperator dense;
  try {
    dense = assemble_dense(op);
  } catch (const DimensionCapError& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  Run run("oracle", options);
  if (options.dump_dense) {
    write_matrix_csv(options.out / "dense_A.csv", dense.A);
    write_matrix_csv(options.out / "dense_b.csv", dense.b);
    run.record("dense_A.csv");
    run.record("dense_b.csv");
  }

  std::vector<Check> checks;
  const double defect = symmetry_defect(dense);
  const double lambda_min = min_eigen_sym(dense);
  if (symmetric) {
    checks.push_back({"symmetry_defect", defect < 1e-12, defect, 1e-12, ""});
    checks.push_back({"min_eigen_sym", lambda_min >= min_alpha(spec) - 1e-10, lambda_min, min_alpha(spec) - 1e-10, ""});
  }

  json doc;
  doc["mode"] = to_string(op.mode());
  doc["dimension"] = dense.dimension();
  doc["symmetry_defect"] = defect;
  doc["min_eigen_sym"] = lambda_min;
  doc["min_alpha"] = min_alpha(spec);
  doc["seed"] = options.seed;

  int code = kExitOk;
  try {
    const ControlBundle direct = direct_solve(dense);
    SolverOptions solver_options;
    solver_options.rtol = options.rtol;
    solver_options.seed = options.seed;
    const NashReport iterative = run_solver(*solver, op, solver_options);
    const double scale = std::max(norm(spec, direct), std::numeric_limits<double>::min());
    const double agreement = norm(spec, direct - iterative.u) / scale;
    checks.push_back({"direct_vs_" + *solver, agreement < 1e-8, agreement, 1e-8, ""});
    doc["iterations"] = iterative.iterations;
    doc["residual"] = iterative.residual;
  } catch (const SingularOperatorError& e) {
    checks.push_back({"direct_solve", false, 0.0, 0.0, e.what()});
  } catch (const NonConvergenceError& e) {
    log << "non-convergence: " << e.what() << "\n";
    doc["note"] = e.what();
    code = kExitNonConvergence;
  }

  doc["checks"] = json::array();
  std::string first_failure;
  for (const auto& c : checks) {
    doc["checks"].push_back(to_json(c));
    print_check(log, c);
    if (!c.passed && first_failure.empty()) first_failure = c.name;
  }
  doc["passed"] = first_failure.empty() && code == kExitOk;
  if (!first_failure.empty()) doc["first_failure"] = first_failure;
  doc["timings"] = {{"total_seconds", seconds_since(start)}};
  run.write_json("report.json", doc);
  run.write_manifest(loaded->text, seconds_since(start));

  if (code != kExitOk) return code;
  return first_failure.empty() ? kExitOk : kExitVerification;
}

int run_command(const std::string& command, const CliOptions& options, std::ostream& log) {
  try {
    if (command == "solve") return cmd_solve(options, log);
    if (command == "verify") return cmd_verify(options, log);
    if (command == "oracle") return cmd_oracle(options, log);
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    // I/O failures and rejected options; there is no separate code for them.
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  log << "error: unknown command '" << command << "'\n";
  return kExitConfig;
}

}  // namespace nashpde
