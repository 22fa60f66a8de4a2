#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hadamard/bcd2.hpp"
#include "hadamard/bcdp.hpp"
#include "hadamard/error.hpp"
#include "hadamard/experiments.hpp"
#include "hadamard/identity.hpp"
#include "hadamard/init.hpp"
#include "hadamard/io.hpp"

namespace hadamard::cli {
namespace {

namespace fs = std::filesystem;

// Bad flag value or inconsistent flags.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unreadable or malformed input.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

std::size_t parse_count(const std::string& s, const std::string& what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || v == 0)
    throw UsageError(what + ": '" + s + "' is not a positive integer");
  return v;
}

std::vector<std::size_t> parse_counts(const std::string& s, const std::string& what) {
  std::vector<std::size_t> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_count(item, what));
  if (out.empty()) throw UsageError(what + ": empty list");
  return out;
}

double parse_real(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw UsageError(what + ": '" + s + "' is not a number");
  return v;
}

std::optional<MomentumParams> parse_momentum(const std::string& s) {
  if (s.empty() || s == "off" || s == "none") return std::nullopt;
  if (s == "default" || s == "on") return MomentumParams{};
  const auto items = split(s, ',');
  if (items.size() != 4)
    throw UsageError("--momentum: expected beta0,gamma,gamma-tilde,eta, got '" + s + "'");
  MomentumParams p{parse_real(items[0], "--momentum"), parse_real(items[1], "--momentum"),
                   parse_real(items[2], "--momentum"), parse_real(items[3], "--momentum")};
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError("--momentum '" + s + "': " + e.what());
  }
  return p;
}

HadlsMethod parse_solver(const std::string& s) {
  if (s == "exact") return HadlsMethod::Exact;
  if (s == "gd-lipschitz") return HadlsMethod::GdLipschitz;
  if (s == "gd-optimal") return HadlsMethod::GdOptimalStep;
  throw UsageError("--solver: unknown solver '" + s + "'");
}

DenseMatrix load_input(const std::string& input, const std::string& format) {
  try {
    if (io::is_synthetic_spec(input)) return io::generate_synthetic(input);
    std::optional<io::MatrixFormat> fmt;
    if (!format.empty()) fmt = io::parse_format(format);
    return io::load_matrix(input, fmt);
  } catch (const ParseError& e) {
    throw InputError(input + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(input + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
}

// Flags shared by decompose and the experiments.
struct SolverFlags {
  std::string solver = "exact";
  std::size_t inner_iters = 10;
  std::string momentum;
  std::size_t maxiter = 300;
  double tol = 1e-6;
  std::size_t patience = 10;
  bool parallel_columns = false;
  std::size_t threads = 0;
  CLI::Option* maxiter_opt = nullptr;
  CLI::Option* patience_opt = nullptr;

  void attach(CLI::App& app) {
    app.add_option("--solver", solver, "exact | gd-lipschitz | gd-optimal")
        ->capture_default_str();
    app.add_option("--inner-iters", inner_iters, "Gradient steps per column for the GD solvers")
        ->capture_default_str();
    app.add_option("--momentum", momentum,
                   "beta0,gamma,gamma-tilde,eta (or 'default'); off when omitted");
    maxiter_opt =
        app.add_option("--maxiter", maxiter, "Maximum outer iterations")->capture_default_str();
    app.add_option("--tol", tol, "Minimum decrease of the relative error per iteration")
        ->capture_default_str();
    patience_opt = app.add_option("--patience", patience,
                                  "Stop after this many iterations without enough decrease "
                                  "(0 = never)")
                       ->capture_default_str();
    app.add_flag("--parallel-columns", parallel_columns,
                 "Solve the column subproblems of a factor on several threads");
    app.add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
  }

  SolverOptions options() const {
    SolverOptions o;
    o.solver_kind.method = parse_solver(solver);
    o.solver_kind.inner_iters = inner_iters;
    o.momentum = parse_momentum(momentum);
    o.max_outer_iters = maxiter;
    o.tol_decrease = tol;
    o.patience = patience;
    o.parallel_columns = parallel_columns;
    o.threads = threads;
    return o;
  }
};

std::vector<std::size_t> resolve_ranks(const std::string& ranks, std::size_t rank,
                                       std::size_t factors) {
  if (!ranks.empty()) {
    auto out = parse_counts(ranks, "--ranks");
    if (factors != 0 && factors != out.size())
      throw UsageError("--factors " + std::to_string(factors) + " disagrees with --ranks " + ranks);
    return out;
  }
  if (rank == 0) throw UsageError("one of --rank or --ranks is required");
  return std::vector<std::size_t>(factors == 0 ? 2 : factors, rank);
}

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    io::write_file_atomic(path, text);
  }
}

// ---------------------------------------------------------------- decompose

struct DecomposeFlags {
  std::string input;
  std::string format;
  std::size_t rank = 0;
  std::string ranks;
  std::size_t factors = 0;
  std::string init = "svd";
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string trace;
  bool no_scaling = false;
  bool strict = false;
  SolverFlags solver;
};

int cmd_decompose(const DecomposeFlags& f, std::ostream& out, std::ostream& err) {
  const DenseMatrix x = load_input(f.input, f.format);
  std::vector<std::size_t> ranks = resolve_ranks(f.ranks, f.rank, f.factors);
  if (ranks.size() < 2) throw UsageError("--factors must be at least 2");
  SolverOptions opts = f.solver.options();

  std::vector<std::string> warnings;
  HadamardModel init;
  if (f.init == "exact-identity") {
    const std::size_t budget = std::accumulate(ranks.begin(), ranks.end(), std::size_t{0});
    if (budget < 2) throw UsageError("exact-identity needs a budget of at least 2");
    IdentityDecomposition dec = build_identity_decomposition(budget);
    auto want = dec.ranks, got = ranks;
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    if (want != got) {
      std::string parts;
      for (std::size_t r : dec.ranks) parts += (parts.empty() ? "" : ",") + std::to_string(r);
      throw UsageError("--init exact-identity needs --ranks " + parts);
    }
    if (x.rows() != dec.n || x.cols() != dec.n) {
      throw UsageError("--init exact-identity needs a " + std::to_string(dec.n) + "x" +
                       std::to_string(dec.n) + " input");
    }
    ranks = dec.ranks;
    init = dec.to_model();
    if (!f.no_scaling) {
      ScaleResult scaled = optimal_scale(x, std::move(init));
      if (scaled.degenerate) warnings.push_back("optimal scaling skipped (degenerate)");
      init = std::move(scaled.model);
    }
  } else {
    InitConfig ic;
    try {
      ic.kind = parse_init_kind(f.init);
    } catch (const std::invalid_argument&) {
      throw UsageError("--init: unknown initialization '" + f.init + "'");
    }
    ic.ranks = ranks;
    ic.seed = f.seed;
    ic.optimal_scaling = !f.no_scaling;
    InitOutcome o = initialize(x, ic);
    if (o.svd_unconverged) warnings.push_back("SVD did not converge during initialization");
    if (o.scaling_degenerate) warnings.push_back("optimal scaling skipped (degenerate)");
    init = std::move(o.model);
  }
  opts.ranks = ranks;
  opts.seed = f.seed;

  auto [model, trace] = ranks.size() == 2 ? run(x, std::move(init), opts)
                                          : run_multi(x, std::move(init), opts);
  if (trace.ridged_columns > 0) {
    warnings.push_back(std::to_string(trace.ridged_columns) +
                       " column subproblems needed ridge regularization");
  }
  if (trace.singular_columns > 0) {
    warnings.push_back(std::to_string(trace.singular_columns) +
                       " column subproblems remained singular");
  }

  if (!f.trace.empty()) io::write_file_atomic(f.trace, io::trace_to_csv(trace));
  if (!f.out_dir.empty()) {
    fs::create_directories(f.out_dir);
    for (std::size_t i = 0; i < model.p(); ++i) {
      const std::string k = std::to_string(i + 1);
      io::write_file_atomic(fs::path(f.out_dir) / ("W" + k + ".csv"),
                            io::to_csv(model.factor(i).w));
      io::write_file_atomic(fs::path(f.out_dir) / ("H" + k + ".csv"),
                            io::to_csv(model.factor(i).h));
    }
  }

  for (const auto& w : warnings) err << "warning: " << w << '\n';
  out << "rel_error=" << io::format_real(trace.final_error()) << '\n';
  return f.strict && !warnings.empty() ? kRuntimeFailure : kOk;
}

// --------------------------------------------------------------- experiment

struct ExperimentFlags {
  std::string kind;
  std::string input;
  std::string format;
  std::string size = "100x100";
  std::size_t rank = 10;
  std::size_t trials = 10;
  std::size_t iters = 100;
  std::uint64_t seed = 0;
  std::string out;
  std::string budgets;
  std::string factors;
  std::string grid;
  std::string init = "svd";
  std::size_t budget = 0;
  std::size_t n = 0;
  std::string ranks;
  SolverFlags solver;
};

DataSource curve_data(const ExperimentFlags& f) {
  if (!f.input.empty()) {
    DenseMatrix x = load_input(f.input, f.format);
    return [x](std::size_t) { return x; };
  }
  const auto dims = split(f.size, 'x');
  if (dims.size() != 2) throw UsageError("--size: expected MxN, got '" + f.size + "'");
  return normal_source(parse_count(dims[0], "--size"), parse_count(dims[1], "--size"), f.seed);
}

std::vector<MomentumSetting> parse_grid(const std::string& grid) {
  std::vector<MomentumSetting> out;
  for (const auto& item : split(grid, ';')) {
    if (item == "off" || item == "none") {
      out.push_back({"beta=0", std::nullopt});
      continue;
    }
    const auto v = split(item, ',');
    if (v.size() != 4)
      throw UsageError("--grid: expected beta0,gamma,gamma-tilde,eta, got '" + item + "'");
    MomentumParams p{parse_real(v[0], "--grid"), parse_real(v[1], "--grid"),
                     parse_real(v[2], "--grid"), parse_real(v[3], "--grid")};
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError("--grid entry '" + item + "': " + e.what());
    }
    out.push_back({"beta0=" + v[0] + ";gamma=" + v[1] + ";gamma_tilde=" + v[2] + ";eta=" + v[3],
                   p});
  }
  if (out.empty()) throw UsageError("--grid: empty grid");
  return out;
}

struct RecoveryRow {
  std::size_t budget;
  std::size_t n;
  std::vector<std::size_t> ranks;
};

std::vector<RecoveryRow> default_recovery_rows() {
  return {{6, 9, {3, 3}},          {7, 12, {2, 2, 3}},       {8, 18, {2, 3, 3}},
          {9, 27, {3, 3, 3}},      {10, 36, {2, 2, 3, 3}},   {11, 54, {2, 3, 3, 3}},
          {12, 55, {3, 3, 3, 3}},  {12, 81, {3, 3, 3, 3}},   {16, 81, {3, 3, 3, 3, 2, 2}}};
}

Table identity_recovery(const ExperimentFlags& f, SolverOptions solver) {
  std::vector<RecoveryRow> rows;
  if (f.budget == 0) {
    if (f.n != 0 || !f.ranks.empty()) throw UsageError("--n and --ranks need --budget");
    rows = default_recovery_rows();
  } else {
    RecoveryRow row{f.budget, f.n, {}};
    row.ranks = f.ranks.empty() ? optimal_partition(f.budget).parts : parse_counts(f.ranks, "--ranks");
    if (row.n == 0) row.n = capacity(f.budget);
    rows.push_back(std::move(row));
  }

  Table table;
  table.columns = {"R", "n", "p", "success_pct", "mean_error", "std_error"};
  for (const auto& row : rows) {
    RecoveryConfig rc;
    rc.budget = row.budget;
    rc.n = row.n;
    rc.ranks = row.ranks;
    rc.trials = f.trials;
    rc.seed = f.seed;
    rc.solver = solver;
    rc.trial_threads = f.solver.threads;
    const RecoveryStats s = recovery_experiment(rc);
    table.rows.push_back({static_cast<double>(row.budget), static_cast<double>(row.n),
                          static_cast<double>(row.ranks.size()), 100.0 * s.success_rate,
                          s.mean_error, s.std_error});
  }
  return table;
}

int cmd_experiment(const ExperimentFlags& f, std::ostream& out) {
  SolverOptions solver = f.solver.options();
  Table table;
  if (f.kind == "init-compare") {
    InitCompareConfig c;
    c.data = curve_data(f);
    c.trials = f.trials;
    c.rank = f.rank;
    c.iterations = f.iters;
    c.seed = f.seed;
    c.solver = solver;
    table = init_compare(c);
  } else if (f.kind == "momentum-sweep") {
    MomentumSweepConfig c;
    c.data = curve_data(f);
    c.trials = f.trials;
    c.rank = f.rank;
    c.iterations = f.iters;
    c.seed = f.seed;
    try {
      c.init = parse_init_kind(f.init);
    } catch (const std::invalid_argument&) {
      throw UsageError("--init: unknown initialization '" + f.init + "'");
    }
    c.solver = solver;
    if (!f.grid.empty()) c.grid = parse_grid(f.grid);
    table = momentum_sweep(c);
  } else if (f.kind == "svd-compare") {
    SvdCompareConfig c;
    if (!f.budgets.empty()) c.budgets = parse_counts(f.budgets, "--budgets");
    if (!f.factors.empty()) c.factor_counts = parse_counts(f.factors, "--factors");
    c.solver = solver;
    const DenseMatrix x = f.input.empty() ? curve_data(f)(0) : load_input(f.input, f.format);
    try {
      table = svd_compare(x, c);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  } else if (f.kind == "identity-recovery") {
    const SolverOptions defaults = recovery_solver_defaults();
    if (f.solver.maxiter_opt->count() == 0) solver.max_outer_iters = defaults.max_outer_iters;
    if (f.solver.patience_opt->count() == 0) solver.patience = defaults.patience;
    try {
      table = identity_recovery(f, solver);
    } catch (const UsageError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  } else {
    throw UsageError("unknown experiment '" + f.kind + "'");
  }
  write_or_print(f.out, table.to_csv(), out);
  return kOk;
}

// ----------------------------------------------------------------- capacity

int cmd_capacity(std::size_t budget, const std::string& out_dir, std::ostream& out) {
  const BudgetPartition part = optimal_partition(budget);
  std::string parts;
  for (std::size_t r : part.parts) parts += (parts.empty() ? "" : ",") + std::to_string(r);
  out << "N=" << capacity(budget) << '\n' << "parts=[" << parts << "]\n";
  if (!out_dir.empty()) {
    const IdentityDecomposition dec = build_identity_decomposition(budget);
    fs::create_directories(out_dir);
    for (std::size_t i = 0; i < dec.factors.size(); ++i) {
      const std::string k = std::to_string(i + 1);
      io::write_file_atomic(fs::path(out_dir) / ("W" + k + ".csv"), io::to_csv(dec.factors[i].w));
      io::write_file_atomic(fs::path(out_dir) / ("H" + k + ".csv"), io::to_csv(dec.factors[i].h));
    }
  }
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hadamard decomposition of matrices: X ~ (W1 H1) o ... o (Wp Hp)", "hadamard"};
  app.require_subcommand(1);

  DecomposeFlags dec;
  CLI::App* decompose = app.add_subcommand("decompose", "Fit a Hadamard decomposition to a matrix");
  decompose->add_option("--input", dec.input, "Matrix file or synth:... generator")->required();
  decompose->add_option("--format", dec.format, "csv | mtx | pgm (default: from extension)");
  decompose->add_option("--rank", dec.rank, "Rank of every factor");
  decompose->add_option("--ranks", dec.ranks, "Comma-separated rank per factor");
  decompose->add_option("--factors", dec.factors, "Number of factors p (default 2)");
  decompose->add_option("--init", dec.init,
                        "random | xavier-uniform | xavier-normal | svd | kmeans | exact-identity")
      ->capture_default_str();
  decompose->add_option("--seed", dec.seed, "Seed of the random initializations")
      ->capture_default_str();
  decompose->add_option("--out", dec.out_dir, "Directory receiving W1.csv, H1.csv, ...");
  decompose->add_option("--trace", dec.trace, "Path of the error trace CSV");
  decompose->add_flag("--no-scaling", dec.no_scaling, "Skip optimal scaling of the initial model");
  decompose->add_flag("--strict", dec.strict, "Exit with status 1 when any warning is raised");
  dec.solver.attach(*decompose);

  ExperimentFlags ex;
  CLI::App* experiment = app.add_subcommand("experiment", "Run a comparison experiment");
  experiment
      ->add_option("kind", ex.kind, "init-compare | momentum-sweep | svd-compare | identity-recovery")
      ->required();
  experiment->add_option("--input", ex.input, "Fixed data matrix (default: standard-normal draws)");
  experiment->add_option("--format", ex.format, "csv | mtx | pgm");
  experiment->add_option("--size", ex.size, "MxN of the generated standard-normal data")
      ->capture_default_str();
  experiment->add_option("--rank", ex.rank, "Rank of each factor")->capture_default_str();
  experiment->add_option("--trials", ex.trials, "Number of trials")->capture_default_str();
  experiment->add_option("--iters", ex.iters, "Outer iterations per curve")->capture_default_str();
  experiment->add_option("--seed", ex.seed, "Base seed; trial k uses seed + k")
      ->capture_default_str();
  experiment->add_option("--out", ex.out, "Output CSV (default: standard output)");
  experiment->add_option("--budgets", ex.budgets, "svd-compare budgets, e.g. 12,24,36,48");
  experiment->add_option("--factors", ex.factors, "svd-compare factor counts, e.g. 2,3,4");
  experiment->add_option("--grid", ex.grid,
                         "momentum-sweep settings 'b0,g,gt,eta;...' ('off' = no extrapolation)");
  experiment->add_option("--init", ex.init, "momentum-sweep initialization")->capture_default_str();
  experiment->add_option("--budget", ex.budget, "identity-recovery budget R");
  experiment->add_option("--n", ex.n, "identity-recovery size (default: capacity of R)");
  experiment->add_option("--ranks", ex.ranks, "identity-recovery rank split");
  ex.solver.attach(*experiment);

  std::size_t budget = 0;
  std::string cap_out;
  CLI::App* cap = app.add_subcommand("capacity", "Largest identity exactly decomposable with budget R");
  cap->add_option("R", budget, "Budget (sum of ranks)")->required();
  cap->add_option("--out", cap_out, "Directory receiving the constructed factors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*decompose) return cmd_decompose(dec, out, err);
    if (*experiment) return cmd_experiment(ex, out);
    return cmd_capacity(budget, cap_out, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const NonFiniteError& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

}  // namespace hadamard::cli
