#include "bagbound/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "bagbound/bounds.hpp"
#include "bagbound/gap.hpp"
#include "bagbound/harness.hpp"
#include "bagbound/oracle.hpp"
#include "bagbound/parallel.hpp"
#include "bagbound/problem_constants.hpp"
#include "bagbound/programs.hpp"

namespace bagbound {

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Runs `f`, reporting invalid arguments as usage errors.
template <typename F>
auto usage_guard(F&& f) {
  try {
    return f();
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
}

// Expands `--config FILE` into flag tokens placed ahead of the explicit
// flags, so explicit flags win under the take-last policy.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.empty()) return args;
  const std::string& sub = args[0];
  if (sub != "bound" && sub != "gap" && sub != "dev-oracle") return args;
  std::vector<std::string> rest;
  std::vector<std::string> injected;
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    const nlohmann::json j = read_json_file(path);
    if (!j.is_object()) throw UsageError("config " + path + ": expected a JSON object");
    for (const auto& item : j.items()) {
      const auto& v = item.value();
      std::string value;
      if (v.is_string()) {
        value = v.get<std::string>();
      } else if (v.is_number() || v.is_boolean()) {
        value = v.dump();
      } else {
        throw UsageError("config " + path + ": value of '" + item.key() + "' must be a scalar");
      }
      injected.push_back("--" + item.key());
      injected.push_back(value);
    }
  }
  std::vector<std::string> out{sub};
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

Dataset read_data_file(const std::string& path, Index dim) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open data file " + path);
  std::vector<double> values;
  Index rows = 0;
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    Index cols = 0;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t end = std::min(line.find(',', pos), line.size());
      std::string field = line.substr(pos, end - pos);
      field.erase(0, field.find_first_not_of(" \t"));
      field.erase(field.find_last_not_of(" \t") + 1);
      double v = 0.0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw UsageError(path + ":" + std::to_string(line_no) + ": not a number: '" + field + "'");
      }
      values.push_back(v);
      ++cols;
      pos = end + 1;
    }
    if (cols != dim) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(dim) + " values");
    }
    ++rows;
  }
  if (rows == 0) throw UsageError("data file " + path + " has no observations");
  Eigen::MatrixXd obs = Eigen::Map<Eigen::MatrixXd>(values.data(), dim, rows);
  return Dataset(std::move(obs));
}

std::optional<Index> parse_b(const std::string& s) {
  if (s == "auto") return std::nullopt;
  Index v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 2) {
    throw UsageError("--B must be \"auto\" or an integer >= 2, got '" + s + "'");
  }
  return v;
}

LowerBoundMethod make_method(MethodKind kind, Index k, std::optional<Index> b, unsigned threads) {
  switch (kind) {
    case MethodKind::BaggingU:
      return BaggingMethod{k, b.value_or(0), ResampleScheme::WithoutReplacement, threads};
    case MethodKind::BaggingV:
      return BaggingMethod{k, b.value_or(0), ResampleScheme::WithReplacement, threads};
    case MethodKind::Batching:
      return BatchingMethod{k};
    case MethodKind::Single:
      break;
  }
  return SingleReplicationMethod{};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void print_rows(std::ostream& out, const std::vector<ExperimentRow>& rows, const ExperimentConfig& c) {
  if (!c.output.empty()) {
    emit(rows, c.format, c.output);
    out << "wrote " << rows.size() << " rows to " << c.output << '\n';
  } else if (c.format == OutputFormat::Json) {
    out << rows_to_json(rows).dump(2) << '\n';
  } else {
    out << rows_to_csv(rows);
  }
}

struct CommonArgs {
  std::string problem{"cvar"};
  std::string method{"bagging-u"};
  Index k{0};
  std::string b{"auto"};
  double alpha{0.05};
  std::uint64_t seed{1};
  std::string data;
  unsigned threads{0};
  Index reps{0};
  std::string output;
  std::string format{"csv"};
  std::string config;
};

void add_common(CLI::App* app, CommonArgs& a) {
  app->add_option("--problem", a.problem, "Problem key: cvar, portfolio, ip, toylp");
  app->add_option("--method", a.method, "bagging-u, bagging-v, batching or single");
  app->add_option("--k", a.k, "Resample or batch size");
  app->add_option("--B", a.b, "Bootstrap size or \"auto\" (5 n k)");
  app->add_option("--alpha", a.alpha, "One-sided level");
  app->add_option("--seed", a.seed, "Root seed");
  app->add_option("--data", a.data, "CSV file of observations, one per line");
  app->add_option("--threads", a.threads, std::string("Worker threads (default: ") + kThreadsEnvVar + ")");
  app->add_option("--reps", a.reps, "Run a coverage experiment with this many replications");
  app->add_option("--output", a.output, "Write the result to this file");
  app->add_option("--format", a.format, "Experiment output format: csv or json");
  app->add_option("--config", a.config, "JSON file of flag values; explicit flags win");
}

unsigned resolve_threads(unsigned t) { return t == 0 ? default_thread_count() : t; }

int run_bound(const CommonArgs& a, Index n, std::ostream& out) {
  const ProgramPtr program = usage_guard([&] { return make_program(a.problem); });
  const MethodKind kind = usage_guard([&] { return parse_method(a.method); });
  const std::optional<Index> b = parse_b(a.b);
  if (kind != MethodKind::Single && a.k < 1) throw UsageError("--k is required for " + a.method);

  if (a.reps > 0) {
    if (!a.data.empty()) throw UsageError("--data and --reps are mutually exclusive");
    ExperimentConfig c;
    c.problem = a.problem;
    c.mode = ExperimentMode::Lower;
    c.cells = {MethodCell{kind, {a.k}}};
    c.n = n;
    c.bootstrap_size = b;
    c.alpha = a.alpha;
    c.replications = a.reps;
    c.seed = a.seed;
    c.output = a.output;
    c.format = usage_guard([&] { return parse_format(a.format); });
    c.threads = a.threads;
    usage_guard([&] { c.validate(); return 0; });
    print_rows(out, run_experiment(c), c);
    return 0;
  }

  Dataset data = [&] {
    if (!a.data.empty()) return read_data_file(a.data, program->dim());
    RngStream rng(a.seed, {0, 0});
    return usage_guard([&] {
      if (n < 2) throw std::invalid_argument("--n must be at least 2");
      return program->generate(n, rng);
    });
  }();
  const RngStream rng(a.seed, {0, 2, static_cast<std::uint64_t>(a.k)});
  const unsigned threads = resolve_threads(a.threads);

  nlohmann::json report;
  if (kind == MethodKind::BaggingU || kind == MethodKind::BaggingV) {
    BagOptions opt;
    opt.k = a.k;
    opt.bootstrap_size = b.value_or(0);
    opt.alpha = a.alpha;
    opt.scheme = kind == MethodKind::BaggingU ? ResampleScheme::WithoutReplacement : ResampleScheme::WithReplacement;
    opt.threads = threads;
    if (opt.scheme == ResampleScheme::WithoutReplacement && opt.k > data.size() - 1) {
      throw UsageError("--k must be at most n - 1 for bagging-u");
    }
    if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw UsageError("--alpha must be in (0, 1)");
    const BagOutput bag = bag_bound(data, *program, opt, rng);
    out << a.method << " n=" << bag.n << " k=" << bag.k << " B=" << bag.bootstrap_size
        << " point=" << format_double(bag.z_bag) << " sigma_ij=" << format_double(bag.sigma_ij)
        << " lower_bound=" << format_double(bag.lower_bound) << '\n';
    if (bag.below_recommended_b) {
      out << "warning: B=" << bag.bootstrap_size << " is below the recommended 5nk="
          << recommended_bootstrap_size(bag.n, bag.k) << '\n';
    }
    report = to_json(bag);
  } else {
    if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw UsageError("--alpha must be in (0, 1)");
    if (kind == MethodKind::Batching && data.size() / a.k < 2) throw UsageError("need at least two batches");
    if (data.size() < 2) throw UsageError("need at least two observations");
    const BoundReport r = lower_bound(data, *program, make_method(kind, a.k, b, threads), a.alpha, rng);
    out << a.method << " n=" << r.n << " k=" << r.k;
    if (kind == MethodKind::Batching) out << " m=" << r.batches;
    out << " point=" << format_double(r.point) << " stderr=" << format_double(r.std_error)
        << " lower_bound=" << format_double(r.bound) << '\n';
    report = to_json(r);
  }
  report["problem"] = a.problem;
  report["seed"] = a.seed;
  if (!a.output.empty()) write_text(a.output, report.dump(2) + "\n");
  return 0;
}

int run_gap(const CommonArgs& a, Index n1, Index n2, const std::string& approach, std::ostream& out) {
  const ProgramPtr program = usage_guard([&] { return make_program(a.problem); });
  const MethodKind kind = usage_guard([&] { return parse_method(a.method); });
  const ExperimentMode mode = usage_guard([&] { return parse_mode(approach); });
  if (mode == ExperimentMode::Lower) throw UsageError("--approach must be bc or crn");
  const std::optional<Index> b = parse_b(a.b);
  if (kind != MethodKind::Single && a.k < 1) throw UsageError("--k is required for " + a.method);

  ExperimentConfig c;
  c.problem = a.problem;
  c.mode = mode;
  c.cells = {MethodCell{kind, {a.k}}};
  c.n1 = n1;
  c.n2 = n2;
  c.bootstrap_size = b;
  c.alpha = a.alpha;
  c.replications = std::max<Index>(a.reps, 1);
  c.seed = a.seed;
  c.output = a.output;
  c.format = usage_guard([&] { return parse_format(a.format); });
  c.threads = a.threads;

  if (a.reps > 0) {
    if (!a.data.empty()) throw UsageError("--data and --reps are mutually exclusive");
    usage_guard([&] { c.validate(); return 0; });
    print_rows(out, run_experiment(c), c);
    return 0;
  }

  Dataset training = Dataset(Eigen::MatrixXd::Zero(program->dim(), 1));
  Dataset evaluation = training;
  if (!a.data.empty()) {
    const Dataset all = read_data_file(a.data, program->dim());
    if (n1 < 1 || n1 >= all.size()) throw UsageError("--n1 must split the data file into two non-empty parts");
    training = all.slice(0, n1);
    evaluation = all.slice(n1, all.size() - n1);
    c.n2 = evaluation.size();
  }
  usage_guard([&] { c.validate(); return 0; });
  if (a.data.empty()) {
    RngStream train_rng(a.seed, {0, 0});
    RngStream eval_rng(a.seed, {0, 1});
    training = program->generate(n1, train_rng);
    evaluation = program->generate(n2, eval_rng);
  }
  const GapSetup setup = make_gap_setup(*program, std::move(training), std::move(evaluation), a.alpha);
  const RngStream rng(a.seed, {0, 2, static_cast<std::uint64_t>(a.k)});
  const LowerBoundMethod method = make_method(kind, a.k, b, resolve_threads(a.threads));
  const GapReport g = mode == ExperimentMode::GapBc ? gap_bound_bc(setup, program, method, rng)
                                                    : gap_bound_crn(setup, program, method, rng);
  out << approach << ' ' << a.method << " n1=" << setup.training.size() << " n2=" << setup.evaluation.size()
      << " gap_upper_bound=" << format_double(g.upper_bound) << " lower=" << format_double(g.lower.bound);
  if (mode == ExperimentMode::GapBc) out << " value_upper=" << format_double(g.value_upper);
  const auto z_hat = program->objective(setup.x_hat);
  const auto z_star = program->true_optimum();
  if (z_hat && z_star) out << " true_gap=" << format_double(*z_hat - *z_star);
  out << '\n';

  if (!a.output.empty()) {
    nlohmann::json j;
    j["problem"] = a.problem;
    j["approach"] = to_string(mode);
    j["gap_upper_bound"] = g.upper_bound;
    j["lower"] = to_json(g.lower);
    if (mode == ExperimentMode::GapBc) {
      j["value_upper"] = g.value_upper;
      j["value_mean"] = g.value_mean;
      j["value_stderr"] = g.value_std_error;
    }
    j["x_hat"] = std::vector<double>(setup.x_hat.data(), setup.x_hat.data() + setup.x_hat.size());
    j["seed"] = a.seed;
    write_text(a.output, j.dump(2) + "\n");
  }
  return 0;
}

struct OracleArgs {
  std::string mode{"u"};
  std::string problem{"cvar"};
  Index d{4};
  Index n{8};
  Index k{3};
  Index reps{1000};
  Index outer{1000};
  Index inner{100};
  std::uint64_t seed{1};
  unsigned threads{0};
  std::string config;
};

int run_oracle(const OracleArgs& a, std::ostream& out) {
  auto program_for = [&]() -> ProgramPtr {
    return usage_guard([&] { return a.problem == "example1" ? example1_program(a.d) : make_program(a.problem); });
  };
  const unsigned threads = resolve_threads(a.threads);
  if (a.mode == "u" || a.mode == "v") {
    const ProgramPtr program = program_for();
    RngStream rng(a.seed, {0, 0});
    const Dataset data = usage_guard([&] { return program->generate(a.n, rng); });
    const OracleEstimate e = usage_guard([&] {
      return a.mode == "u" ? complete_u_statistic(data, a.k, *program) : complete_v_statistic(data, a.k, *program);
    });
    out << a.mode << " n=" << a.n << " k=" << a.k << " value=" << format_double(e.value)
        << " evaluations=" << e.evaluations << '\n';
    return 0;
  }
  if (a.mode == "wk") {
    const ProgramPtr program = program_for();
    const OracleEstimate e =
        usage_guard([&] { return estimate_wk(*program, a.k, a.reps, RngStream(a.seed, {1}), threads); });
    out << "wk k=" << a.k << " value=" << format_double(e.value) << " stderr=" << format_double(e.mc_stderr) << '\n';
    return 0;
  }
  if (a.mode == "gk") {
    const ProgramPtr program = program_for();
    const OracleEstimate e = usage_guard(
        [&] { return estimate_gk_variance(*program, a.k, a.outer, a.inner, RngStream(a.seed, {2}), threads); });
    const double k2 = static_cast<double>(a.k) * static_cast<double>(a.k);
    out << "gk k=" << a.k << " var=" << format_double(e.value) << " stderr=" << format_double(e.mc_stderr)
        << " k2var=" << format_double(k2 * e.value) << " k2stderr=" << format_double(k2 * e.mc_stderr) << '\n';
    return 0;
  }
  if (a.mode == "covariance") {
    if (a.d < 1) throw UsageError("--d must be positive");
    const Eigen::MatrixXd s = constants::generate_covariance(a.d);
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < s.rows(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(s.cols()));
      for (Index j = 0; j < s.cols(); ++j) row[static_cast<std::size_t>(j)] = s(i, j);
      rows.push_back(row);
    }
    out << rows.dump() << '\n';
    return 0;
  }
  if (a.mode == "portfolio-truth") {
    const PortfolioParams p = PortfolioParams::defaults();
    const Eigen::VectorXd x = constants::portfolio_true_solution();
    const Eigen::VectorXd w = x.tail(p.mu.size());
    out << "portfolio truth=" << format_double(constants::portfolio_true_optimum())
        << " cvar_at_solution=" << format_double(normal_portfolio_cvar(p, w))
        << " frank_wolfe_gap=" << format_double(portfolio_frank_wolfe_gap(p, w)) << '\n';
    return 0;
  }
  throw UsageError("unknown oracle mode: " + a.mode);
}

}  // namespace

int cli_main(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bagged confidence bounds for sample average approximation", "bagbound"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  CommonArgs bound_args;
  Index bound_n = 50;
  auto* bound = app.add_subcommand("bound", "Lower confidence bound on the optimal value");
  bound->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  add_common(bound, bound_args);
  bound->add_option("--n", bound_n, "Sample size when generating data");

  CommonArgs gap_args;
  Index gap_n1 = 64;
  Index gap_n2 = 36;
  std::string approach = "crn";
  auto* gap = app.add_subcommand("gap", "Upper confidence bound on the optimality gap of the SAA solution");
  gap->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  add_common(gap, gap_args);
  gap->add_option("--n1", gap_n1, "Training size used to produce the candidate");
  gap->add_option("--n2", gap_n2, "Evaluation size");
  gap->add_option("--approach", approach, "bc or crn");

  std::string exp_config;
  std::optional<std::uint64_t> exp_seed;
  std::optional<Index> exp_reps;
  std::optional<unsigned> exp_threads;
  std::string exp_output;
  std::string exp_format;
  auto* experiment = app.add_subcommand("experiment", "Coverage experiment from a JSON config");
  experiment->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  experiment->add_option("--config", exp_config, "Experiment config (JSON)")->required();
  experiment->add_option("--seed", exp_seed, "Override the root seed");
  experiment->add_option("--replications", exp_reps, "Override the replication count");
  experiment->add_option("--threads", exp_threads, std::string("Worker threads (default: ") + kThreadsEnvVar + ")");
  experiment->add_option("--output", exp_output, "Override the output path");
  experiment->add_option("--format", exp_format, "Override the output format: csv or json");

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand("dev-oracle", "Reference computations used by the test suite");
  oracle->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  oracle->add_option("--mode", oracle_args.mode, "u, v, wk, gk, covariance or portfolio-truth");
  oracle->add_option("--problem", oracle_args.problem, "Problem key, or example1");
  oracle->add_option("--d", oracle_args.d, "Arms of example1; dimension for covariance");
  oracle->add_option("--n", oracle_args.n, "Data size for u and v");
  oracle->add_option("--k", oracle_args.k, "Sample size of the kernel");
  oracle->add_option("--reps", oracle_args.reps, "Replications for wk");
  oracle->add_option("--outer", oracle_args.outer, "Outer draws for gk");
  oracle->add_option("--inner", oracle_args.inner, "Inner draws for gk");
  oracle->add_option("--seed", oracle_args.seed, "Root seed");
  oracle->add_option("--threads", oracle_args.threads, "Worker threads");
  oracle->add_option("--config", oracle_args.config, "JSON file of flag values; explicit flags win");

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (bound->parsed()) return run_bound(bound_args, bound_n, out);
    if (gap->parsed()) return run_gap(gap_args, gap_n1, gap_n2, approach, out);
    if (oracle->parsed()) return run_oracle(oracle_args, out);
    ExperimentConfig c = usage_guard([&] { return ExperimentConfig::from_json(read_json_file(exp_config)); });
    if (exp_seed) c.seed = *exp_seed;
    if (exp_reps) c.replications = *exp_reps;
    if (exp_threads) c.threads = *exp_threads;
    if (!exp_output.empty()) c.output = exp_output;
    if (!exp_format.empty()) c.format = usage_guard([&] { return parse_format(exp_format); });
    usage_guard([&] { c.validate(); return 0; });
    print_rows(out, run_experiment(c), c);
    return 0;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace bagbound
