#include "bagbound/harness.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bagbound/bounds.hpp"
#include "bagbound/gap.hpp"
#include "bagbound/parallel.hpp"
#include "bagbound/programs.hpp"

namespace bagbound {

namespace {

struct RowPlan {
  MethodKind method;
  Index k;
};

std::vector<RowPlan> plan_rows(const ExperimentConfig& c) {
  std::vector<RowPlan> plan;
  for (const auto& cell : c.cells) {
    if (cell.method == MethodKind::Single) {
      plan.push_back({cell.method, c.bound_sample_size()});
    } else {
      for (Index k : cell.ks) plan.push_back({cell.method, k});
    }
  }
  return plan;
}

LowerBoundMethod to_method(const RowPlan& p, const ExperimentConfig& c) {
  switch (p.method) {
    case MethodKind::BaggingU:
      return BaggingMethod{p.k, c.bootstrap_size.value_or(0), ResampleScheme::WithoutReplacement, 1};
    case MethodKind::BaggingV:
      return BaggingMethod{p.k, c.bootstrap_size.value_or(0), ResampleScheme::WithReplacement, 1};
    case MethodKind::Batching:
      return BatchingMethod{p.k};
    case MethodKind::Single:
      break;
  }
  return SingleReplicationMethod{};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

Index json_count(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw std::invalid_argument(std::string("config: '") + key + "' must be an integer");
  return v.get<Index>();
}

std::vector<Index> json_ks(const nlohmann::json& v) {
  std::vector<Index> ks;
  if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number_integer()) throw std::invalid_argument("config: 'k' entries must be integers");
      ks.push_back(e.get<Index>());
    }
  } else if (v.is_number_integer()) {
    ks.push_back(v.get<Index>());
  } else {
    throw std::invalid_argument("config: 'k' must be an integer or array");
  }
  return ks;
}

}  // namespace

std::string to_string(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::Lower:
      return "lower";
    case ExperimentMode::GapBc:
      return "gap-bc";
    case ExperimentMode::GapCrn:
      return "gap-crn";
  }
  return "unknown";
}

std::string to_string(MethodKind m) {
  switch (m) {
    case MethodKind::BaggingU:
      return "bagging-u";
    case MethodKind::BaggingV:
      return "bagging-v";
    case MethodKind::Batching:
      return "batching";
    case MethodKind::Single:
      return "single";
  }
  return "unknown";
}

ExperimentMode parse_mode(const std::string& s) {
  if (s == "lower") return ExperimentMode::Lower;
  if (s == "gap-bc" || s == "bc") return ExperimentMode::GapBc;
  if (s == "gap-crn" || s == "crn") return ExperimentMode::GapCrn;
  throw std::invalid_argument("unknown mode: " + s);
}

MethodKind parse_method(const std::string& s) {
  if (s == "bagging-u") return MethodKind::BaggingU;
  if (s == "bagging-v") return MethodKind::BaggingV;
  if (s == "batching") return MethodKind::Batching;
  if (s == "single") return MethodKind::Single;
  throw std::invalid_argument("unknown method: " + s);
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw std::invalid_argument("unknown format: " + s);
}

Index ExperimentConfig::bound_sample_size() const {
  switch (mode) {
    case ExperimentMode::Lower:
      return n;
    case ExperimentMode::GapBc:
      return n1 + n2;
    case ExperimentMode::GapCrn:
      return n2;
  }
  return n;
}

void ExperimentConfig::validate() const {
  const ProgramPtr program = make_program(problem);
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("config: alpha must be in (0, 1)");
  if (replications < 1) throw std::invalid_argument("config: replications must be positive");
  if (mode == ExperimentMode::Lower) {
    if (n < 2) throw std::invalid_argument("config: n must be at least 2");
    if (!program->true_optimum()) throw std::invalid_argument("config: no truth available for " + problem);
  } else {
    if (n1 < 1) throw std::invalid_argument("config: n1 must be positive");
    if (n2 < 2) throw std::invalid_argument("config: n2 must be at least 2");
    if (!program->true_optimum()) throw std::invalid_argument("config: no truth available for " + problem);
  }
  if (bootstrap_size && *bootstrap_size < 2) throw std::invalid_argument("config: B must be at least 2");
  if (cells.empty()) throw std::invalid_argument("config: no methods given");
  const Index N = bound_sample_size();
  for (const auto& cell : cells) {
    if (cell.method == MethodKind::Single) continue;
    if (cell.ks.empty()) throw std::invalid_argument("config: method " + to_string(cell.method) + " needs k");
    for (Index k : cell.ks) {
      const std::string where = to_string(cell.method) + " k=" + std::to_string(k);
      if (k < 1) throw std::invalid_argument("config: " + where + ": k must be positive");
      if (cell.method == MethodKind::BaggingU && k > N - 1) {
        throw std::invalid_argument("config: " + where + ": k must be at most " + std::to_string(N - 1));
      }
      if (cell.method == MethodKind::Batching && N / k < 2) {
        throw std::invalid_argument("config: " + where + ": need at least two batches");
      }
    }
  }
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  ExperimentConfig c;
  static const char* known[] = {"problem", "mode", "method", "methods", "k", "n", "n1", "n2", "B",
                                "alpha", "replications", "seed", "output", "format", "threads"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* key : known) ok = ok || item.key() == key;
    if (!ok) throw std::invalid_argument("config: unknown key '" + item.key() + "'");
  }
  if (j.contains("problem")) c.problem = j.at("problem").get<std::string>();
  if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
  if (j.contains("methods")) {
    for (const auto& m : j.at("methods")) {
      MethodCell cell;
      cell.method = parse_method(m.at("method").get<std::string>());
      if (m.contains("k")) cell.ks = json_ks(m.at("k"));
      c.cells.push_back(std::move(cell));
    }
  }
  if (j.contains("method")) {
    MethodCell cell;
    cell.method = parse_method(j.at("method").get<std::string>());
    if (j.contains("k")) cell.ks = json_ks(j.at("k"));
    c.cells.push_back(std::move(cell));
  }
  if (j.contains("n")) c.n = json_count(j, "n");
  if (j.contains("n1")) c.n1 = json_count(j, "n1");
  if (j.contains("n2")) c.n2 = json_count(j, "n2");
  if (j.contains("B")) {
    const auto& b = j.at("B");
    if (b.is_string()) {
      if (b.get<std::string>() != "auto") throw std::invalid_argument("config: B must be an integer or \"auto\"");
    } else {
      c.bootstrap_size = json_count(j, "B");
    }
  }
  if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
  if (j.contains("replications")) c.replications = json_count(j, "replications");
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("output")) c.output = j.at("output").get<std::string>();
  if (j.contains("format")) c.format = parse_format(j.at("format").get<std::string>());
  if (j.contains("threads")) c.threads = j.at("threads").get<unsigned>();
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["problem"] = problem;
  j["mode"] = to_string(mode);
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& cell : cells) {
    nlohmann::json m;
    m["method"] = to_string(cell.method);
    if (cell.method != MethodKind::Single) m["k"] = cell.ks;
    methods.push_back(std::move(m));
  }
  j["methods"] = std::move(methods);
  if (mode == ExperimentMode::Lower) {
    j["n"] = n;
  } else {
    j["n1"] = n1;
    j["n2"] = n2;
  }
  if (bootstrap_size) {
    j["B"] = *bootstrap_size;
  } else {
    j["B"] = "auto";
  }
  j["alpha"] = alpha;
  j["replications"] = replications;
  j["seed"] = seed;
  if (!output.empty()) j["output"] = output;
  j["format"] = format == OutputFormat::Csv ? "csv" : "json";
  return j;
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const ProgramPtr program = make_program(config.problem);
  const std::vector<RowPlan> plan = plan_rows(config);
  const auto R = static_cast<std::size_t>(config.replications);
  std::vector<std::vector<double>> bounds(plan.size(), std::vector<double>(R));
  std::vector<std::vector<double>> truths(plan.size(), std::vector<double>(R));
  const double z_star = *program->true_optimum();

  const unsigned threads = config.threads == 0 ? default_thread_count() : config.threads;
  parallel_for(config.replications, threads, [&](std::int64_t r) {
    const auto ur = static_cast<std::uint64_t>(r);
    try {
      if (config.mode == ExperimentMode::Lower) {
        RngStream data_rng(config.seed, {ur, 0});
        const Dataset data = program->generate(config.n, data_rng);
        for (std::size_t p = 0; p < plan.size(); ++p) {
          const RngStream rng(config.seed, {ur, 2, static_cast<std::uint64_t>(plan[p].k)});
          bounds[p][static_cast<std::size_t>(r)] =
              lower_bound(data, *program, to_method(plan[p], config), config.alpha, rng).bound;
          truths[p][static_cast<std::size_t>(r)] = z_star;
        }
        return;
      }
      RngStream train_rng(config.seed, {ur, 0});
      RngStream eval_rng(config.seed, {ur, 1});
      Dataset training = program->generate(config.n1, train_rng);
      Dataset evaluation = program->generate(config.n2, eval_rng);
      const GapSetup setup = make_gap_setup(*program, std::move(training), std::move(evaluation), config.alpha);
      const auto z_hat = program->objective(setup.x_hat);
      if (!z_hat) throw std::runtime_error("no closed-form objective for " + config.problem);
      const double true_gap = *z_hat - z_star;
      for (std::size_t p = 0; p < plan.size(); ++p) {
        const RngStream rng(config.seed, {ur, 2, static_cast<std::uint64_t>(plan[p].k)});
        const LowerBoundMethod method = to_method(plan[p], config);
        const GapReport g = config.mode == ExperimentMode::GapBc ? gap_bound_bc(setup, program, method, rng)
                                                                 : gap_bound_crn(setup, program, method, rng);
        bounds[p][static_cast<std::size_t>(r)] = g.upper_bound;
        truths[p][static_cast<std::size_t>(r)] = true_gap;
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("replication " + std::to_string(r) + ": " + e.what());
    }
  });

  std::vector<ExperimentRow> rows;
  rows.reserve(plan.size());
  for (std::size_t p = 0; p < plan.size(); ++p) {
    ExperimentRow row;
    row.problem = config.problem;
    row.method = to_string(plan[p].method);
    row.n = config.bound_sample_size();
    row.k = plan[p].k;
    row.reps = config.replications;
    row.seed = config.seed;
    row.mode = to_string(config.mode);
    if (plan[p].method == MethodKind::BaggingU || plan[p].method == MethodKind::BaggingV) {
      row.bootstrap_size = config.bootstrap_size.value_or(recommended_bootstrap_size(row.n, row.k));
    }
    Index covered = 0;
    for (std::size_t r = 0; r < R; ++r) {
      const double b = bounds[p][r];
      const double t = truths[p][r];
      const bool ok = config.mode == ExperimentMode::Lower ? b <= t : b >= t;
      covered += ok ? 1 : 0;
    }
    row.covered = covered;
    row.coverage = static_cast<double>(covered) / static_cast<double>(R);
    const auto stats = mean_var(std::span<const double>(bounds[p]), R >= 2);
    row.mean = stats.mean;
    row.std = R >= 2 ? stats.stddev() : 0.0;
    row.std_defined = R >= 2;
    if (config.mode == ExperimentMode::Lower) {
      row.truth = z_star;
      row.truth_tag = program->truth_tag();
    } else {
      row.truth = mean_var(std::span<const double>(truths[p]), false).mean;
      row.truth_tag = "mean-gap:" + program->truth_tag();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json to_json(const BagOutput& out) {
  nlohmann::json j;
  j["z_bag"] = out.z_bag;
  j["sigma_ij"] = out.sigma_ij;
  j["lower_bound"] = out.lower_bound;
  j["quantile"] = out.quantile;
  j["k"] = out.k;
  j["B"] = out.bootstrap_size;
  j["n"] = out.n;
  j["alpha"] = out.alpha;
  j["scheme"] = to_string(out.scheme);
  j["per_datum_cov"] = std::vector<double>(out.per_datum_cov.data(), out.per_datum_cov.data() + out.per_datum_cov.size());
  j["resample_std"] = out.resample_std;
  j["below_recommended_B"] = out.below_recommended_b;
  return j;
}

nlohmann::json to_json(const BoundReport& report) {
  nlohmann::json j;
  j["method"] = to_string(report.method);
  j["side"] = report.side == BoundSide::Lower ? "lower" : "upper";
  j["bound"] = report.bound;
  j["point"] = report.point;
  j["stderr"] = report.std_error;
  j["quantile"] = report.quantile;
  j["n"] = report.n;
  j["k"] = report.k;
  j["B"] = report.bootstrap_size;
  j["m"] = report.batches;
  j["alpha"] = report.alpha;
  if (report.scheme) j["scheme"] = to_string(*report.scheme);
  return j;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string rows_to_csv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  out << "problem,method,n,k,coverage,mean,std,reps,truth,truth_tag,seed\n";
  for (const auto& r : rows) {
    out << csv_field(r.problem) << ',' << csv_field(r.method) << ',' << r.n << ',' << r.k << ','
        << format_double(r.coverage) << ',' << format_double(r.mean) << ',' << format_double(r.std) << ','
        << r.reps << ',' << format_double(r.truth) << ',' << csv_field(r.truth_tag) << ',' << r.seed << '\n';
  }
  return out.str();
}

nlohmann::json rows_to_json(const std::vector<ExperimentRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["problem"] = r.problem;
    j["method"] = r.method;
    j["mode"] = r.mode;
    j["n"] = r.n;
    j["k"] = r.k;
    j["B"] = r.bootstrap_size;
    j["coverage"] = r.coverage;
    j["covered"] = r.covered;
    j["mean"] = r.mean;
    j["std"] = r.std;
    j["std_defined"] = r.std_defined;
    j["reps"] = r.reps;
    j["truth"] = r.truth;
    j["truth_tag"] = r.truth_tag;
    j["seed"] = r.seed;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<ExperimentRow> rows_from_json(const nlohmann::json& j) {
  std::vector<ExperimentRow> rows;
  for (const auto& e : j) {
    ExperimentRow r;
    r.problem = e.at("problem").get<std::string>();
    r.method = e.at("method").get<std::string>();
    r.mode = e.at("mode").get<std::string>();
    r.n = e.at("n").get<Index>();
    r.k = e.at("k").get<Index>();
    r.bootstrap_size = e.at("B").get<Index>();
    r.coverage = e.at("coverage").get<double>();
    r.covered = e.at("covered").get<Index>();
    r.mean = e.at("mean").get<double>();
    r.std = e.at("std").get<double>();
    r.std_defined = e.at("std_defined").get<bool>();
    r.reps = e.at("reps").get<Index>();
    r.truth = e.at("truth").get<double>();
    r.truth_tag = e.at("truth_tag").get<std::string>();
    r.seed = e.at("seed").get<std::uint64_t>();
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit(const std::vector<ExperimentRow>& rows, OutputFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  if (format == OutputFormat::Csv) {
    out << rows_to_csv(rows);
  } else {
    out << rows_to_json(rows).dump(2) << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace bagbound
