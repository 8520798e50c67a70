#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bagbound/bounds.hpp"
#include "bagbound/core.hpp"

namespace bagbound {

enum class ExperimentMode { Lower, GapBc, GapCrn };
enum class MethodKind { BaggingU, BaggingV, Batching, Single };
enum class OutputFormat { Csv, Json };

std::string to_string(ExperimentMode m);
std::string to_string(MethodKind m);
ExperimentMode parse_mode(const std::string& s);
MethodKind parse_method(const std::string& s);
OutputFormat parse_format(const std::string& s);

/// One method and the resample or batch sizes to run it with. `ks` is
/// ignored for the single-replication method.
struct MethodCell {
  MethodKind method{MethodKind::BaggingU};
  std::vector<Index> ks;
};

struct ExperimentConfig {
  std::string problem{"cvar"};
  ExperimentMode mode{ExperimentMode::Lower};
  std::vector<MethodCell> cells;
  Index n{0};   ///< lower mode
  Index n1{0};  ///< gap modes: training size
  Index n2{0};  ///< gap modes: evaluation size
  std::optional<Index> bootstrap_size;  ///< nullopt = auto (5 n k)
  double alpha{0.05};
  Index replications{500};
  std::uint64_t seed{1};
  std::string output;
  OutputFormat format{OutputFormat::Csv};
  unsigned threads{0};  ///< 0 = default_thread_count()

  /// Size of the data set each lower bound sees: n, n1 + n2 (BC) or n2 (CRN).
  Index bound_sample_size() const;
  /// Throws std::invalid_argument describing the first problem found.
  void validate() const;

  /// Accepts either top-level "method" and "k", or a "methods" array of
  /// {"method", "k"} objects. "B" may be an integer or "auto".
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct ExperimentRow {
  std::string problem;
  std::string method;
  Index n{0};
  Index k{0};
  double coverage{0.0};
  double mean{0.0};
  double std{0.0};
  Index reps{0};
  double truth{0.0};
  std::string truth_tag;
  std::uint64_t seed{0};
  // JSON-only fields.
  Index bootstrap_size{0};
  std::string mode;
  Index covered{0};
  bool std_defined{true};

  bool operator==(const ExperimentRow&) const = default;
};

/// Replication r draws its data from RngStream(seed, {r, 0}) (training data
/// in gap modes), its evaluation data from {r, 1} and the bagging resamples
/// for size k from {r, 2, k}. Rows follow the config's method and k order.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);

std::string rows_to_csv(const std::vector<ExperimentRow>& rows);
nlohmann::json rows_to_json(const std::vector<ExperimentRow>& rows);
std::vector<ExperimentRow> rows_from_json(const nlohmann::json& j);

/// Writes CSV or JSON to `path`; throws std::runtime_error on I/O failure.
void emit(const std::vector<ExperimentRow>& rows, OutputFormat format, const std::string& path);

nlohmann::json to_json(const BagOutput& out);
nlohmann::json to_json(const BoundReport& report);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace bagbound
