#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dmgt/algorithm.hpp"
#include "dmgt/diagnostics.hpp"
#include "dmgt/kernel.hpp"
#include "dmgt/network.hpp"
#include "dmgt/problem.hpp"

namespace dmgt {

using Json = nlohmann::json;

inline constexpr const char* kOutputRootEnv = "DMGT_OUTPUT_ROOT";

struct ProblemSpec {
  std::string type = "quadratic";
  int d = 10;
  int n = 0;
  int m = 8;
  double noise_sd = 0.0;
  TvOptions tv;
  // Relative-smoothness constant; analytic or estimated when absent.
  std::optional<double> L;
};

struct GraphSpec {
  std::string type = "erdos_renyi";
  double p = 0.3;
};

struct InitSpec {
  // center | ones | gaussian_positive | truth_perturbed
  std::string type = "center";
  double scale = 1.0;
};

struct AlgorithmSpec {
  std::string label;
  AlgorithmKind kind = AlgorithmKind::DMGT;
  std::optional<double> eta;
  std::optional<double> delta;
  bool theorem_step = false;
  Y0Init y0 = Y0Init::Gradient;
  std::optional<InitSpec> init;
  std::optional<double> dda_shift;
};

struct TuningSpec {
  std::vector<double> eta_grid;
  std::vector<double> delta_grid;
  std::string select_by = "stationarity";
};

struct ExperimentConfig {
  ProblemSpec problem;
  Json kernel = Json{{"kind", "paired"}};
  GraphSpec graph;
  InitSpec init;
  std::vector<AlgorithmSpec> algorithms;
  TuningSpec tuning;
  std::vector<std::uint64_t> seeds{1};
  int max_iter = 1000;
  int record_stride = 1;
  std::string output = "out";
};

std::vector<double> log_grid(int lo_exp, int hi_exp);

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);
Json config_to_json(const ExperimentConfig& cfg);
std::string serialize_config(const ExperimentConfig& cfg);
void validate_config(const ExperimentConfig& cfg);

Kernel kernel_from_spec(const Json& spec, const Problem& prob);
Problem problem_from_spec(const ProblemSpec& spec, std::uint64_t seed);
Graph graph_from_spec(const GraphSpec& spec, int m, std::uint64_t seed);

struct Instance {
  std::uint64_t seed = 0;
  Problem prob;
  Kernel kernel;
  MixingMatrix W;
  double L = 1.0;
  double L_raw = 1.0;
  bool L_estimated = false;
};

Instance build_instance(const ExperimentConfig& cfg, std::uint64_t seed);
Vec initial_point(const InitSpec& init, const Instance& inst);

struct ResolvedParams {
  double eta;
  double delta;
};
ResolvedParams resolve_params(const AlgorithmSpec& a, const Instance& inst, double eta, double delta);

struct TuneCell {
  std::string label;
  double eta = 0.0;
  double delta = 0.0;
  double score = 0.0;
  bool diverged = false;
};

struct TuneChoice {
  std::string label;
  double eta = 0.0;
  double delta = 0.0;
  double score = 0.0;
  bool all_diverged = false;
  bool tuned = false;
};

struct TuneResult {
  std::vector<TuneCell> cells;
  std::vector<TuneChoice> best;
  const TuneChoice& choice(const std::string& label) const;
  std::string to_csv() const;
};

TuneResult tune(const ExperimentConfig& cfg, int threads = 1);
// Copies the tuned (eta, delta) of every tuned algorithm into the config.
ExperimentConfig freeze_tuning(const ExperimentConfig& cfg, const TuneResult& tr);

bool stagnated(const std::vector<RunRecord>& records, double factor = 0.99);

struct RunOutcome {
  std::string run_id;
  std::string label;
  std::uint64_t seed = 0;
  AlgorithmKind kind = AlgorithmKind::DMGT;
  double eta = 0.0;
  double delta = 0.0;
  double lambda = 1.0;
  RunSummary summary;
  bool stagnated = false;
  std::vector<RunRecord> records;
  std::string kernel_id;
};

struct BatchOptions {
  int threads = 1;
  std::string out;  // overrides cfg.output when nonempty
  bool write = true;
};

struct BatchResult {
  std::filesystem::path dir;
  std::vector<RunOutcome> runs;
  std::optional<TuneResult> tuning;
  std::vector<Json> instances;
  std::string manifest;
  const RunOutcome& find(const std::string& run_id) const;
};

std::filesystem::path resolve_output(const ExperimentConfig& cfg, const std::string& override_out);
// Tunes the algorithms without fixed parameters, runs every (algorithm, seed) pair and writes
// runs/<run_id>.csv, plot/<metric>.csv, tuning.csv and manifest.json (last).
BatchResult run_batch(const ExperimentConfig& cfg, const BatchOptions& opt = {});

std::string git_blob_sha1(const std::string& content);

}  // namespace dmgt
