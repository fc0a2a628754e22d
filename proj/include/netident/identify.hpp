#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netident/derivatives.hpp"
#include "netident/graph.hpp"
#include "netident/network.hpp"
#include "netident/simulate.hpp"

namespace netident {

struct ColumnLabel {
  int edge = 0;
  int basis = 0;
  friend bool operator==(const ColumnLabel&, const ColumnLabel&) = default;
};

struct RegressionProblem {
  Eigen::MatrixXd design;
  Eigen::VectorXd target;
  std::vector<ColumnLabel> labels;
};

struct SolveResult {
  Eigen::VectorXd coefficients;
  double condition = 0.0;
  double residual_norm = 0.0;
};

/// 2-norm condition number of the column-equilibrated design; infinity for
/// a zero column or an exactly singular matrix.
double condition_estimate(const Eigen::MatrixXd& design);

/// Minimum-norm least squares through a complete orthogonal decomposition.
/// Throws RankDeficient when rows < columns or the condition estimate
/// exceeds `cond_limit`.
SolveResult solve(const RegressionProblem& problem, double cond_limit = 1e10);

/// Coefficients identified so far, indexed like spec.edges.
using KnownCoefficients = std::vector<std::optional<std::vector<double>>>;

struct GateSettings {
  double derivative_threshold = 1e-2;  // on |g'(x)| of known path edges
  double value_threshold = 1e-2;       // on |x0| of excited nodes
  int max_retries = 100;
};

/// Accepts a candidate initial state when every excited node is away from
/// zero and every known edge on the stage's paths has a usable slope there.
bool gate_initial_conditions(const NetworkSpec& spec, const Stage& stage, const KnownCoefficients& known,
                             std::span<const double> x0, const GateSettings& gate = {});

struct StageExperiment {
  std::vector<double> x0;
  double target = 0.0;  // estimated sink derivative at the stage order
};

/// Least-squares problem of one stage. Each row is one experiment: the
/// target is the measured derivative minus the sink derivative predicted
/// with all stage coefficients zero, and column (e, l) is the derivative
/// gained by a unit coefficient on basis l of stage edge e. Both come from
/// exact jets of the partially known model.
RegressionProblem stage_design(const NetworkSpec& spec, const Stage& stage, const KnownCoefficients& known,
                               std::span<const StageExperiment> experiments);

/// Sink derivative of order `order` at t = 0 for a model with the given
/// per-edge coefficients (unknown edges as zero vectors).
double sink_derivative(const NetworkSpec& spec, const std::vector<std::vector<double>>& coeffs,
                       std::span<const double> x0, int sink, int order);

struct IdentifyOptions {
  ExperimentPlan plan;      // count = experiments per stage (lower bound), period, samples, sigma, seed, ranges
  int window = 10;          // Savitzky-Golay window
  int degree = 5;           // Savitzky-Golay degree
  GateSettings gate;
  double cond_limit = 1e10;
  bool exact_derivatives = false;  // targets from exact jets of the true model
  bool record_experiments = false;
  unsigned threads = 0;
};

/// Options taken from the network file's plan line, with library defaults
/// (count 1, so every stage uses 3 L experiments; h = 0.1; S = 10; sigma = 0;
/// W = 10; D = 5; seed 1) where the file is silent.
IdentifyOptions default_options(const NetworkSpec& spec);

/// Provides the sink samples for one experiment. `experiment` is a unique
/// key across stages.
using SinkSampler =
    std::function<SampleSet(std::size_t stage, std::uint64_t experiment, int sink, std::span<const double> x0)>;

struct ExperimentRecord {
  std::vector<double> x0;
  double target = 0.0;
  double exact = 0.0;  // NaN without ground truth
  int retries = 0;
};

struct StageLog {
  int index = 0;
  int order = 0;
  int sink = 0;
  std::vector<int> edges;
  int experiments = 0;
  double condition = 0.0;
  double residual = 0.0;
  int retries = 0;
  std::vector<ExperimentRecord> records;
};

struct EdgeEstimate {
  int edge = 0;
  std::vector<double> estimate;
  std::optional<std::vector<double>> truth;
};

struct IdentificationReport {
  std::vector<EdgeEstimate> edges;
  std::vector<StageLog> stages;
  std::optional<double> rmse;
};

/// Runs every stage of `schedule` in order, feeding each stage's estimates
/// to the next. Simulation-in-the-loop when no sampler is given.
IdentificationReport identify(const NetworkSpec& spec, const IdentifyOptions& options, const std::vector<Stage>& schedule);
IdentificationReport identify(const NetworkSpec& spec, const IdentifyOptions& options, const std::vector<Stage>& schedule,
                              const SinkSampler& sampler);

/// Root mean squared error over every dictionary coefficient of every edge.
/// Throws DictionaryMismatch when shapes disagree or truth is missing.
double rmse(const IdentificationReport& report, const NetworkSpec& truth);

}  // namespace netident
