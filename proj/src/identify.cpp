#include "netident/identify.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "netident/errors.hpp"
#include "netident/parallel.hpp"

namespace netident {
namespace {

std::vector<std::vector<double>> base_coefficients(const NetworkSpec& spec, const KnownCoefficients& known) {
  std::vector<std::vector<double>> coeffs(spec.edges.size());
  for (std::size_t e = 0; e < spec.edges.size(); ++e) {
    if (e < known.size() && known[e]) {
      if (known[e]->size() != spec.edges[e].basis.size())
        throw Error(ErrorCode::DictionaryMismatch, "known coefficients of edge " + edge_label(spec.edges[e]) +
                                                       " do not match its dictionary");
      coeffs[e] = *known[e];
    } else {
      coeffs[e].assign(spec.edges[e].basis.size(), 0.0);
    }
  }
  return coeffs;
}

std::uint64_t experiment_key(std::size_t stage, std::size_t k) {
  return (static_cast<std::uint64_t>(stage + 1) << 32) | static_cast<std::uint64_t>(k);
}

}  // namespace

double condition_estimate(const Eigen::MatrixXd& design) {
  if (design.cols() == 0) return 1.0;
  if (design.rows() < design.cols()) return std::numeric_limits<double>::infinity();
  Eigen::MatrixXd scaled = design;
  for (Eigen::Index j = 0; j < scaled.cols(); ++j) {
    const double norm = scaled.col(j).norm();
    if (!(norm > 0.0)) return std::numeric_limits<double>::infinity();
    scaled.col(j) /= norm;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

SolveResult solve(const RegressionProblem& problem, double cond_limit) {
  const auto& a = problem.design;
  if (a.rows() != problem.target.size())
    throw Error(ErrorCode::InvalidArgument, "design rows and target length differ");
  if (a.rows() < a.cols())
    throw Error(ErrorCode::RankDeficient, std::to_string(a.rows()) + " experiments for " + std::to_string(a.cols()) +
                                              " unknown coefficients");
  SolveResult out;
  out.condition = condition_estimate(a);
  if (!(out.condition <= cond_limit))
    throw Error(ErrorCode::RankDeficient,
                "design condition estimate " + std::to_string(out.condition) + " exceeds limit " + std::to_string(cond_limit));
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  out.coefficients = cod.solve(problem.target);
  out.residual_norm = (a * out.coefficients - problem.target).norm();
  return out;
}

bool gate_initial_conditions(const NetworkSpec& spec, const Stage& stage, const KnownCoefficients& known,
                             std::span<const double> x0, const GateSettings& gate) {
  for (int v : stage.nonzero_nodes)
    if (std::abs(x0[static_cast<std::size_t>(v)]) < gate.value_threshold) return false;
  for (int g : stage.gated_edges) {
    const auto e = static_cast<std::size_t>(g);
    if (e >= known.size() || !known[e])
      throw Error(ErrorCode::InvalidArgument, "path edge " + edge_label(spec.edges[e]) + " is not identified yet");
    const EdgeFunction f(spec.edges[e].basis, *known[e]);
    if (std::abs(f.deriv(x0[static_cast<std::size_t>(spec.edges[e].tail)], 1)) < gate.derivative_threshold) return false;
  }
  return true;
}

double sink_derivative(const NetworkSpec& spec, const std::vector<std::vector<double>>& coeffs,
                       std::span<const double> x0, int sink, int order) {
  const auto model = NetworkModel::with_coefficients(spec, coeffs);
  const auto jet = exact_jet(model, x0, {}, order);
  return jet_to_derivatives(jet, sink)[static_cast<std::size_t>(order)];
}

RegressionProblem stage_design(const NetworkSpec& spec, const Stage& stage, const KnownCoefficients& known,
                               std::span<const StageExperiment> experiments) {
  const int m = stage.derivative_order;
  auto model = NetworkModel::with_coefficients(spec, base_coefficients(spec, known));
  for (int e : stage.edges) {
    auto& c = model.links[static_cast<std::size_t>(e)].function.coefficients;
    std::fill(c.begin(), c.end(), 0.0);
  }

  RegressionProblem problem;
  for (int e : stage.edges)
    for (std::size_t l = 0; l < spec.edges[static_cast<std::size_t>(e)].basis.size(); ++l)
      problem.labels.push_back({e, static_cast<int>(l)});
  const auto rows = static_cast<Eigen::Index>(experiments.size());
  const auto cols = static_cast<Eigen::Index>(problem.labels.size());
  problem.design.resize(rows, cols);
  problem.target.resize(rows);

  auto derivative = [&](std::span<const double> x0) {
    return jet_to_derivatives(exact_jet(model, x0, {}, m), stage.sink)[static_cast<std::size_t>(m)];
  };
  for (Eigen::Index k = 0; k < rows; ++k) {
    const auto& x0 = experiments[static_cast<std::size_t>(k)].x0;
    const double offset = derivative(x0);
    problem.target(k) = experiments[static_cast<std::size_t>(k)].target - offset;
    for (Eigen::Index j = 0; j < cols; ++j) {
      const auto& label = problem.labels[static_cast<std::size_t>(j)];
      auto& c = model.links[static_cast<std::size_t>(label.edge)].function.coefficients;
      c[static_cast<std::size_t>(label.basis)] = 1.0;
      problem.design(k, j) = derivative(x0) - offset;
      c[static_cast<std::size_t>(label.basis)] = 0.0;
    }
  }
  return problem;
}

IdentifyOptions default_options(const NetworkSpec& spec) {
  IdentifyOptions opt;
  const PlanHints& h = spec.plan;
  opt.plan.count = h.experiments.value_or(1);
  opt.plan.period = h.period.value_or(0.1);
  opt.plan.samples = h.samples.value_or(10);
  opt.plan.sigma = h.sigma.value_or(0.0);
  opt.plan.seed = 1;
  if (h.ic_low && h.ic_high)
    opt.plan.initial_ranges.assign(static_cast<std::size_t>(spec.node_count), Interval{*h.ic_low, *h.ic_high});
  opt.window = h.window.value_or(10);
  opt.degree = h.degree.value_or(5);
  return opt;
}

IdentificationReport identify(const NetworkSpec& spec, const IdentifyOptions& options, const std::vector<Stage>& schedule) {
  const bool simulate_truth = !options.exact_derivatives;
  std::optional<NetworkModel> truth;
  if (spec.has_truth()) truth = NetworkModel::from_truth(spec);
  SinkSampler sampler;
  if (simulate_truth) {
    if (!truth)
      throw Error(ErrorCode::MissingCoefficients, "simulation mode needs true coefficients on every edge");
    ExperimentPlan plan = options.plan;
    plan.inputs.clear();
    sampler = [model = *truth, plan](std::size_t, std::uint64_t experiment, int sink, std::span<const double> x0) {
      const int nodes[] = {sink};
      return run_experiment(model, x0, nodes, plan, experiment).front();
    };
  }
  return identify(spec, options, schedule, sampler);
}

IdentificationReport identify(const NetworkSpec& spec, const IdentifyOptions& options, const std::vector<Stage>& schedule,
                              const SinkSampler& sampler) {
  validate(spec);
  ExperimentPlan plan = options.plan;
  plan.inputs.clear();
  plan.check(spec.node_count);
  const SgConfig sg{options.window, options.degree, plan.period};
  if (!options.exact_derivatives) {
    sg.check();
    if (!sampler) throw Error(ErrorCode::InvalidArgument, "no measurement source for the sink samples");
  }
  std::optional<NetworkModel> truth;
  if (spec.has_truth()) truth = NetworkModel::from_truth(spec);
  if (options.exact_derivatives && !truth)
    throw Error(ErrorCode::MissingCoefficients, "exact-derivative mode needs true coefficients on every edge");

  const auto hazards = linearity_hazard(spec);

  KnownCoefficients known(spec.edges.size());
  IdentificationReport report;

  for (std::size_t s = 0; s < schedule.size(); ++s) {
    const Stage& stage = schedule[s];
    const int m = stage.derivative_order;
    const std::string where = "stage " + std::to_string(s + 1) + " (" + describe_stage(spec, stage) + "): ";
    if (!options.exact_derivatives && m > sg.degree)
      throw Error(ErrorCode::OrderTooHigh, where + "derivative order " + std::to_string(m) +
                                               " needs a Savitzky-Golay degree of at least " + std::to_string(m));

    std::size_t unknowns = 0;
    for (int e : stage.edges) unknowns += spec.edges[static_cast<std::size_t>(e)].basis.size();
    const auto count = std::max<std::size_t>(3 * unknowns, static_cast<std::size_t>(plan.count));

    std::vector<StageExperiment> experiments(count);
    std::vector<ExperimentRecord> records(count);
    parallel_for(
        count,
        [&](std::size_t k) {
          const std::uint64_t key = experiment_key(s, k);
          auto& rec = records[k];
          bool accepted = false;
          for (int attempt = 0; attempt < options.gate.max_retries; ++attempt) {
            rec.x0 = draw_initial_state(plan, spec.node_count, stage.zeroed_nodes, key, static_cast<std::uint64_t>(attempt));
            if (gate_initial_conditions(spec, stage, known, rec.x0, options.gate)) {
              rec.retries = attempt;
              accepted = true;
              break;
            }
          }
          if (!accepted)
            throw Error(ErrorCode::GatingExhausted,
                        where + "no admissible initial condition after " + std::to_string(options.gate.max_retries) +
                            " draws; widen the initial-condition ranges or lower the gate thresholds");
          rec.exact = truth ? jet_to_derivatives(exact_jet(*truth, rec.x0, {}, m), stage.sink)[static_cast<std::size_t>(m)]
                            : std::numeric_limits<double>::quiet_NaN();
          if (options.exact_derivatives) {
            rec.target = rec.exact;
          } else {
            const SampleSet samples = sampler(s, key, stage.sink, rec.x0);
            rec.target = sg_fit_at_start(samples.values, sg, m)[static_cast<std::size_t>(m)];
          }
          experiments[k] = {rec.x0, rec.target};
        },
        options.threads);

    const RegressionProblem problem = stage_design(spec, stage, known, experiments);
    SolveResult result;
    try {
      result = solve(problem, options.cond_limit);
    } catch (const Error& err) {
      std::string msg = where + err.what();
      bool flagged = false;
      for (const auto& h : hazards) {
        const bool touches = std::any_of(stage.edges.begin(), stage.edges.end(), [&](int e) {
          return std::find(h.edges.begin(), h.edges.end(), e) != h.edges.end();
        });
        if (touches) {
          msg += "; linearity hazard: " + h.message;
          flagged = true;
          break;
        }
      }
      if (!flagged)
        msg += "; the experiments do not excite every coefficient: increase the experiment count or widen the "
               "initial-condition ranges";
      throw Error(err.code(), msg);
    }

    std::size_t col = 0;
    for (int e : stage.edges) {
      const auto& basis = spec.edges[static_cast<std::size_t>(e)].basis;
      std::vector<double> alpha(basis.size());
      for (auto& a : alpha) a = result.coefficients(static_cast<Eigen::Index>(col++));
      known[static_cast<std::size_t>(e)] = std::move(alpha);
    }

    StageLog log;
    log.index = static_cast<int>(s);
    log.order = m;
    log.sink = stage.sink;
    log.edges = stage.edges;
    log.experiments = static_cast<int>(count);
    log.condition = result.condition;
    log.residual = result.residual_norm;
    for (const auto& r : records) log.retries += r.retries;
    if (options.record_experiments) log.records = std::move(records);
    report.stages.push_back(std::move(log));
  }

  for (std::size_t e = 0; e < spec.edges.size(); ++e) {
    EdgeEstimate est;
    est.edge = static_cast<int>(e);
    if (!known[e])
      throw Error(ErrorCode::InvalidArgument, "schedule never identifies edge " + edge_label(spec.edges[e]));
    est.estimate = *known[e];
    est.truth = spec.edges[e].coefficients;
    report.edges.push_back(std::move(est));
  }
  if (spec.has_truth()) report.rmse = rmse(report, spec);
  return report;
}

double rmse(const IdentificationReport& report, const NetworkSpec& truth) {
  if (report.edges.size() != truth.edges.size())
    throw Error(ErrorCode::DictionaryMismatch, "report and network have different edge counts");
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& est : report.edges) {
    const auto& edge = truth.edges.at(static_cast<std::size_t>(est.edge));
    if (!edge.coefficients)
      throw Error(ErrorCode::DictionaryMismatch, "edge " + edge_label(edge) + " has no true coefficients");
    if (edge.coefficients->size() != est.estimate.size())
      throw Error(ErrorCode::DictionaryMismatch, "edge " + edge_label(edge) + " dictionary sizes differ");
    for (std::size_t l = 0; l < est.estimate.size(); ++l) {
      const double d = est.estimate[l] - (*edge.coefficients)[l];
      sum += d * d;
      ++n;
    }
  }
  if (n == 0) return 0.0;
  return std::sqrt(sum / static_cast<double>(n));
}

}  // namespace netident
