#include "netident/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "netident/errors.hpp"
#include "netident/graph.hpp"
#include "netident/parallel.hpp"
#include "netident/rng.hpp"

namespace netident {
namespace {

constexpr std::uint64_t kInitialStream = 0x1c;
constexpr std::uint64_t kNoiseStream = 0x2e;

std::size_t steps_for(double t_end, double step) {
  const double ratio = t_end / step;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw Error(ErrorCode::InvalidArgument, "integrator step must divide the horizon evenly");
  return static_cast<std::size_t>(rounded);
}

}  // namespace

Interval ExperimentPlan::range(int node) const {
  if (initial_ranges.empty()) return {};
  return initial_ranges.at(static_cast<std::size_t>(node));
}

void ExperimentPlan::check(int node_count) const {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "experiment count must be >= 1");
  if (samples < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 samples per trajectory");
  if (!(period > 0.0)) throw Error(ErrorCode::InvalidArgument, "sampling period must be > 0");
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise sigma must be >= 0");
  if (!initial_ranges.empty() && static_cast<int>(initial_ranges.size()) != node_count)
    throw Error(ErrorCode::InvalidArgument, "one initial-condition range per node expected");
  for (const auto& r : initial_ranges)
    if (r.low > r.high) throw Error(ErrorCode::InvalidArgument, "initial-condition range with low > high");
  if (!inputs.empty() && static_cast<int>(inputs.size()) != node_count)
    throw Error(ErrorCode::InvalidArgument, "one input value per node expected");
  steps_for(period, integrator_step());
}

Trajectory simulate(const NetworkModel& model, std::span<const double> x0, std::span<const double> u, double t_end,
                    double step) {
  const auto n = static_cast<std::size_t>(model.node_count);
  if (x0.size() != n) throw Error(ErrorCode::InvalidArgument, "initial state has wrong dimension");
  if (!u.empty() && u.size() != n) throw Error(ErrorCode::InvalidArgument, "input vector has wrong dimension");
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "integrator step must be > 0");
  const std::size_t steps = steps_for(t_end, step);

  Trajectory traj;
  traj.step = step;
  traj.states.reserve(steps + 1);
  traj.states.emplace_back(x0.begin(), x0.end());

  std::vector<double> x(x0.begin(), x0.end()), k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t i = 0; i < steps; ++i) {
    model.rhs(x, u, k1);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * step * k1[j];
    model.rhs(tmp, u, k2);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * step * k2[j];
    model.rhs(tmp, u, k3);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + step * k3[j];
    model.rhs(tmp, u, k4);
    for (std::size_t j = 0; j < n; ++j) {
      x[j] += step / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      if (!std::isfinite(x[j]) || std::abs(x[j]) > kOverflowGuard)
        throw Error(ErrorCode::NonFiniteState, "state of node " + node_label(static_cast<int>(j)) +
                                                   " exceeded the overflow guard at t = " +
                                                   std::to_string(static_cast<double>(i + 1) * step));
    }
    traj.states.push_back(x);
  }
  return traj;
}

Trajectory simulate(const NetworkSpec& spec, std::span<const double> x0, std::span<const double> u, double t_end,
                    double step) {
  return simulate(NetworkModel::from_truth(spec), x0, u, t_end, step);
}

SampleSet sample(const Trajectory& trajectory, int node, const ExperimentPlan& plan, std::uint64_t experiment) {
  const std::size_t stride = steps_for(plan.period, trajectory.step);
  SampleSet out;
  out.node = node;
  out.period = plan.period;
  out.sigma = plan.sigma;
  out.seed = plan.seed;
  out.times.reserve(static_cast<std::size_t>(plan.samples));
  out.values.reserve(static_cast<std::size_t>(plan.samples));
  for (int s = 0; s < plan.samples; ++s) {
    const std::size_t i = static_cast<std::size_t>(s) * stride;
    if (i >= trajectory.size()) throw Error(ErrorCode::InsufficientSamples, "trajectory too short for the sampling plan");
    double v = trajectory.states[i][static_cast<std::size_t>(node)];
    if (plan.sigma > 0.0)
      v += plan.sigma * rng::standard_normal(rng::key({plan.seed, kNoiseStream, experiment,
                                                       static_cast<std::uint64_t>(node), static_cast<std::uint64_t>(s)}));
    out.times.push_back(static_cast<double>(s) * plan.period);
    out.values.push_back(v);
  }
  return out;
}

std::vector<double> draw_initial_state(const ExperimentPlan& plan, int node_count, std::span<const int> zeroed_nodes,
                                       std::uint64_t experiment, std::uint64_t attempt) {
  std::vector<double> x0(static_cast<std::size_t>(node_count), 0.0);
  for (int v = 0; v < node_count; ++v) {
    if (std::find(zeroed_nodes.begin(), zeroed_nodes.end(), v) != zeroed_nodes.end()) continue;
    const Interval r = plan.range(v);
    const double u = rng::uniform01(
        rng::key({plan.seed, kInitialStream, experiment, attempt, static_cast<std::uint64_t>(v)}));
    x0[static_cast<std::size_t>(v)] = r.low + (r.high - r.low) * u;
  }
  return x0;
}

std::vector<SampleSet> run_experiment(const NetworkModel& model, std::span<const double> x0, std::span<const int> nodes,
                                      const ExperimentPlan& plan, std::uint64_t experiment) {
  const double t_end = plan.period * (plan.samples - 1);
  const auto traj = simulate(model, x0, plan.inputs, t_end, plan.integrator_step());
  std::vector<SampleSet> out;
  out.reserve(nodes.size());
  for (int node : nodes) out.push_back(sample(traj, node, plan, experiment));
  return out;
}

std::vector<BatchRun> run_batch(const NetworkSpec& spec, const ExperimentPlan& plan, std::span<const int> zeroed_nodes) {
  validate(spec);
  plan.check(spec.node_count);
  const auto model = NetworkModel::from_truth(spec);
  std::vector<BatchRun> runs(static_cast<std::size_t>(plan.count));
  parallel_for(runs.size(), [&](std::size_t k) {
    auto& run = runs[k];
    run.x0 = draw_initial_state(plan, spec.node_count, zeroed_nodes, k);
    run.samples = run_experiment(model, run.x0, spec.measured, plan, k);
  });
  return runs;
}

void write_samples_csv(const std::string& path, std::span<const SampleSet> samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "t";
  for (const auto& s : samples) out << ",node_" << node_label(s.node);
  out << "\n";
  const std::size_t rows = samples.empty() ? 0 : samples.front().values.size();
  for (std::size_t r = 0; r < rows; ++r) {
    out << samples.front().times[r];
    for (const auto& s : samples) out << ',' << s.values[r];
    out << "\n";
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& trajectory) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "t";
  const std::size_t n = trajectory.states.empty() ? 0 : trajectory.states.front().size();
  for (std::size_t j = 0; j < n; ++j) out << ",node_" << node_label(static_cast<int>(j));
  out << "\n";
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    out << trajectory.time(i);
    for (double v : trajectory.states[i]) out << ',' << v;
    out << "\n";
  }
}

}  // namespace netident
