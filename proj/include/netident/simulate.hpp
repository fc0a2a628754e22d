#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netident/model.hpp"
#include "netident/network.hpp"

namespace netident {

struct Interval {
  double low = -1.0;
  double high = 1.0;
};

struct ExperimentPlan {
  int count = 1;
  std::vector<Interval> initial_ranges;  // per node; empty means [-1, 1] everywhere
  std::vector<double> inputs;            // per node, constant; empty means zero
  double period = 0.1;                   // sampling period h
  int samples = 10;                      // samples per trajectory S
  double sigma = 0.0;                    // measurement noise standard deviation
  std::uint64_t seed = 0;
  double step = 0.0;  // integrator step; 0 selects period / 50

  double integrator_step() const { return step > 0.0 ? step : period / 50.0; }
  Interval range(int node) const;
  void check(int node_count) const;
};

/// Fixed-step solution on the grid t_i = i * step.
struct Trajectory {
  double step = 0.0;
  std::vector<std::vector<double>> states;  // states[i][node]

  std::size_t size() const { return states.size(); }
  double time(std::size_t i) const { return static_cast<double>(i) * step; }
};

inline constexpr double kOverflowGuard = 1e12;

/// Classical RK4 with fixed step. Throws NonFiniteState when any state
/// leaves [-1e12, 1e12] or stops being finite.
Trajectory simulate(const NetworkModel& model, std::span<const double> x0, std::span<const double> u, double t_end,
                    double step);
Trajectory simulate(const NetworkSpec& spec, std::span<const double> x0, std::span<const double> u, double t_end,
                    double step);

struct SampleSet {
  int node = 0;
  double period = 0.0;
  std::vector<double> times;
  std::vector<double> values;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Samples `node` at t_s = s * h and adds N(0, sigma^2) noise keyed by
/// (seed, experiment, node, s).
SampleSet sample(const Trajectory& trajectory, int node, const ExperimentPlan& plan, std::uint64_t experiment = 0);

struct BatchRun {
  std::vector<double> x0;
  std::vector<SampleSet> samples;  // one per measured node, ascending node order
};

/// Initial state for one experiment: uniform on the plan's ranges, zero on
/// `zeroed_nodes`. `attempt` selects an independent redraw.
std::vector<double> draw_initial_state(const ExperimentPlan& plan, int node_count, std::span<const int> zeroed_nodes,
                                       std::uint64_t experiment, std::uint64_t attempt = 0);

/// Simulates one experiment long enough to cover all samples and samples `nodes`.
std::vector<SampleSet> run_experiment(const NetworkModel& model, std::span<const double> x0, std::span<const int> nodes,
                                      const ExperimentPlan& plan, std::uint64_t experiment);

std::vector<BatchRun> run_batch(const NetworkSpec& spec, const ExperimentPlan& plan, std::span<const int> zeroed_nodes);

/// `t,node_<i>,...` CSV of one experiment (one-based node labels).
void write_samples_csv(const std::string& path, std::span<const SampleSet> samples);
void write_trajectory_csv(const std::string& path, const Trajectory& trajectory);

}  // namespace netident
