#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>

#include "netident/errors.hpp"
#include "netident/rng.hpp"
#include "netident/simulate.hpp"
#include "support.hpp"

using namespace netident;
using support::load;
using Catch::Approx;

namespace {

using State = std::vector<double>;
using support::dopri;

// Path example written out by hand.
State path_rhs(const State& x) {
  return {0.0, -2.0 * x[0] + 1.25 * x[0] * x[0], -x[1] + 0.7 * x[1] * x[1] - 0.6 * x[1] * x[1] * x[1]};
}

// Sine chain 1 -> 2 -> 3 -> 4; its trajectories are not polynomials in t.
const char* kSineChain =
    "nodes 4\nclass F_ZNL\nedge 1 2 basis=mono:1,mono:2 coeff=1,0\nedge 2 3 basis=sin:3 coeff=1.5\n"
    "edge 3 4 basis=sin:2,mono:2 coeff=-1,0.5\nmeasured 4\n";

State sine_rhs(const State& x) {
  return {0.0, x[0], 1.5 * std::sin(3 * x[1]), -std::sin(2 * x[2]) + 0.5 * x[2] * x[2]};
}

}  // namespace

TEST_CASE("zero state stays zero") {
  for (const char* name : {"path3.net", "diamond4.net", "tanks4.net"}) {
    const auto spec = load(name);
    std::vector<double> zero(spec.node_count, 0.0);
    const auto traj = simulate(spec, zero, zero, 2.0, 0.01);
    for (const auto& row : traj.states)
      for (double v : row) CHECK(v == 0.0);
  }
}

TEST_CASE("linear chain against its closed form") {
  const auto spec = parse_network_text("nodes 2\nclass F_Z\nedge 1 2 basis=mono:1 coeff=-2\nmeasured 2\n");
  const std::vector<double> x0{1.0, 0.0}, u{0.0, 0.0};
  const auto traj = simulate(spec, x0, u, 0.5, 1e-3);
  CHECK(traj.states.front() == x0);
  CHECK(traj.states.back()[0] == 1.0);
  CHECK(traj.states.back()[1] == Approx(-1.0).margin(1e-8));
  CHECK(traj.time(traj.size() - 1) == Approx(0.5));
}

TEST_CASE("constant input drives a source linearly") {
  const auto spec = parse_network_text("nodes 2\nclass F_Z\nedge 1 2 basis=mono:1 coeff=1\nmeasured 2\n");
  const std::vector<double> x0{0.0, 0.0}, u{2.0, 0.0};
  const auto traj = simulate(spec, x0, u, 1.0, 1e-2);
  CHECK(traj.states.back()[0] == Approx(2.0).margin(1e-12));
  CHECK(traj.states.back()[1] == Approx(1.0).margin(1e-10));
}

TEST_CASE("path example against an adaptive reference") {
  const auto spec = load("path3.net");
  const State x0{0.3, -0.2, 0.1};
  const auto ref = dopri(path_rhs, x0, 4.0, 1e-12);
  const std::vector<double> u(3, 0.0);
  const auto traj = simulate(spec, x0, u, 4.0, 4.0 / 500);
  CHECK(traj.states.back()[2] == Approx(ref[2]).margin(1e-6));
}

TEST_CASE("RK4 converges at fourth order") {
  const auto spec = parse_network_text(kSineChain);
  const State x0{0.9, -0.7, 0.5, 0.2};
  const auto ref = dopri(sine_rhs, x0, 4.0, 1e-13);
  const std::vector<double> u(4, 0.0);
  auto err = [&](double step) {
    const auto traj = simulate(spec, x0, u, 4.0, step);
    double e = 0.0;
    for (int i = 0; i < 4; ++i) e = std::max(e, std::abs(traj.states.back()[i] - ref[i]));
    return e;
  };
  const double ratio = err(0.1) / err(0.05);
  INFO("ratio " << ratio);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("blow-up is reported") {
  const auto spec = parse_network_text("nodes 2\nclass F_Z\nedge 1 2 basis=mono:1 coeff=1\nmeasured 2\n");
  // A huge input on the source pushes it past the overflow guard.
  const std::vector<double> x0{0.0, 0.0}, u{1e14, 0.0};
  CHECK_THROWS_AS(simulate(spec, x0, u, 1.0, 0.1), Error);
}

TEST_CASE("noise has the requested spread") {
  ExperimentPlan plan;
  plan.period = 0.1;
  plan.samples = 10;
  plan.sigma = 1e-3;
  plan.seed = 17;
  Trajectory flat;
  flat.step = 0.1;
  flat.states.assign(10, std::vector<double>{0.0});
  double sum = 0.0, sq = 0.0;
  const int experiments = 10000;
  for (int k = 0; k < experiments; ++k) {
    const auto s = sample(flat, 0, plan, static_cast<std::uint64_t>(k));
    for (double v : s.values) {
      sum += v;
      sq += v * v;
    }
  }
  const double n = experiments * 10.0;
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(sd - 1e-3) <= 0.02 * 1e-3);
  CHECK(std::abs(mean) <= 5.0 * 1e-3 / std::sqrt(n));
}

TEST_CASE("sampling is deterministic and noiseless at sigma zero") {
  const auto spec = load("path3.net");
  const auto model = NetworkModel::from_truth(spec);
  ExperimentPlan plan;
  plan.period = 0.4;
  plan.samples = 10;
  plan.sigma = 1e-3;
  plan.seed = 3;
  const std::vector<double> x0{0.3, -0.2, 0.1};
  const std::vector<int> nodes{2};
  const auto a = run_experiment(model, x0, nodes, plan, 4);
  const auto b = run_experiment(model, x0, nodes, plan, 4);
  CHECK(a[0].values == b[0].values);
  const auto c = run_experiment(model, x0, nodes, plan, 5);
  CHECK(a[0].values != c[0].values);

  plan.sigma = 0.0;
  const auto clean = run_experiment(model, x0, nodes, plan, 4);
  const auto traj = simulate(model, x0, std::vector<double>(3, 0.0), 3.6, plan.integrator_step());
  for (int s = 0; s < 10; ++s) CHECK(clean[0].values[s] == traj.states[static_cast<std::size_t>(s) * 50][2]);
  CHECK(clean[0].times[9] == Approx(3.6));
}

TEST_CASE("batch shapes and zeroed nodes") {
  auto spec = load("path3.net");
  ExperimentPlan plan;
  plan.count = 50;
  plan.period = 0.4;
  plan.samples = 10;
  const auto runs = run_batch(spec, plan, std::vector<int>{0});
  REQUIRE(runs.size() == 50);
  for (const auto& r : runs) {
    CHECK(r.x0[0] == 0.0);
    CHECK(std::abs(r.x0[1]) <= 1.0);
    REQUIRE(r.samples.size() == 1);
    CHECK(r.samples[0].values.size() == 10);
    CHECK(r.samples[0].times[1] == Approx(0.4));
  }
  const auto dead = run_batch(spec, plan, std::vector<int>{0, 1, 2});
  for (const auto& r : dead)
    for (double v : r.samples[0].values) CHECK(v == 0.0);

  const auto diamond = load("diamond4.net");
  plan.count = 100;
  plan.period = 0.3;
  const auto many = run_batch(diamond, plan, {});
  CHECK(many.size() == 100);
  CHECK(many[7].samples[0].times[2] == Approx(0.6));
}

TEST_CASE("batch output does not depend on thread count") {
  const auto spec = load("diamond4.net");
  ExperimentPlan plan;
  plan.count = 40;
  plan.period = 0.3;
  plan.sigma = 1e-3;
  plan.seed = 8;
  setenv("NETIDENT_THREADS", "1", 1);
  const auto one = run_batch(spec, plan, {});
  setenv("NETIDENT_THREADS", "6", 1);
  const auto six = run_batch(spec, plan, {});
  unsetenv("NETIDENT_THREADS");
  for (std::size_t k = 0; k < one.size(); ++k) {
    CHECK(one[k].x0 == six[k].x0);
    CHECK(one[k].samples[0].values == six[k].samples[0].values);
  }
}

TEST_CASE("initial state redraws are independent") {
  ExperimentPlan plan;
  plan.initial_ranges = {{-1.0, 1.0}, {2.0, 3.0}};
  const auto a = draw_initial_state(plan, 2, {}, 1, 0);
  const auto b = draw_initial_state(plan, 2, {}, 1, 1);
  CHECK(a != b);
  CHECK(a == draw_initial_state(plan, 2, {}, 1, 0));
  CHECK(b[1] >= 2.0);
  CHECK(b[1] <= 3.0);
}

TEST_CASE("plan checks") {
  ExperimentPlan plan;
  plan.samples = 1;
  CHECK_THROWS_AS(plan.check(3), Error);
  plan.samples = 5;
  plan.sigma = -1.0;
  CHECK_THROWS_AS(plan.check(3), Error);
}
