#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "netident/errors.hpp"
#include "netident/identify.hpp"
#include "support.hpp"

using namespace netident;
using Catch::Approx;
using support::load;

namespace {

KnownCoefficients truth_for(const NetworkSpec& spec, const std::vector<int>& edges) {
  KnownCoefficients known(spec.edges.size());
  for (int e : edges) known[e] = *spec.edges[e].coefficients;
  return known;
}

const Stage& stage_with(const std::vector<Stage>& schedule, int edge) {
  for (const auto& st : schedule)
    if (std::find(st.edges.begin(), st.edges.end(), edge) != st.edges.end()) return st;
  FAIL("edge not scheduled");
  return schedule.front();
}

IdentifyOptions exact_options(int count) {
  IdentifyOptions opt;
  opt.plan.count = count;
  opt.plan.seed = 5;
  opt.exact_derivatives = true;
  return opt;
}

std::vector<double> flatten(const IdentificationReport& r) {
  std::vector<double> out;
  for (const auto& e : r.edges) out.insert(out.end(), e.estimate.begin(), e.estimate.end());
  return out;
}

}  // namespace

TEST_CASE("gating") {
  const auto spec = parse_network_text(
      "nodes 3\nclass F_ZNL\nedge 1 2 basis=mono:1,mono:2 coeff=1,1\n"
      "edge 2 3 basis=mono:1,mono:2 coeff=1,-1.25\nmeasured 3\n");
  const auto schedule = identification_schedule(spec);
  const auto& second = stage_with(schedule, 0);
  const auto known = truth_for(spec, {1});
  // f'(0.4) = 1 - 2.5 * 0.4 = 0
  CHECK_FALSE(gate_initial_conditions(spec, second, known, std::vector<double>{0.5, 0.4, 0.0}));
  CHECK(gate_initial_conditions(spec, second, known, std::vector<double>{0.5, -0.4, 0.0}));
  CHECK_FALSE(gate_initial_conditions(spec, second, known, std::vector<double>{0.0, -0.4, 0.0}));

  const auto square = parse_network_text(
      "nodes 3\nclass F_ZNL\nedge 1 2 basis=mono:1,mono:2 coeff=1,1\nedge 2 3 basis=mono:2 coeff=1\nmeasured 3\n");
  const auto square_schedule = identification_schedule(square);
  const auto& sq = stage_with(square_schedule, 0);
  CHECK_FALSE(gate_initial_conditions(square, sq, truth_for(square, {1}), std::vector<double>{0.5, 0.0, 0.0}));

  // tanh has a positive slope everywhere on [-1, 1].
  const auto mono = parse_network_text(
      "nodes 3\nclass F_ZNL\nedge 1 2 basis=mono:1,mono:2 coeff=1,1\nedge 2 3 basis=tanh:1 coeff=1\nmeasured 3\n");
  const auto mono_schedule = identification_schedule(mono);
  const auto& st = stage_with(mono_schedule, 0);
  std::mt19937_64 gen(1);
  for (int i = 0; i < 200; ++i) {
    auto x0 = support::random_vector(gen, 3, 1.0);
    x0[2] = 0.0;
    if (std::abs(x0[0]) < 1e-2 || std::abs(x0[1]) < 1e-2) continue;
    CHECK(gate_initial_conditions(mono, st, truth_for(mono, {1}), x0));
  }
}

TEST_CASE("gating gives up after the retry budget") {
  const auto spec = parse_network_text(
      "nodes 3\nclass F_ZNL\nedge 1 2 basis=mono:1,mono:2 coeff=1,1\nedge 2 3 basis=mono:2 coeff=1\nmeasured 3\n");
  IdentifyOptions opt = exact_options(10);
  opt.plan.initial_ranges.assign(3, {-1e-3, 1e-3});
  try {
    identify(spec, opt, identification_schedule(spec));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GatingExhausted);
    CHECK(std::string(e.what()).find("stage 1") != std::string::npos);
  }
}

TEST_CASE("first-order design columns are basis values") {
  const auto spec = parse_network_text("nodes 2\nclass F_ZNL\nedge 1 2 basis=mono:1,mono:2\nmeasured 2\n");
  const auto schedule = identification_schedule(spec);
  std::vector<StageExperiment> ex{{{1.0, 0.0}, 0.5}, {{2.0, 0.0}, 1.5}, {{3.0, 0.0}, -2.0}};
  const auto p = stage_design(spec, schedule[0], KnownCoefficients(1), ex);
  Eigen::MatrixXd expect(3, 2);
  expect << 1, 1, 2, 4, 3, 9;
  CHECK(p.design.isApprox(expect, 1e-14));
  CHECK(p.target(0) == 0.5);
  CHECK(p.target(2) == -2.0);
  CHECK(p.labels[1] == ColumnLabel{0, 1});
}

TEST_CASE("second-order joint design matches the gamma-weighted regression") {
  const auto spec = load("diamond4.net");
  const auto schedule = identification_schedule(spec);
  const auto& joint = schedule[2];
  REQUIRE(joint.edges == std::vector<int>{0, 1});
  const auto known = truth_for(spec, {2, 3});
  const auto f42 = spec.true_function(2), f43 = spec.true_function(3);
  std::mt19937_64 gen(8);
  std::vector<StageExperiment> ex;
  for (int k = 0; k < 100; ++k) {
    auto x0 = support::random_vector(gen, 4, 1.0);
    x0[3] = 0.0;
    ex.push_back({x0, 0.25});
  }
  const auto p = stage_design(spec, joint, known, ex);
  for (int k = 0; k < 100; ++k) {
    const auto& x = ex[k].x0;
    const double g2 = f42.deriv(x[1], 1), g3 = f43.deriv(x[2], 1);
    for (int l = 0; l < 6; ++l) {
      const double phi = eval(spec.edges[0].basis[l], x[0]);
      CHECK(std::abs(p.design(k, l) - g2 * phi) <= 1e-10);
      CHECK(std::abs(p.design(k, 6 + l) - g3 * phi) <= 1e-10);
    }
    CHECK(std::abs(p.target(k) - 0.25) <= 1e-10);
  }
}

TEST_CASE("third-order path design matches the chain rule") {
  std::mt19937_64 gen(13);
  const std::vector<BasisFunction> basis{BasisFunction::monomial(1), BasisFunction::monomial(2),
                                         BasisFunction::monomial(3), BasisFunction::sine(2.0)};
  for (int trial = 0; trial < 100; ++trial) {
    const auto spec = support::random_path(gen, 4, basis);
    const auto schedule = identification_schedule(spec);
    const auto& last = schedule.back();
    REQUIRE(last.edges == std::vector<int>{0});
    REQUIRE(last.derivative_order == 3);
    const auto known = truth_for(spec, {1, 2});
    auto x0 = support::random_vector(gen, 4, 1.0);
    x0[3] = 0.0;
    const std::vector<StageExperiment> ex{{x0, 0.0}};
    const auto p = stage_design(spec, last, known, ex);
    const auto f32 = spec.true_function(1), f43 = spec.true_function(2);
    const double offset = f43.deriv(x0[2], 2) * f32(x0[1]) * f32(x0[1]);
    const double gain = f43.deriv(x0[2], 1) * f32.deriv(x0[1], 1);
    CHECK(std::abs(p.target(0) + offset) <= 1e-10);
    for (int l = 0; l < 4; ++l) CHECK(std::abs(p.design(0, l) - gain * eval(basis[l], x0[0])) <= 1e-10);
  }
}

TEST_CASE("solve") {
  RegressionProblem p;
  p.design = Eigen::MatrixXd::Identity(3, 3);
  p.target = Eigen::Vector3d(1, 2, 3);
  const auto r = solve(p);
  CHECK(r.coefficients.isApprox(Eigen::Vector3d(1, 2, 3)));
  CHECK(r.condition == Approx(1.0));
  CHECK(r.residual_norm == Approx(0.0).margin(1e-15));

  p.design = Eigen::MatrixXd::Ones(4, 2);
  p.target = Eigen::VectorXd::Ones(4);
  CHECK_THROWS_AS(solve(p), Error);
  p.design = Eigen::MatrixXd::Ones(1, 2);
  p.target = Eigen::VectorXd::Ones(1);
  try {
    solve(p);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
  CHECK(std::isinf(condition_estimate(Eigen::MatrixXd::Zero(3, 2))));
}

TEST_CASE("noiseless path recovery with twelve experiments") {
  const auto spec = load("path3.net");
  const auto report = identify(spec, exact_options(12), identification_schedule(spec));
  REQUIRE(report.stages.size() == 2);
  CHECK(report.stages[0].experiments == 12);
  const std::vector<double> f21{-2.0, 1.25, 0.0, 0.0}, f32{-1.0, 0.7, -0.6, 0.0};
  for (int l = 0; l < 4; ++l) {
    CHECK(std::abs(report.edges[0].estimate[l] - f21[l]) <= 1e-8);
    CHECK(std::abs(report.edges[1].estimate[l] - f32[l]) <= 1e-8);
  }
  CHECK(*report.rmse <= 1e-8);
}

TEST_CASE("noiseless recovery on every shipped network") {
  for (const char* name : {"path3.net", "diamond4.net", "triangle3.net", "bridge4.net", "tanks4.net"}) {
    INFO(name);
    const auto spec = load(name);
    const auto report = identify(spec, exact_options(1), identification_schedule(spec));
    CHECK(*report.rmse <= 1e-8);
  }
}

TEST_CASE("property: noiseless recovery on random trees") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 50; ++trial) {
    const auto spec = support::random_tree(gen, 6);
    INFO(format_network(spec));
    const auto report = identify(spec, exact_options(1), identification_schedule(spec));
    for (const auto& e : report.edges)
      for (std::size_t l = 0; l < e.estimate.size(); ++l) CHECK(std::abs(e.estimate[l] - (*e.truth)[l]) <= 1e-7);
  }
}

TEST_CASE("property: stage derivative is affine in the stage coefficients") {
  std::mt19937_64 gen(41);
  const std::vector<BasisFunction> basis{BasisFunction::monomial(1), BasisFunction::monomial(2),
                                         BasisFunction::sine(3.0)};
  for (int trial = 0; trial < 40; ++trial) {
    const auto spec = trial % 2 ? support::random_path(gen, 4, basis) : load("diamond4.net");
    for (const auto& st : identification_schedule(spec)) {
      std::vector<std::vector<double>> base(spec.edges.size()), a, b, sum;
      for (std::size_t e = 0; e < spec.edges.size(); ++e) base[e] = *spec.edges[e].coefficients;
      for (int e : st.edges) std::fill(base[e].begin(), base[e].end(), 0.0);
      a = b = sum = base;
      for (int e : st.edges)
        for (std::size_t l = 0; l < base[e].size(); ++l) {
          a[e][l] = support::random_vector(gen, 1, 1.0)[0];
          b[e][l] = support::random_vector(gen, 1, 1.0)[0];
          sum[e][l] = a[e][l] + b[e][l];
        }
      auto x0 = support::random_vector(gen, spec.node_count, 1.0);
      for (int z : st.zeroed_nodes) x0[z] = 0.0;
      const int m = st.derivative_order;
      auto at = [&](const auto& c) { return sink_derivative(spec, c, x0, st.sink, m); };
      CHECK(std::abs(at(a) + at(b) - at(base) - at(sum)) <= 1e-9);
    }
  }
}

TEST_CASE("one order higher the sink derivative is no longer affine") {
  const auto spec = load("path3.net");
  const auto schedule = identification_schedule(spec);
  const auto& st = schedule.back();
  std::vector<std::vector<double>> base{{0, 0, 0, 0}, {-1, 0.7, -0.6, 0}}, a = base, b = base, sum = base;
  a[0] = {1.0, 0.5, 0.0, 0.0};
  b[0] = {-0.5, 1.0, 0.2, 0.0};
  for (int l = 0; l < 4; ++l) sum[0][l] = a[0][l] + b[0][l];
  const std::vector<double> x0{0.8, -0.6, 0.0};
  const int m = st.derivative_order + 1;
  auto at = [&](const auto& c) { return sink_derivative(spec, c, x0, st.sink, m); };
  CHECK(std::abs(at(a) + at(b) - at(base) - at(sum)) > 1e-3);
}

TEST_CASE("linearity hazard is reported as such") {
  auto spec = load("diamond4.net");
  spec.function_class = FunctionClass::FZ;
  for (int e : {2, 3}) {
    spec.edges[e].basis = {BasisFunction::monomial(1)};
    spec.edges[e].coefficients = std::vector<double>{e == 2 ? 1.0 : 0.7};
  }
  try {
    identify(spec, exact_options(1), identification_schedule(spec));
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
    CHECK(std::string(e.what()).find("linearity hazard") != std::string::npos);
  }
  spec.edges[2].basis = {BasisFunction::monomial(1), BasisFunction::monomial(2)};
  spec.edges[2].coefficients = std::vector<double>{1.0, -1.25};
  const auto report = identify(spec, exact_options(1), identification_schedule(spec));
  CHECK(*report.rmse <= 1e-8);
}

TEST_CASE("relabeling nodes does not change the estimates") {
  const auto spec = load("bridge4.net");
  const auto base = identify(spec, exact_options(1), identification_schedule(spec));
  const std::vector<int> perm{2, 0, 3, 1};
  const auto moved = support::relabel(spec, perm);
  const auto other = identify(moved, exact_options(1), identification_schedule(moved));
  const auto x = flatten(base), y = flatten(other);
  REQUIRE(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == Approx(y[i]).margin(1e-9));
}

TEST_CASE("external samples drive the pipeline") {
  const auto spec = load("path3.net");
  const auto model = NetworkModel::from_truth(spec);
  IdentifyOptions opt;
  opt.plan.count = 30;
  opt.plan.period = 0.05;
  opt.plan.samples = 10;
  int calls = 0;
  SinkSampler sampler = [&](std::size_t, std::uint64_t key, int sink, std::span<const double> x0) {
    ++calls;
    const int nodes[] = {sink};
    return run_experiment(model, x0, nodes, opt.plan, key).front();
  };
  opt.threads = 1;
  const auto report = identify(spec, opt, identification_schedule(spec), sampler);
  CHECK(calls == 60);
  CHECK(*report.rmse < 1e-3);
}

TEST_CASE("noisy identification is reproducible and independent of threads") {
  const auto spec = load("diamond4.net");
  IdentifyOptions opt;
  opt.plan.count = 100;
  opt.plan.period = 0.3;
  opt.plan.sigma = 1e-4;
  opt.plan.seed = 11;
  opt.threads = 1;
  const auto a = identify(spec, opt, identification_schedule(spec));
  opt.threads = 5;
  const auto b = identify(spec, opt, identification_schedule(spec));
  CHECK(flatten(a) == flatten(b));
  CHECK(*a.rmse < 0.05);
}

TEST_CASE("rmse") {
  const auto spec = parse_network_text(
      "nodes 3\nclass F_Z\nedge 1 2 basis=mono:1,mono:2 coeff=1,2\nedge 2 3 basis=mono:1,mono:2 coeff=3,4\nmeasured 3\n");
  IdentificationReport r;
  r.edges = {{0, {1.0, 2.0}, std::nullopt}, {1, {3.0, 4.0}, std::nullopt}};
  CHECK(rmse(r, spec) == 0.0);
  r.edges[1].estimate[0] = 3.4;
  CHECK(rmse(r, spec) == Approx(0.2));
  r.edges[1].estimate.push_back(0.0);
  CHECK_THROWS_AS(rmse(r, spec), Error);
}

TEST_CASE("rmse of the printed path estimates") {
  // Estimates printed for the noisy path example, full-dictionary convention.
  const auto spec = load("path3.net");
  IdentificationReport r;
  r.edges = {{0, {-2.004, 1.253, 0.01, 0.003}, std::nullopt}, {1, {-0.999, 0.706, -0.605, 0.011}, std::nullopt}};
  CHECK(rmse(r, spec) == Approx(0.0063).margin(5e-5));
}

TEST_CASE("default options follow the plan line") {
  const auto bare = parse_network_text("nodes 2\nedge 1 2 basis=mono:1 coeff=1\nmeasured 2\n");
  const auto d = default_options(bare);
  CHECK(d.plan.count == 1);
  CHECK(d.plan.period == 0.1);
  CHECK(d.plan.samples == 10);
  CHECK(d.plan.sigma == 0.0);
  CHECK(d.plan.initial_ranges.empty());
  CHECK(d.window == 10);
  CHECK(d.degree == 5);
  CHECK_NOTHROW(d.plan.check(2));
  const auto report = identify(bare, d, identification_schedule(bare));
  CHECK(report.stages[0].experiments == 3);

  const auto path = support::load("path3.net");
  const auto p = default_options(path);
  CHECK(p.plan.count == *path.plan.experiments);
  CHECK(p.plan.period == *path.plan.period);
  REQUIRE(p.plan.initial_ranges.size() == 3);
  CHECK(p.plan.initial_ranges[2].low == *path.plan.ic_low);
}
