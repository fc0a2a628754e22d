// netident: identifiability checks, simulation and staged identification of
// nonlinear networks on directed acyclic graphs.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "netident/netident.hpp"

namespace fs = std::filesystem;
using namespace netident;

namespace {

struct CliOptions {
  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::vector<double> sigmas;
  int reps = 10;
  std::optional<int> k;
  std::optional<double> dt;
  std::optional<int> samples;
  std::optional<int> window;
  std::optional<int> degree;
  std::optional<double> step;
  std::string out_dir;
  bool dump_jets = false;
  bool exact = false;
  bool dense = false;
};

void add_common(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--spec", o.spec_path, "Network spec file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--k", o.k, "Experiments per stage (lower bound) or per batch");
  cmd->add_option("--dt", o.dt, "Sampling period h in seconds");
  cmd->add_option("--samples", o.samples, "Samples per trajectory");
  cmd->add_option("--window", o.window, "Savitzky-Golay window length");
  cmd->add_option("--degree", o.degree, "Savitzky-Golay polynomial degree");
  cmd->add_option("--step", o.step, "Integrator step (default h/50)");
  cmd->add_option("--out", o.out_dir, "Output directory");
}

IdentifyOptions resolve(const NetworkSpec& spec, const CliOptions& o) {
  IdentifyOptions opt = default_options(spec);
  if (o.k) opt.plan.count = *o.k;
  if (o.dt) opt.plan.period = *o.dt;
  if (o.samples) opt.plan.samples = *o.samples;
  if (!o.sigmas.empty()) opt.plan.sigma = o.sigmas.front();
  if (o.seed) opt.plan.seed = *o.seed;
  if (o.step) opt.plan.step = *o.step;
  if (o.window) opt.window = *o.window;
  if (o.degree) opt.degree = *o.degree;
  opt.exact_derivatives = o.exact;
  opt.record_experiments = o.dump_jets;
  return opt;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << content;
}

fs::path output_dir(const CliOptions& o) {
  fs::path dir = o.out_dir.empty() ? fs::path(".") : fs::path(o.out_dir);
  fs::create_directories(dir);
  return dir;
}

int cmd_check(const CliOptions& o) {
  const NetworkSpec spec = load_network(o.spec_path);
  const auto order = validate(spec);
  const auto req = required_measurements(spec);
  bool ok = true;

  std::cout << "topological order:";
  for (int v : order) std::cout << ' ' << node_label(v);
  std::cout << "\nrequired measurements:";
  for (int v : req.nodes) std::cout << ' ' << node_label(v);
  std::cout << "\nmeasured:";
  for (int v : spec.measured) std::cout << ' ' << node_label(v);
  std::cout << '\n';

  std::cout << "parallel path groups:\n";
  bool any_group = false;
  for (int s : sinks(spec)) {
    for (const auto& g : parallel_path_groups(spec, s)) {
      any_group = true;
      std::cout << "  sink " << node_label(s) << ", source " << node_label(g.source) << ", length " << g.length << ":";
      for (const auto& p : g.paths) std::cout << ' ' << describe_path(p);
      std::cout << '\n';
    }
  }
  if (!any_group) std::cout << "  none\n";

  const auto hazards = linearity_hazard(spec);
  std::cout << "linearity hazards:\n";
  if (hazards.empty()) std::cout << "  none\n";
  for (const auto& h : hazards) std::cout << "  " << h.message << '\n';
  if (!hazards.empty()) ok = false;

  try {
    const auto schedule = identification_schedule(spec);
    std::cout << "identification schedule:\n";
    for (std::size_t i = 0; i < schedule.size(); ++i)
      std::cout << "  " << i + 1 << ". " << describe_stage(spec, schedule[i]) << '\n';
  } catch (const Error& err) {
    std::cerr << "netident check: " << err.what() << '\n';
    ok = false;
  }
  return ok ? 0 : 1;
}

int cmd_simulate(const CliOptions& o) {
  const NetworkSpec spec = load_network(o.spec_path);
  IdentifyOptions opt = resolve(spec, o);
  ExperimentPlan plan = opt.plan;
  plan.count = std::max(plan.count, 1);
  const auto runs = run_batch(spec, plan, {});
  const fs::path dir = output_dir(o);
  const auto model = NetworkModel::from_truth(spec);
  for (std::size_t k = 0; k < runs.size(); ++k) {
    write_samples_csv((dir / ("exp_" + std::to_string(k) + ".csv")).string(), runs[k].samples);
    if (o.dense) {
      const auto traj = simulate(model, runs[k].x0, plan.inputs, plan.period * (plan.samples - 1), plan.integrator_step());
      write_trajectory_csv((dir / ("traj_" + std::to_string(k) + ".csv")).string(), traj);
    }
  }
  std::cout << "wrote " << runs.size() << " experiment(s) to " << dir.string() << '\n';
  return 0;
}

int cmd_identify(const CliOptions& o) {
  const NetworkSpec spec = load_network(o.spec_path);
  const IdentifyOptions opt = resolve(spec, o);
  const auto schedule = identification_schedule(spec);
  const auto report = identify(spec, opt, schedule);
  const std::string table = format_report_table(spec, report);
  std::cout << table;
  if (!o.out_dir.empty() || o.dump_jets) {
    const fs::path dir = output_dir(o);
    std::ostringstream csv;
    write_report_csv(csv, spec, report);
    write_file(dir / "report.csv", csv.str());
    write_file(dir / "report.txt", table);
    if (o.dump_jets) {
      std::ostringstream jets;
      write_experiments_csv(jets, spec, report);
      write_file(dir / "jets.csv", jets.str());
    }
  }
  return 0;
}

int cmd_sweep(const CliOptions& o) {
  const NetworkSpec spec = load_network(o.spec_path);
  if (o.sigmas.empty()) throw Error(ErrorCode::InvalidArgument, "sweep needs at least one --sigma");
  const IdentifyOptions opt = resolve(spec, o);
  const auto schedule = identification_schedule(spec);
  const auto rows = run_sweep(spec, opt, schedule, o.sigmas, o.reps);
  std::cout << format_sweep_table(rows);
  bool any_success = false;
  for (const auto& r : rows) {
    any_success = any_success || !r.rmse.empty();
    for (const auto& f : r.failures) std::cerr << "sigma " << r.sigma << ", " << f << '\n';
  }
  if (!o.out_dir.empty()) {
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    write_file(output_dir(o) / "sweep.csv", csv.str());
  }
  return any_success ? 0 : 1;
}

std::string remediation(const Error& err) {
  switch (err.code()) {
    case ErrorCode::RankDeficient:
      return "hint: increase --k, widen the initial-condition ranges, or check the linearity hazards with 'check'";
    case ErrorCode::GatingExhausted:
      return "hint: widen the initial-condition ranges (plan ic=lo,hi)";
    case ErrorCode::NonFiniteState:
      return "hint: shorten the horizon (--dt, --samples) or shrink the initial-condition ranges";
    case ErrorCode::OrderTooHigh:
      return "hint: raise --degree (and --window) to cover the deepest stage";
    case ErrorCode::UnmeasuredSink:
      return "hint: every sink must appear in the 'measured' line";
    default:
      return {};
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Identification of nonlinear dynamics on directed acyclic networks"};
  app.require_subcommand(1);
  CliOptions o;

  auto* check = app.add_subcommand("check", "Required measurements, schedule, parallel paths and hazards");
  check->add_option("--spec", o.spec_path, "Network spec file")->required()->check(CLI::ExistingFile);

  auto* sim = app.add_subcommand("simulate", "Simulate a batch of experiments and write exp_<k>.csv files");
  add_common(sim, o);
  sim->add_option("--sigma", o.sigmas, "Measurement noise standard deviation");
  sim->add_flag("--dense", o.dense, "Also write the full integrator trajectory of every node");

  auto* ident = app.add_subcommand("identify", "Run the staged identification and report coefficients");
  add_common(ident, o);
  ident->add_option("--sigma", o.sigmas, "Measurement noise standard deviation");
  ident->add_flag("--dump-jets", o.dump_jets, "Write per-experiment initial states and derivative targets");
  ident->add_flag("--exact-derivatives", o.exact, "Use exact jets of the true model instead of Savitzky-Golay");

  auto* sweep = app.add_subcommand("sweep", "Median RMSE over repeated identifications per noise level");
  add_common(sweep, o);
  sweep->add_option("--sigma", o.sigmas, "Noise level (repeatable)")->required();
  sweep->add_option("--reps", o.reps, "Repetitions per noise level")->check(CLI::PositiveNumber);
  sweep->add_flag("--exact-derivatives", o.exact, "Use exact jets of the true model instead of Savitzky-Golay");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return cmd_check(o);
    if (*sim) return cmd_simulate(o);
    if (*ident) return cmd_identify(o);
    if (*sweep) return cmd_sweep(o);
  } catch (const Error& err) {
    std::cerr << "netident: " << err.what() << '\n';
    if (const auto hint = remediation(err); !hint.empty()) std::cerr << hint << '\n';
    return err.code() == ErrorCode::Parse ? 2 : 1;
  } catch (const std::exception& ex) {
    std::cerr << "netident: " << ex.what() << '\n';
    return 1;
  }
  return 1;
}
