#include "netident/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "netident/errors.hpp"
#include "netident/parallel.hpp"

namespace netident {

void write_report_csv(std::ostream& out, const NetworkSpec& spec, const IdentificationReport& report) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "edge,basis,alpha_true,alpha_hat,abs_err\n";
  for (const auto& est : report.edges) {
    const auto& edge = spec.edges[static_cast<std::size_t>(est.edge)];
    for (std::size_t l = 0; l < est.estimate.size(); ++l) {
      out << edge_label(edge) << ',' << edge.basis[l].to_string() << ',';
      if (est.truth) {
        out << (*est.truth)[l] << ',' << est.estimate[l] << ',' << std::abs(est.estimate[l] - (*est.truth)[l]);
      } else {
        out << ',' << est.estimate[l] << ',';
      }
      out << '\n';
    }
  }
  out << "\nstage,order,K,cond,residual,retries\n";
  for (const auto& s : report.stages)
    out << s.index + 1 << ',' << s.order << ',' << s.experiments << ',' << s.condition << ',' << s.residual << ','
        << s.retries << '\n';
}

std::string format_report_table(const NetworkSpec& spec, const IdentificationReport& report) {
  std::ostringstream out;
  out << "stage  order  sink  K     cond        residual    retries  edges\n";
  for (const auto& s : report.stages) {
    out << std::left << std::setw(7) << s.index + 1 << std::setw(7) << s.order << std::setw(6) << node_label(s.sink)
        << std::setw(6) << s.experiments << std::setw(12) << std::setprecision(4) << std::scientific << s.condition
        << std::setw(12) << s.residual << std::defaultfloat << std::setw(9) << s.retries;
    for (std::size_t i = 0; i < s.edges.size(); ++i)
      out << (i ? "," : "") << edge_label(spec.edges[static_cast<std::size_t>(s.edges[i])]);
    out << '\n';
  }
  out << '\n';
  out << "edge    basis      alpha_true    alpha_hat     abs_err\n";
  for (const auto& est : report.edges) {
    const auto& edge = spec.edges[static_cast<std::size_t>(est.edge)];
    for (std::size_t l = 0; l < est.estimate.size(); ++l) {
      out << std::left << std::setw(8) << edge_label(edge) << std::setw(11) << edge.basis[l].to_string() << std::right
          << std::fixed << std::setprecision(6);
      if (est.truth) {
        out << std::setw(12) << (*est.truth)[l] << "  " << std::setw(12) << est.estimate[l] << "  " << std::setw(10)
            << std::abs(est.estimate[l] - (*est.truth)[l]);
      } else {
        out << std::setw(12) << "-" << "  " << std::setw(12) << est.estimate[l];
      }
      out << std::defaultfloat << '\n';
    }
  }
  if (report.rmse) out << "\nRMSE " << std::setprecision(6) << *report.rmse << '\n';
  return out.str();
}

void write_experiments_csv(std::ostream& out, const NetworkSpec& spec, const IdentificationReport& report) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "stage,experiment,retries";
  for (int v = 0; v < spec.node_count; ++v) out << ",x0_" << node_label(v);
  out << ",target,exact\n";
  for (const auto& s : report.stages) {
    for (std::size_t k = 0; k < s.records.size(); ++k) {
      const auto& r = s.records[k];
      out << s.index + 1 << ',' << k << ',' << r.retries;
      for (double x : r.x0) out << ',' << x;
      out << ',' << r.target << ',' << r.exact << '\n';
    }
  }
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<SweepRow> run_sweep(const NetworkSpec& spec, const IdentifyOptions& options,
                                const std::vector<Stage>& schedule, const std::vector<double>& sigmas,
                                int repetitions) {
  if (sigmas.empty()) throw Error(ErrorCode::InvalidArgument, "sweep needs at least one sigma");
  if (repetitions < 1) throw Error(ErrorCode::InvalidArgument, "sweep needs at least one repetition");
  const std::size_t reps = static_cast<std::size_t>(repetitions);
  const std::size_t jobs = sigmas.size() * reps;
  std::vector<double> values(jobs, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> errors(jobs);
  parallel_for(
      jobs,
      [&](std::size_t j) {
        IdentifyOptions opt = options;
        opt.plan.sigma = sigmas[j / reps];
        opt.plan.seed = options.plan.seed + (j % reps);
        opt.threads = 1;
        opt.record_experiments = false;
        try {
          values[j] = identify(spec, opt, schedule).rmse.value();
        } catch (const std::exception& ex) {
          errors[j] = ex.what();
        }
      },
      options.threads);

  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    SweepRow row;
    row.sigma = sigmas[i];
    for (std::size_t r = 0; r < reps; ++r) {
      const std::size_t j = i * reps + r;
      if (errors[j].empty()) {
        row.rmse.push_back(values[j]);
      } else {
        row.failures.push_back("repetition " + std::to_string(r) + ": " + errors[j]);
      }
    }
    row.median = quantile(row.rmse, 0.5);
    row.q1 = quantile(row.rmse, 0.25);
    row.q3 = quantile(row.rmse, 0.75);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "sigma,repetitions,failed,median_rmse,q1_rmse,q3_rmse\n";
  for (const auto& r : rows)
    out << r.sigma << ',' << r.rmse.size() + r.failures.size() << ',' << r.failures.size() << ',' << r.median << ','
        << r.q1 << ',' << r.q3 << '\n';
}

std::string format_sweep_table(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "sigma      median RMSE   IQR                      failed\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(11) << std::setprecision(3) << r.sigma << std::setw(14) << std::setprecision(4)
        << r.median << '[' << std::setprecision(4) << r.q1 << ", " << r.q3 << ']';
    std::ostringstream iqr;
    iqr << '[' << std::setprecision(4) << r.q1 << ", " << r.q3 << ']';
    out << std::string(iqr.str().size() < 25 ? 25 - iqr.str().size() : 1, ' ') << r.failures.size() << '\n';
  }
  return out.str();
}

}  // namespace netident
