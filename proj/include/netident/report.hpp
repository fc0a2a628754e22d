#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "netident/identify.hpp"

namespace netident {

/// edge,basis,alpha_true,alpha_hat,abs_err rows, a blank line, then the
/// stage,order,K,cond,residual,retries summary block.
void write_report_csv(std::ostream& out, const NetworkSpec& spec, const IdentificationReport& report);
std::string format_report_table(const NetworkSpec& spec, const IdentificationReport& report);

/// stage,experiment,retries,x0_<i>...,target,exact per recorded experiment.
void write_experiments_csv(std::ostream& out, const NetworkSpec& spec, const IdentificationReport& report);

struct SweepRow {
  double sigma = 0.0;
  std::vector<double> rmse;            // successful repetitions, in repetition order
  std::vector<std::string> failures;   // one message per failed repetition
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

/// Repeats the identification `repetitions` times per sigma with seeds
/// seed, seed + 1, ...; a failed repetition is recorded, not fatal.
std::vector<SweepRow> run_sweep(const NetworkSpec& spec, const IdentifyOptions& options,
                                const std::vector<Stage>& schedule, const std::vector<double>& sigmas,
                                int repetitions);

/// Linear-interpolated quantile of unsorted data; NaN when empty.
double quantile(std::vector<double> values, double q);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::string format_sweep_table(const std::vector<SweepRow>& rows);

}  // namespace netident
