// ============================================================================
// evaluation.hpp -- RMSE metric, filter -> PML pipeline and parameter sweeps
// ============================================================================
#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "splidar/consensus_filter.hpp"
#include "splidar/cube.hpp"
#include "splidar/depth_estimator.hpp"
#include "splidar/simulator.hpp"

namespace splidar {

enum class FilterKind { rom, mode, consensus, oracle };

std::string_view to_string(FilterKind kind);
FilterKind parse_filter(std::string_view name);

/// sqrt(sum (z - z_hat)^2 / (N_i N_j)). Every pixel counts, valid or not.
double rmse(const Grid<double>& truth, const Grid<double>& estimate);
double rmse(const DepthImage& truth, const DepthImage& estimate);

struct PipelineOptions {
  PmlConfig pml;
  double p_outlier = 1.0;
  std::optional<int> neighborhood_side;
  std::optional<double> signal_ppp;  // consensus pool sizing; estimated from data if unset
  unsigned threads = 0;
};

struct PipelineResult {
  CensoredCube censored;
  DepthImage depth;
  bool blank = false;  // no pixel kept anything; depth is all zeros
  bool pml_converged = true;
};

/// Runs one signal-extraction filter. The oracle passes every timestamp
/// through unchanged and requires a background-free cube (ConfigError otherwise).
CensoredCube run_filter(const TimestampCube& cube, FilterKind filter,
                        const PipelineOptions& options);

/// Filter then PML.
PipelineResult run_pipeline(const TimestampCube& cube, FilterKind filter,
                            const PipelineOptions& options);

enum class SweepVariable { sbr, signal_ppp };
std::string_view to_string(SweepVariable v);

struct SweepSpec {
  Scene scene;
  SweepVariable variable = SweepVariable::sbr;
  std::vector<double> values;
  double fixed_value = 1.0;  // the other variable
  int trials = 10;
  std::vector<FilterKind> filters{FilterKind::rom, FilterKind::mode, FilterKind::consensus,
                                  FilterKind::oracle};
  PipelineOptions pipeline;

  void validate() const;
};

struct SweepRow {
  FilterKind filter = FilterKind::rom;
  SweepVariable variable = SweepVariable::sbr;
  double value = 0;
  int trial_count = 0;  // successful trials
  double mean_rmse = 0;
  double std_rmse = 0;  // sample standard deviation, 0 for a single trial
  std::vector<double> trial_rmse;
};

struct SweepFailure {
  FilterKind filter;
  double value;
  int trial;
  std::string message;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::vector<SweepFailure> failures;

  const SweepRow& find(FilterKind filter, double value) const;
};

/// Seed of (point, trial); the oracle reuses the trial seed with B = 0.
RngSeed trial_seed(RngSeed seed, std::size_t point, int trial);

SweepTable run_sweep(const SweepSpec& spec, const AcquisitionParams& base, RngSeed seed);

void write_sweep_csv(std::ostream& out, const SweepTable& table);

}  // namespace splidar
