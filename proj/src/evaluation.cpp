#include "splidar/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <stdexcept>

#include "splidar/mode_filter.hpp"
#include "splidar/rom_filter.hpp"

namespace splidar {

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::rom: return "rom";
    case FilterKind::mode: return "mode";
    case FilterKind::consensus: return "consensus";
    case FilterKind::oracle: return "oracle";
  }
  return "unknown";
}

FilterKind parse_filter(std::string_view name) {
  if (name == "rom") return FilterKind::rom;
  if (name == "mode") return FilterKind::mode;
  if (name == "consensus") return FilterKind::consensus;
  if (name == "oracle") return FilterKind::oracle;
  throw std::invalid_argument("unknown filter '" + std::string(name) + "'");
}

std::string_view to_string(SweepVariable v) {
  return v == SweepVariable::sbr ? "sbr" : "signal_ppp";
}

double rmse(const Grid<double>& truth, const Grid<double>& estimate) {
  if (truth.height() != estimate.height() || truth.width() != estimate.width())
    throw std::invalid_argument("rmse: image dimensions differ");
  if (truth.size() == 0) throw std::invalid_argument("rmse: empty image");
  double sum = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const double e = truth.data()[k] - estimate.data()[k];
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(truth.size()));
}

double rmse(const DepthImage& truth, const DepthImage& estimate) {
  return rmse(truth.depth, estimate.depth);
}

CensoredCube run_filter(const TimestampCube& cube, FilterKind filter,
                        const PipelineOptions& options) {
  switch (filter) {
    case FilterKind::rom: return rom_filter_scene(cube, options.threads);
    case FilterKind::mode: return mode_filter_scene(cube, options.threads);
    case FilterKind::consensus: {
      ConsensusOptions co;
      co.p_outlier = options.p_outlier;
      co.side_override = options.neighborhood_side;
      co.signal_ppp = options.signal_ppp;
      co.threads = options.threads;
      return consensus_filter_scene(cube, co).cube;
    }
    case FilterKind::oracle: {
      if (cube.params.background != 0.0)
        throw ConfigError("oracle filter needs a background-free acquisition (B = 0)");
      CensoredCube out;
      out.signal_sets = cube.timestamps;
      out.estimates.assign(cube.timestamps.pixel_count(),
                           std::numeric_limits<double>::quiet_NaN());
      return out;
    }
  }
  throw std::invalid_argument("unknown filter");
}

PipelineResult run_pipeline(const TimestampCube& cube, FilterKind filter,
                            const PipelineOptions& options) {
  PipelineResult result;
  result.censored = run_filter(cube, filter, options);
  if (result.censored.nonempty_pixels() == 0) {
    result.blank = true;
    result.depth = DepthImage{Grid<double>(cube.height(), cube.width(), 0.0),
                              Grid<std::uint8_t>(cube.height(), cube.width(), 0)};
    return result;
  }
  PmlConfig pml = options.pml;
  pml.threads = options.threads;
  auto solved = pml_depth(result.censored, cube.params, pml);
  result.depth = std::move(solved.image);
  result.pml_converged = solved.converged;
  return result;
}

void SweepSpec::validate() const {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  if (trials < 1) throw std::invalid_argument("sweep needs trials >= 1");
  if (filters.empty()) throw std::invalid_argument("sweep needs at least one filter");
}

const SweepRow& SweepTable::find(FilterKind filter, double value) const {
  for (const auto& row : rows)
    if (row.filter == filter && row.value == value) return row;
  throw std::out_of_range("no sweep row for " + std::string(to_string(filter)));
}

RngSeed trial_seed(RngSeed seed, std::size_t point, int trial) {
  return RngSeed{pixel_stream_seed(seed, point, static_cast<std::size_t>(trial))};
}

SweepTable run_sweep(const SweepSpec& spec, const AcquisitionParams& base, RngSeed seed) {
  spec.validate();
  SweepTable table;
  for (std::size_t point = 0; point < spec.values.size(); ++point) {
    const double value = spec.values[point];
    const double sbr = spec.variable == SweepVariable::sbr ? value : spec.fixed_value;
    const double ppp = spec.variable == SweepVariable::sbr ? spec.fixed_value : value;

    std::vector<SweepRow> rows(spec.filters.size());
    for (std::size_t f = 0; f < spec.filters.size(); ++f) {
      rows[f].filter = spec.filters[f];
      rows[f].variable = spec.variable;
      rows[f].value = value;
    }

    for (int trial = 0; trial < spec.trials; ++trial) {
      const RngSeed s = trial_seed(seed, point, trial);
      std::optional<TimestampCube> noisy, clean;
      for (std::size_t f = 0; f < spec.filters.size(); ++f) {
        const FilterKind filter = spec.filters[f];
        try {
          const bool oracle = filter == FilterKind::oracle;
          auto& cube = oracle ? clean : noisy;
          if (!cube) {
            const auto params =
                configure_for_targets(spec.scene, base, oracle ? kInfiniteSbr : sbr, ppp);
            cube = simulate_scene(spec.scene, params, s, spec.pipeline.threads);
          }
          const auto result = run_pipeline(*cube, filter, spec.pipeline);
          rows[f].trial_rmse.push_back(rmse(spec.scene.depth(), result.depth.depth));
        } catch (const std::exception& e) {
          table.failures.push_back({filter, value, trial, e.what()});
        }
      }
    }

    for (auto& row : rows) {
      row.trial_count = static_cast<int>(row.trial_rmse.size());
      if (row.trial_count == 0) {
        row.mean_rmse = row.std_rmse = std::numeric_limits<double>::quiet_NaN();
      } else {
        double sum = 0.0;
        for (double x : row.trial_rmse) sum += x;
        row.mean_rmse = sum / row.trial_count;
        double sq = 0.0;
        for (double x : row.trial_rmse) sq += (x - row.mean_rmse) * (x - row.mean_rmse);
        row.std_rmse = row.trial_count > 1 ? std::sqrt(sq / (row.trial_count - 1)) : 0.0;
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  out << "filter,sweep_variable,value,trial_count,mean_rmse_m,std_rmse_m\n";
  out << std::setprecision(10);
  for (const auto& row : table.rows)
    out << to_string(row.filter) << ',' << to_string(row.variable) << ',' << row.value << ','
        << row.trial_count << ',' << row.mean_rmse << ',' << row.std_rmse << '\n';
}

}  // namespace splidar
