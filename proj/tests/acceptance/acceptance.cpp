// Acceptance run: one PASS/FAIL line per criterion, with the measured values.
// Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "splidar/consensus_filter.hpp"
#include "splidar/depth_estimator.hpp"
#include "splidar/evaluation.hpp"
#include "splidar/rom_filter.hpp"
#include "splidar/simulator.hpp"
#include "splidar/theory.hpp"

using namespace splidar;

namespace {

constexpr std::uint64_t kSeed = 20240601;
constexpr int kTrials = 10;
constexpr std::size_t kBlocksSide = 128;
// Consensus outlier threshold fixed by the one-off blocks-scene calibration at
// SBR 0.5 (tools/calibrate.cpp); the generic p = 1 is reported alongside.
constexpr double kBlocksOutlierP = 1.5;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s -- %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void note(const std::string& line) {
  std::printf("    %s\n", line.c_str());
  std::fflush(stdout);
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

SweepTable blocks_sweep(SweepVariable variable, std::vector<double> values, double fixed,
                        std::vector<FilterKind> filters, double p_outlier) {
  SweepSpec spec;
  spec.scene = blocks_scene(kBlocksSide);
  spec.variable = variable;
  spec.values = std::move(values);
  spec.fixed_value = fixed;
  spec.trials = kTrials;
  spec.filters = std::move(filters);
  spec.pipeline.p_outlier = p_outlier;
  const auto table = run_sweep(spec, AcquisitionParams{}, RngSeed{kSeed});
  for (const auto& f : table.failures)
    note("trial failure: " + std::string(to_string(f.filter)) + " " + f.message);
  return table;
}

std::string row_text(const SweepRow& row) {
  return std::string(to_string(row.filter)) + " " + fmt(row.mean_rmse) + " m (sd " +
         fmt(row.std_rmse, 3) + ", n=" + std::to_string(row.trial_count) + ")";
}

// RMSE over pixels whose 3x3 surround lies on one surface, and over the rest.
// Reported to show where the error of a neighbourhood filter concentrates.
void note_edge_split(double sbr, double ppp, FilterKind filter, double p_outlier) {
  const Scene scene = blocks_scene(kBlocksSide);
  const auto params = configure_for_targets(scene, AcquisitionParams{}, sbr, ppp);
  const auto cube = simulate_scene(scene, params, RngSeed{kSeed});
  PipelineOptions options;
  options.p_outlier = p_outlier;
  const auto result = run_pipeline(cube, filter, options);
  const auto& truth = scene.depth();
  double sq[2] = {0, 0};
  std::size_t n[2] = {0, 0};
  for (std::size_t r = 0; r < kBlocksSide; ++r)
    for (std::size_t c = 0; c < kBlocksSide; ++c) {
      bool edge = false;
      for (std::size_t rr = r == 0 ? 0 : r - 1; rr <= std::min(kBlocksSide - 1, r + 1); ++rr)
        for (std::size_t cc = c == 0 ? 0 : c - 1; cc <= std::min(kBlocksSide - 1, c + 1); ++cc)
          edge = edge || truth(rr, cc) != truth(r, c);
      const double e = result.depth.depth(r, c) - truth(r, c);
      sq[edge] += e * e;
      ++n[edge];
    }
  note(std::string(to_string(filter)) + " single trial: interior RMSE " +
       fmt(std::sqrt(sq[0] / static_cast<double>(n[0]))) + " m over " + std::to_string(n[0]) +
       " px, edge RMSE " + fmt(std::sqrt(sq[1] / static_cast<double>(n[1]))) + " m over " +
       std::to_string(n[1]) + " px");
}

// 1 ------------------------------------------------------------------------
void phase_transition() {
  const Scene scene = toy_scene(200);
  const auto params = configure_for_targets(scene, AcquisitionParams{}, 1.0, 2.0);
  const auto cube = simulate_scene(scene, params, RngSeed{kSeed}, 1);
  const auto rep = phase_transition_report(scene, cube, kDefaultPredictorBinWidth, 1);

  bool failing_ok = true, success_ok = true;
  int failing_bins = 0, success_bins = 0;
  double worst_rel = 0, worst_success = 0;
  for (const auto& bin : rep.bins) {
    if (bin.center >= -0.8 && bin.center <= -0.2) {
      ++failing_bins;
      const double rel = std::abs(bin.empirical_error - bin.theoretical_error) / bin.theoretical_error;
      worst_rel = std::max(worst_rel, rel);
      if (!(rel < 0.15)) failing_ok = false;
      note("pi " + fmt(bin.center, 3) + ": empirical " + fmt(bin.empirical_error * 1e9) +
           " ns, law " + fmt(bin.theoretical_error * 1e9) + " ns, rel dev " + fmt(rel, 3) +
           ", pixels " + std::to_string(bin.pixels));
    } else if (bin.center >= 0.1) {
      ++success_bins;
      worst_success = std::max(worst_success, bin.empirical_error);
      if (!(bin.empirical_error < 2 * params.pulse_width)) success_ok = false;
      note("pi " + fmt(bin.center, 3) + ": empirical " + fmt(bin.empirical_error * 1e9) +
           " ns (bound " + fmt(2e9 * params.pulse_width) + " ns), pixels " +
           std::to_string(bin.pixels));
    }
  }
  report(1, "phase transition on toy_scene(200), SBR 1, PPP 2",
         failing_ok && success_ok && failing_bins > 0 && success_bins > 0,
         std::to_string(failing_bins) + " bins in [-0.8,-0.2], worst rel dev " + fmt(worst_rel, 3) +
             " (< 0.15: " + (failing_ok ? "yes" : "no") + "); " + std::to_string(success_bins) +
             " bins with pi >= 0.1, worst mean error " + fmt(worst_success * 1e9) +
             " ns (< 2 T_p = 0.54 ns: " + (success_ok ? "yes" : "no") + ")");
}

// 2 ------------------------------------------------------------------------
void filter_ordering() {
  const auto table = blocks_sweep(SweepVariable::sbr, {0.2}, 2.0,
                                  {FilterKind::rom, FilterKind::mode, FilterKind::consensus},
                                  kBlocksOutlierP);
  const auto& rom = table.find(FilterKind::rom, 0.2);
  const auto& mode = table.find(FilterKind::mode, 0.2);
  const auto& con = table.find(FilterKind::consensus, 0.2);
  const auto generic = blocks_sweep(SweepVariable::sbr, {0.2}, 2.0, {FilterKind::consensus}, 1.0);
  note("consensus at p = 1: " + row_text(generic.rows.front()));
  note_edge_split(0.2, 2.0, FilterKind::consensus, kBlocksOutlierP);
  note_edge_split(0.2, 2.0, FilterKind::mode, kBlocksOutlierP);
  report(2, "filter ordering, blocks 128x128, SBR 0.2, PPP 2",
         con.mean_rmse < mode.mean_rmse && mode.mean_rmse < rom.mean_rmse,
         row_text(con) + " < " + row_text(mode) + " < " + row_text(rom) + "?");
}

// 3 ------------------------------------------------------------------------
void efficiency_ratio() {
  const auto table = blocks_sweep(SweepVariable::sbr, {0.1}, 2.0,
                                  {FilterKind::rom, FilterKind::consensus}, kBlocksOutlierP);
  const auto& rom = table.find(FilterKind::rom, 0.1);
  const auto& con = table.find(FilterKind::consensus, 0.1);
  const double ratio = rom.mean_rmse / con.mean_rmse;
  const auto generic = blocks_sweep(SweepVariable::sbr, {0.1}, 2.0, {FilterKind::consensus}, 1.0);
  note("consensus at p = 1: " + row_text(generic.rows.front()) + ", ratio " +
       fmt(rom.mean_rmse / generic.rows.front().mean_rmse));
  report(3, "ROM/consensus RMSE ratio, SBR 0.1, PPP 2", ratio >= 100.0,
         "ratio " + fmt(ratio) + " (threshold 100); " + row_text(rom) + ", " + row_text(con));
}

// 4 ------------------------------------------------------------------------
void noise_tolerance() {
  const double sbr = 1.0 / 17.0;
  const auto table = blocks_sweep(SweepVariable::sbr, {sbr}, 3.0, {FilterKind::consensus},
                                  kBlocksOutlierP);
  const Scene scene = blocks_scene(kBlocksSide);
  const auto& depth = scene.depth().data();
  const auto [lo, hi] = std::minmax_element(depth.begin(), depth.end());
  const double limit = 0.1 * (*hi - *lo);
  const auto& con = table.find(FilterKind::consensus, sbr);
  const auto generic = blocks_sweep(SweepVariable::sbr, {sbr}, 3.0, {FilterKind::consensus}, 1.0);
  note("consensus at p = 1: " + row_text(generic.rows.front()));
  report(4, "noise tolerance, SBR 1/17, PPP 3", con.mean_rmse < limit,
         row_text(con) + " vs 10% of depth range = " + fmt(limit) + " m");
}

// 5 ------------------------------------------------------------------------
void oracle_consistency() {
  const double inf = kInfiniteSbr;
  const auto clean = blocks_sweep(SweepVariable::signal_ppp, {4.0, 8.0}, inf,
                                  {FilterKind::consensus, FilterKind::oracle}, kBlocksOutlierP);
  bool bound_ok = true;
  std::string detail;
  for (double ppp : {4.0, 8.0}) {
    const auto& con = clean.find(FilterKind::consensus, ppp);
    const auto& ora = clean.find(FilterKind::oracle, ppp);
    const double ratio = con.mean_rmse / ora.mean_rmse;
    if (!(ratio <= 2.0)) bound_ok = false;
    detail += "PPP " + fmt(ppp) + ": consensus/oracle = " + fmt(ratio) + " (" +
              fmt(con.mean_rmse) + " / " + fmt(ora.mean_rmse) + " m); ";
  }
  const auto low = blocks_sweep(SweepVariable::signal_ppp, {0.5}, 1.0,
                                {FilterKind::consensus, FilterKind::oracle}, kBlocksOutlierP);
  const auto& con = low.find(FilterKind::consensus, 0.5);
  const auto& ora = low.find(FilterKind::oracle, 0.5);
  note("reported: PPP 0.5, SBR 1: consensus " + fmt(con.mean_rmse) + " m vs oracle " +
       fmt(ora.mean_rmse) + " m (consensus " +
       (con.mean_rmse < ora.mean_rmse ? "beats" : "does not beat") + " the oracle)");
  note_edge_split(kInfiniteSbr, 4.0, FilterKind::consensus, kBlocksOutlierP);
  note_edge_split(kInfiniteSbr, 4.0, FilterKind::oracle, kBlocksOutlierP);
  report(5, "oracle consistency, B = 0, consensus <= 2x oracle at PPP >= 4", bound_ok, detail);
}

// 6 ------------------------------------------------------------------------
void simulator_statistics() {
  AcquisitionParams p;
  p.pulses = 800;
  p.background = 0.003;
  const double alpha = 0.6, z = 9.0;
  const double expected = (p.efficiency * alpha * p.signal_flux + p.background) * 800;
  double total = 0;
  const int trials = 10000;
  for (int s = 0; s < trials; ++s)
    total += static_cast<double>(simulate_pixel(alpha, z, p, RngSeed{kSeed + s}).size());
  const double count_dev = std::abs(total / trials - expected) / expected;

  AcquisitionParams bg;
  bg.pulses = 1000;
  bg.background = 0.005;
  std::vector<double> pooled;
  for (int s = 0; s < 2000; ++s) {
    const auto ts = simulate_pixel(0.0, z, bg, RngSeed{kSeed + 7 * s});
    pooled.insert(pooled.end(), ts.begin(), ts.end());
  }
  std::sort(pooled.begin(), pooled.end());
  const double n = static_cast<double>(pooled.size());
  double ks = 0;
  for (std::size_t k = 0; k < pooled.size(); ++k) {
    const double cdf = pooled[k] / bg.repetition_period;
    ks = std::max({ks, static_cast<double>(k + 1) / n - cdf, cdf - static_cast<double>(k) / n});
  }
  const double ks_critical = 1.628 / std::sqrt(n);

  AcquisitionParams sig;
  sig.pulses = 500000;
  sig.background = 0.0;
  const auto ts = simulate_pixel(1.0, z, sig, RngSeed{kSeed});
  double mean = 0;
  for (double t : ts) mean += t;
  mean /= static_cast<double>(ts.size());
  double var = 0;
  for (double t : ts) var += (t - mean) * (t - mean);
  const double sd = std::sqrt(var / static_cast<double>(ts.size() - 1));
  const double sd_dev = std::abs(sd - sig.pulse_width / 2) / (sig.pulse_width / 2);

  report(6, "simulator statistics", count_dev < 0.02 && ks < ks_critical && sd_dev < 0.05,
         "count mean dev " + fmt(count_dev, 3) + " (< 0.02); KS D " + fmt(ks, 3) + " vs 1% critical " +
             fmt(ks_critical, 3) + " (n=" + std::to_string(pooled.size()) + "); signal sd dev " +
             fmt(sd_dev, 3) + " (< 0.05, n=" + std::to_string(ts.size()) + ")");
}

// 7 ------------------------------------------------------------------------
void count_splitting() {
  // The pulse is treated as zero beyond 6 sigma = 3 T_p, so detections "left of
  // the pulse" are those in [0, t* - 3 T_p] and "up to the pulse" those in
  // [0, t* + 3 T_p]. Deep returns keep the 2.5 T_p boundary offset small.
  AcquisitionParams p;
  p.pulses = 20'000'000;
  p.background = 0.004;
  bool ok = true;
  std::string detail;
  int index = 0;
  for (const auto& [alpha, z] : {std::pair{0.5, 7.5}, std::pair{0.9, 9.0}, std::pair{0.2, 12.0}}) {
    const double t_star = time_of_flight(z);
    const double cut = kPulseCutoffSigmas * p.pulse_sigma();
    const auto ts = simulate_pixel(alpha, z, p, RngSeed{kSeed + static_cast<std::uint64_t>(index++)});
    double left = 0, upto = 0, left_core = 0, upto_core = 0;
    for (double t : ts) {
      if (t <= t_star - cut) ++left;
      if (t <= t_star + cut) ++upto;
      if (t <= t_star - p.pulse_width / 2) ++left_core;
      if (t <= t_star + p.pulse_width / 2) ++upto_core;
    }
    const auto split = count_split(alpha, z, p);
    const double n = static_cast<double>(p.pulses);
    const double dev_minus = std::abs(left - split.below * n) / (split.below * n);
    const double dev_plus = std::abs(upto - split.upto * n) / (split.upto * n);
    if (!(dev_minus < 0.02 && dev_plus < 0.02)) ok = false;
    detail += "z=" + fmt(z) + ": k- dev " + fmt(dev_minus, 3) + ", k+ dev " + fmt(dev_plus, 3) + "; ";
    note("z " + fmt(z) + " m: counts at the T_p/2 core edges deviate by " +
         fmt(std::abs(left_core - split.below * n) / (split.below * n), 3) + " (k-) and " +
         fmt(std::abs(upto_core - split.upto * n) / (split.upto * n), 3) +
         " (k+), from pulse mass outside +-T_p/2");
  }
  report(7, "count splitting vs k- and k+ within 2%", ok, detail);
}

// 8 ------------------------------------------------------------------------
void cluster_and_window_oracles() {
  AcquisitionParams p;
  p.repetition_period = std::ldexp(1.0, -23);
  p.pulse_width = std::ldexp(1.0, -31);
  p.pulses = 1000;
  p.background = 0.001;
  std::size_t lists = 0, mismatches = 0;
  for (const auto& [unit_fraction, grid, max_len] :
       {std::tuple{0.5, 8, 10}, std::tuple{1.0, 6, 10}, std::tuple{0.25, 12, 8}}) {
    const double unit = p.pulse_width * unit_fraction;
    const long long threshold = std::llround(4.0 / unit_fraction);
    oracles::for_each_sorted_list(grid, max_len, [&](const std::vector<long long>& sorted) {
      ++lists;
      const auto expected = oracles::window_search(sorted, threshold);
      std::vector<double> pool;
      for (long long k : sorted) pool.push_back(static_cast<double>(k) * unit);
      std::reverse(pool.begin(), pool.end());
      const auto got = select_cluster(pool, p);
      bool same = got.anchor.has_value() == expected.present;
      if (same && expected.present) same = *got.anchor == static_cast<double>(expected.anchor) * unit;
      if (same && sorted.size() >= 4)
        same = got.min_smoothed_gap == static_cast<double>(expected.numerator) * unit / 4.0;
      if (!same) ++mismatches;
    });
  }

  std::size_t window_checks = 0, window_mismatches = 0;
  for (const double background : {0.0005, 0.001995, 0.01}) {
    AcquisitionParams q;
    q.background = background;
    for (const double alpha : {0.0, 0.1, 0.25, 0.5, 0.75, 1.0}) {
      if (alpha == 0.0 && background == 0.0) continue;
      const double expected =
          4.0 * q.pulse_width * q.background / (q.efficiency * alpha * q.signal_flux + q.background);
      ++window_checks;
      if (std::bit_cast<std::uint64_t>(censor_window(alpha, q)) != std::bit_cast<std::uint64_t>(expected))
        ++window_mismatches;
    }
  }
  report(8, "cluster selection vs exhaustive window search; censor window bit-exact",
         mismatches == 0 && window_mismatches == 0,
         std::to_string(lists) + " grid lists, " + std::to_string(mismatches) + " mismatches; " +
             std::to_string(window_checks) + " window inputs, " +
             std::to_string(window_mismatches) + " mismatches");
}

// 9 ------------------------------------------------------------------------
void pml_solver() {
  AcquisitionParams p;
  p.pulses = 1000;
  p.background = 0.001;
  const double sigma = p.pulse_sigma();
  const double kappa = (2 / kSpeedOfLight) * (2 / kSpeedOfLight) / (2 * sigma * sigma);
  std::mt19937_64 rng(kSeed);
  double worst_gap = 0;
  bool monotone = true;
  int instances = 0;
  for (double beta : {0.3, 5.0, 200.0}) {
    for (int instance = 0; instance < 4; ++instance) {
      std::vector<std::vector<double>> lists(64);
      std::poisson_distribution<int> count(1.5);
      for (std::size_t k = 0; k < 64; ++k) {
        const double z = (k % 8 < 4 ? 3.0 : 5.0) + 0.01 * static_cast<double>(k / 8);
        std::normal_distribution<double> jitter(time_of_flight(z), sigma * (1 + instance));
        const int n = count(rng);
        for (int i = 0; i < n; ++i) lists[k].push_back(jitter(rng));
      }
      CensoredCube censored;
      censored.signal_sets = PixelLists::from_lists(8, 8, lists);
      censored.estimates.assign(64, std::numeric_limits<double>::quiet_NaN());
      if (censored.nonempty_pixels() == 0) continue;
      PmlConfig config;
      config.beta = beta;
      config.tolerance = 1e-12;
      config.max_iterations = 5000;
      const auto result = pml_depth(censored, p, config);
      for (std::size_t i = 1; i < result.objective_history.size(); ++i)
        if (result.objective_history[i] > result.objective_history[i - 1]) monotone = false;

      oracles::PmlReference ref{8, 8, {}, kappa, beta, config.huber_fraction * p.max_depth()};
      for (const auto& l : lists) {
        ref.photons.emplace_back();
        for (double t : l) ref.photons.back().push_back(depth_of_flight(t));
      }
      const auto best = ref.coordinate_descent(std::vector<double>(64, 4.0), 0.0, p.max_depth());
      const double oracle = ref.objective(best);
      worst_gap = std::max(worst_gap, std::abs(ref.objective(result.image.depth.data()) - oracle) / oracle);
      ++instances;
    }
  }

  // Vanishing penalty on fully observed data returns per-pixel CML.
  Grid<double> alpha(16, 16), depth(16, 16);
  for (std::size_t r = 0; r < 16; ++r)
    for (std::size_t c = 0; c < 16; ++c) {
      alpha(r, c) = 0.6 + 0.02 * static_cast<double>(c);
      depth(r, c) = 2.0 + 0.7 * static_cast<double>(r);
    }
  const Scene scene(alpha, depth);
  const auto params = configure_for_targets(scene, AcquisitionParams{}, kInfiniteSbr, 15.0);
  const auto cube = simulate_scene(scene, params, RngSeed{kSeed});
  CensoredCube all;
  all.signal_sets = cube.timestamps;
  all.estimates.assign(256, std::numeric_limits<double>::quiet_NaN());
  PmlConfig tiny;
  tiny.beta = 1e-9;
  const auto pml = pml_depth(all, params, tiny);
  double worst_cml = 0;
  bool covered = all.nonempty_pixels() == 256;
  for (std::size_t r = 0; r < 16; ++r)
    for (std::size_t c = 0; c < 16; ++c)
      if (auto z = cml_depth(all.pixel(r, c), params))
        worst_cml = std::max(worst_cml, std::abs(pml.image.depth(r, c) - *z));

  report(9, "PML solver vs coordinate-descent oracle on 8x8",
         worst_gap < 0.005 && monotone && covered && worst_cml < 1e-6,
         std::to_string(instances) + " instances, worst objective gap " + fmt(worst_gap, 3) +
             " (< 0.005); monotone " + (monotone ? "yes" : "no") + "; beta -> 0 max |PML - CML| " +
             fmt(worst_cml, 3) + " m");
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::function<void()>> criteria{
      phase_transition, filter_ordering, efficiency_ratio, noise_tolerance, oracle_consistency,
      simulator_statistics, count_splitting, cluster_and_window_oracles, pml_solver};
  for (const auto& run : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    run();
    note("(" + fmt(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 3) +
         " s)");
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of %zu criteria failed (%.1f s)\n", failures, criteria.size(), total);
  return failures == 0 ? 0 : 1;
}
