// One-off calibration runs behind the shipped defaults.
//   calibrate beta [trials]  PML beta on the 200x200 toy scene, SBR 1, signal PPP 2
//   calibrate p [trials]     consensus outlier threshold on the 128x128 blocks scene,
//                            SBR 0.5, signal PPP 2
// Prints mean RMSE per grid value and the value minimising the consensus RMSE.

#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "splidar/evaluation.hpp"

using namespace splidar;

namespace {

template <typename Apply>
double search(SweepSpec spec, const std::vector<double>& grid, Apply apply) {
  double best_value = 0, best = std::numeric_limits<double>::infinity();
  std::cout << std::setprecision(6);
  for (double v : grid) {
    apply(spec, v);
    const SweepTable table = run_sweep(spec, AcquisitionParams{}, RngSeed{2024});
    for (const auto& row : table.rows)
      std::cout << v << ',' << to_string(row.filter) << ',' << row.mean_rmse << '\n';
    const double score = table.find(FilterKind::consensus, spec.values.front()).mean_rmse;
    if (score < best) {
      best = score;
      best_value = v;
    }
  }
  return best_value;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string what = argc > 1 ? argv[1] : "beta";
  const int trials = argc > 2 ? std::stoi(argv[2]) : 3;

  SweepSpec spec;
  spec.variable = SweepVariable::sbr;
  spec.fixed_value = 2.0;
  spec.trials = trials;

  if (what == "beta") {
    spec.scene = toy_scene(200);
    spec.values = {1.0};
    spec.filters = {FilterKind::rom, FilterKind::mode, FilterKind::consensus};
    std::cout << "beta,filter,mean_rmse_m\n";
    const double best = search(spec, {0.1, 0.3, 1.0, 3.0, 10.0},
                               [](SweepSpec& s, double v) { s.pipeline.pml.beta = v; });
    std::cout << "best_beta " << best << '\n';
  } else if (what == "p") {
    spec.scene = blocks_scene(128);
    spec.values = {0.5};
    spec.filters = {FilterKind::consensus};
    std::cout << "p,filter,mean_rmse_m\n";
    const double inf = std::numeric_limits<double>::infinity();
    const double best = search(spec, {0.5, 1.0, 1.5, 2.0, 3.0, inf},
                               [](SweepSpec& s, double v) { s.pipeline.p_outlier = v; });
    std::cout << "best_p " << best << '\n';
  } else {
    std::cerr << "usage: calibrate {beta|p} [trials]\n";
    return 2;
  }
}
