#pragma once

#include "beaconplan/fusion.hpp"
#include "beaconplan/geometry.hpp"
#include "beaconplan/pdr_model.hpp"
#include "beaconplan/rss_model.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace beaconplan
{

using Rng = std::mt19937_64;

// Independent generator for trial `index` of a run seeded with `seed`, so
// serial and parallel execution draw identical streams.
Rng trial_rng(std::uint64_t seed, std::uint64_t index);

enum class FusionSimMode
{
  walk,          // PDR fixes from simulated drifting walks
  pure_gaussian, // both sources drawn Gaussian at their model variances
};

struct SimConfig
{
  int trials = 1000;
  std::uint64_t seed = 1;
  Trajectory trajectory;
  double step_sigma = 0.0446;  // m, per-step step-length noise
  double drift_bound = 0.0283; // rad/s; each trial draws its rate from U[-bound, bound]
  FusionSimMode mode = FusionSimMode::walk;

  void validate() const;
};

// One noisy reading per audible beacon, layout order. Throws NoInformation
// if none is audible.
std::vector<double> sample_rss(const ChannelModel &ch, Point2 user, const BeaconLayout &layout, Rng &rng);

// Monte-Carlo mean of the outer product of the log-likelihood score.
Fim2 empirical_fim(const ChannelModel &ch, Point2 user, const BeaconLayout &layout, int n_samples, Rng &rng);

struct WalkTrial
{
  double drift_rate = 0.0;      // rad/s
  std::vector<Point2> truth;    // after steps 1..N
  std::vector<Point2> estimate; // nominal dead-reckoned track
};

WalkTrial simulate_trial(const Trajectory &traj, const PdrParams &pdr, const SimConfig &sim, Rng &rng);

// sim.trials walks, trial i drawn from trial_rng(sim.seed, i).
std::vector<WalkTrial> simulate_walk(const Trajectory &traj, const PdrParams &pdr, const SimConfig &sim);

struct ValidationRow
{
  int step = 0;
  double model_rss = 0.0;
  double model_pdr = 0.0;
  double model_fused = 0.0;
  double emp_rss = 0.0;
  double emp_pdr = 0.0;
  double emp_fused = 0.0;
  // Standard errors of the empirical mean squared errors.
  double se_mse_rss = 0.0;
  double se_mse_pdr = 0.0;
  double se_mse_fused = 0.0;
};

struct ValidationReport
{
  SimConfig config;
  std::vector<ValidationRow> rows;
};

// Empirical RSS, PDR and fused RMSE per step against the analytic models.
// RSS fixes are drawn at the CRLB covariance (efficient estimator assumed).
ValidationReport validate_fusion(const ChannelModel &ch, const BeaconLayout &layout, const PdrParams &pdr,
                                 const SimConfig &sim);

// Metadata header echoing the config, then
// `step,model_rss,model_pdr,model_fused,emp_rss,emp_pdr,emp_fused`.
void write_report_csv(std::ostream &out, const ValidationReport &report);

struct FusedVarianceSample
{
  double empirical_var_x = 0.0;
  double empirical_var_y = 0.0;
  double model_var_x = 0.0;
  double model_var_y = 0.0;
};

// Draws two Gaussian fixes of a fixed point at the given per-axis variances,
// fuses them, and returns the sample variance of the fused fix.
FusedVarianceSample fused_variance_mc(const AxisVariances &first, const AxisVariances &second, int trials,
                                      std::uint64_t seed);

} // namespace beaconplan
