#include "beaconplan/montecarlo.hpp"

#include "beaconplan/errors.hpp"
#include "beaconplan/grid_io.hpp"
#include "beaconplan/parallel.hpp"

#include <numbers>
#include <ostream>
#include <stdexcept>

namespace beaconplan
{

Rng trial_rng(std::uint64_t seed, std::uint64_t index)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

void SimConfig::validate() const
{
  if (trials < 1)
    throw ValidationError("trials", "must be >= 1");
  if (!(step_sigma >= 0.0) || !std::isfinite(step_sigma))
    throw ValidationError("step_sigma_m", "must be a nonnegative finite number");
  if (!(drift_bound >= 0.0) || !std::isfinite(drift_bound))
    throw ValidationError("drift_bound_rad_per_s", "must be a nonnegative finite number");
  trajectory.validate();
}

std::vector<double> sample_rss(const ChannelModel &ch, Point2 user, const BeaconLayout &layout, Rng &rng)
{
  const auto audible = audible_beacons(ch, user, layout);
  if (audible.empty())
    throw NoInformation("no audible beacon to sample");
  std::normal_distribution<double> noise(0.0, ch.sigma);
  std::vector<double> out;
  out.reserve(audible.size());
  for (std::size_t k : audible)
    out.push_back(predict_rss(ch, distance(user, layout.beacons[k].position)) + noise(rng));
  return out;
}

Fim2 empirical_fim(const ChannelModel &ch, Point2 user, const BeaconLayout &layout, int n_samples, Rng &rng)
{
  if (n_samples < 1000)
    throw std::invalid_argument("empirical_fim needs at least 1000 samples");
  Fim2 acc;
  for (int s = 0; s < n_samples; ++s)
  {
    const auto obs = sample_rss(ch, user, layout, rng);
    const Point2 g = log_likelihood_score(ch, user, layout, obs);
    acc.jxx += g.x * g.x;
    acc.jxy += g.x * g.y;
    acc.jyy += g.y * g.y;
  }
  const double n = static_cast<double>(n_samples);
  acc.jxx /= n;
  acc.jxy /= n;
  acc.jyy /= n;
  acc.jyx = acc.jxy;
  return acc;
}

WalkTrial simulate_trial(const Trajectory &traj, const PdrParams &pdr, const SimConfig &sim, Rng &rng)
{
  std::uniform_real_distribution<double> drift(-sim.drift_bound, sim.drift_bound);
  std::normal_distribution<double> length_noise(0.0, 1.0);

  WalkTrial trial;
  trial.drift_rate = sim.drift_bound > 0.0 ? drift(rng) : 0.0;
  trial.truth.reserve(traj.step_count);
  trial.estimate.reserve(traj.step_count);

  Point2 truth = traj.start;
  for (int k = 1; k <= traj.step_count; ++k)
  {
    const double heading = traj.heading + trial.drift_rate * static_cast<double>(k - 1) * pdr.step_period;
    const double length = pdr.step_length + sim.step_sigma * length_noise(rng);
    truth = truth + length * Point2{std::cos(heading), std::sin(heading)};
    trial.truth.push_back(truth);
    trial.estimate.push_back(trajectory_point(traj, k, pdr.step_length));
  }
  return trial;
}

std::vector<WalkTrial> simulate_walk(const Trajectory &traj, const PdrParams &pdr, const SimConfig &sim)
{
  sim.validate();
  std::vector<WalkTrial> out(sim.trials);
  detail::parallel_for(out.size(), [&](std::size_t i) {
    Rng rng = trial_rng(sim.seed, i);
    out[i] = simulate_trial(traj, pdr, sim, rng);
  }, 64);
  return out;
}

namespace
{

// Trials are reduced in fixed-size chunks, then chunks in order, so sums do
// not depend on the worker count.
constexpr std::size_t kChunk = 64;

struct StepSums
{
  double sq[3] = {0.0, 0.0, 0.0};   // rss, pdr, fused squared error
  double quad[3] = {0.0, 0.0, 0.0}; // squares of the above, for standard errors
};

double squared_error(Point2 a, Point2 b)
{
  const Point2 d = a - b;
  return d.x * d.x + d.y * d.y;
}

double root_or_unbounded(double v) { return is_unbounded(v) ? kUnbounded : std::sqrt(v); }

} // namespace

ValidationReport validate_fusion(const ChannelModel &ch, const BeaconLayout &layout, const PdrParams &pdr,
                                 const SimConfig &sim)
{
  sim.validate();
  const Trajectory &traj = sim.trajectory;
  const int steps = traj.step_count;
  const PdrTable table(pdr, steps);

  std::vector<Point2> nominal;
  std::vector<AxisVariances> pdr_vars;
  std::vector<AxisVariances> rss_nominal;
  for (int k = 1; k <= steps; ++k)
  {
    nominal.push_back(trajectory_point(traj, k, pdr.step_length));
    pdr_vars.push_back(pdr_axis_variances(table.at(k), traj.heading, false));
    rss_nominal.push_back(rss_variances(ch, nominal.back(), layout));
  }

  const std::size_t trials = static_cast<std::size_t>(sim.trials);
  const std::size_t chunks = (trials + kChunk - 1) / kChunk;
  std::vector<std::vector<StepSums>> partial(chunks, std::vector<StepSums>(steps));

  detail::parallel_for(chunks, [&](std::size_t c) {
    auto &sums = partial[c];
    const std::size_t end = std::min(trials, (c + 1) * kChunk);
    for (std::size_t t = c * kChunk; t < end; ++t)
    {
      Rng rng = trial_rng(sim.seed, t);
      std::normal_distribution<double> unit(0.0, 1.0);
      WalkTrial walk;
      if (sim.mode == FusionSimMode::walk)
        walk = simulate_trial(traj, pdr, sim, rng);

      for (int k = 0; k < steps; ++k)
      {
        Point2 truth;
        Point2 pdr_fix;
        AxisVariances rss_var;
        if (sim.mode == FusionSimMode::walk)
        {
          truth = walk.truth[k];
          pdr_fix = walk.estimate[k];
          rss_var = rss_variances(ch, truth, layout);
        }
        else
        {
          truth = nominal[k];
          pdr_fix = truth + Point2{std::sqrt(pdr_vars[k].var_x) * unit(rng), std::sqrt(pdr_vars[k].var_y) * unit(rng)};
          rss_var = rss_nominal[k];
        }

        const bool rss_bounded = !is_unbounded(rss_var.var_x) && !is_unbounded(rss_var.var_y);
        const double ex = unit(rng);
        const double ey = unit(rng);
        PositionEstimate rss_est{truth, rss_var.var_x, rss_var.var_y, Source::rss};
        if (rss_bounded)
          rss_est.position = truth + Point2{std::sqrt(rss_var.var_x) * ex, std::sqrt(rss_var.var_y) * ey};
        const PositionEstimate pdr_est{pdr_fix, pdr_vars[k].var_x, pdr_vars[k].var_y, Source::pdr};
        const PositionEstimate fused = fuse_positions(rss_est, pdr_est);

        const double errs[3] = {rss_bounded ? squared_error(rss_est.position, truth) : kUnbounded,
                                squared_error(pdr_fix, truth), squared_error(fused.position, truth)};
        for (int s = 0; s < 3; ++s)
        {
          sums[k].sq[s] += errs[s];
          sums[k].quad[s] += errs[s] * errs[s];
        }
      }
    }
  }, 2);

  ValidationReport report;
  report.config = sim;
  const double n = static_cast<double>(trials);
  for (int k = 0; k < steps; ++k)
  {
    StepSums total;
    for (const auto &chunk : partial)
    {
      for (int s = 0; s < 3; ++s)
      {
        total.sq[s] += chunk[k].sq[s];
        total.quad[s] += chunk[k].quad[s];
      }
    }
    double mse[3];
    double se[3];
    for (int s = 0; s < 3; ++s)
    {
      mse[s] = total.sq[s] / n;
      const double var = is_unbounded(mse[s]) ? kUnbounded : std::max(0.0, total.quad[s] / n - mse[s] * mse[s]);
      se[s] = is_unbounded(var) ? kUnbounded : std::sqrt(var / n);
    }

    const AxisVariances &rv = rss_nominal[k];
    ValidationRow row;
    row.step = k + 1;
    row.model_rss = (is_unbounded(rv.var_x) || is_unbounded(rv.var_y)) ? kUnbounded : std::sqrt(rv.var_x + rv.var_y);
    row.model_pdr = table.at(k + 1).rmse;
    row.model_fused = fused_rmse(rv, pdr_vars[k]);
    row.emp_rss = root_or_unbounded(mse[0]);
    row.emp_pdr = root_or_unbounded(mse[1]);
    row.emp_fused = root_or_unbounded(mse[2]);
    row.se_mse_rss = se[0];
    row.se_mse_pdr = se[1];
    row.se_mse_fused = se[2];
    report.rows.push_back(row);
  }
  return report;
}

void write_report_csv(std::ostream &out, const ValidationReport &report)
{
  const SimConfig &c = report.config;
  out << "# format_version=1\n"
      << "# mode=" << (c.mode == FusionSimMode::walk ? "walk" : "pure_gaussian") << '\n'
      << "# seed=" << c.seed << '\n'
      << "# trials=" << c.trials << '\n'
      << "# start=" << format_number(c.trajectory.start.x) << ',' << format_number(c.trajectory.start.y) << '\n'
      << "# heading_rad=" << format_number(c.trajectory.heading) << '\n'
      << "# steps=" << c.trajectory.step_count << '\n'
      << "# step_sigma_m=" << format_number(c.step_sigma) << '\n'
      << "# drift_bound_rad_per_s=" << format_number(c.drift_bound) << '\n'
      << "# rss_fixes=drawn at the CRLB covariance (efficient estimator assumed)\n"
      << "step,model_rss,model_pdr,model_fused,emp_rss,emp_pdr,emp_fused\n";
  for (const auto &r : report.rows)
  {
    out << r.step << ',' << format_number(r.model_rss) << ',' << format_number(r.model_pdr) << ','
        << format_number(r.model_fused) << ',' << format_number(r.emp_rss) << ',' << format_number(r.emp_pdr) << ','
        << format_number(r.emp_fused) << '\n';
  }
}

FusedVarianceSample fused_variance_mc(const AxisVariances &first, const AxisVariances &second, int trials,
                                      std::uint64_t seed)
{
  if (trials < 2)
    throw std::invalid_argument("fused_variance_mc needs at least 2 trials");
  Rng rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const Point2 truth{0.0, 0.0};

  double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
  for (int t = 0; t < trials; ++t)
  {
    const PositionEstimate a{{std::sqrt(first.var_x) * unit(rng), std::sqrt(first.var_y) * unit(rng)},
                             first.var_x, first.var_y, Source::rss};
    const PositionEstimate b{{std::sqrt(second.var_x) * unit(rng), std::sqrt(second.var_y) * unit(rng)},
                             second.var_x, second.var_y, Source::pdr};
    const Point2 e = fuse_positions(a, b).position - truth;
    sx += e.x;
    sy += e.y;
    sxx += e.x * e.x;
    syy += e.y * e.y;
  }
  const double n = static_cast<double>(trials);
  FusedVarianceSample out;
  out.empirical_var_x = (sxx - sx * sx / n) / (n - 1.0);
  out.empirical_var_y = (syy - sy * sy / n) / (n - 1.0);
  out.model_var_x = fused_axis_variance(first.var_x, second.var_x);
  out.model_var_y = fused_axis_variance(first.var_y, second.var_y);
  return out;
}

} // namespace beaconplan
