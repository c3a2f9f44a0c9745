#include "beaconplan/fusion.hpp"

#include "beaconplan/errors.hpp"
#include "beaconplan/grid_io.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace beaconplan
{

WeightedEstimate weighted_ls(const WeightedObservations &obs)
{
  if (obs.values.empty() || obs.values.size() != obs.variances.size())
    throw std::invalid_argument("weighted_ls needs equal, nonzero numbers of values and variances");

  double exact_sum = 0.0;
  std::size_t exact_count = 0;
  double weight_sum = 0.0;
  double weighted_values = 0.0;
  for (std::size_t i = 0; i < obs.values.size(); ++i)
  {
    const double var = obs.variances[i];
    if (std::isnan(var) || var < 0.0)
      throw std::invalid_argument("observation variance must be >= 0");
    if (var == 0.0)
    {
      exact_sum += obs.values[i];
      ++exact_count;
      continue;
    }
    if (is_unbounded(var))
      continue;
    const double w = 1.0 / var;
    weight_sum += w;
    weighted_values += w * obs.values[i];
  }

  if (exact_count > 0)
    return {exact_sum / static_cast<double>(exact_count), 0.0};
  if (weight_sum == 0.0)
    throw NoInformation("every observation has unbounded variance");
  return {weighted_values / weight_sum, 1.0 / weight_sum};
}

PositionEstimate fuse_positions(const PositionEstimate &a, const PositionEstimate &b)
{
  const auto x = weighted_ls({{a.position.x, b.position.x}, {a.var_x, b.var_x}});
  const auto y = weighted_ls({{a.position.y, b.position.y}, {a.var_y, b.var_y}});
  // Same value as 1 / sum(w), in the form that cannot round above either input.
  return {{x.estimate, y.estimate}, fused_axis_variance(a.var_x, b.var_x), fused_axis_variance(a.var_y, b.var_y),
          Source::fused};
}

double fused_axis_variance(double var1, double var2)
{
  if (is_unbounded(var1))
    return var2;
  if (is_unbounded(var2))
    return var1;
  if (var1 == 0.0 || var2 == 0.0)
    return 0.0;
  // lo / (1 + lo/hi) == var1*var2/(var1+var2), and never rounds above lo.
  const double lo = std::min(var1, var2);
  const double hi = std::max(var1, var2);
  return lo / (1.0 + lo / hi);
}

double fused_rmse(double var_x_rss, double var_y_rss, double sigma_s, double sigma_g)
{
  return fused_rmse(AxisVariances{var_x_rss, var_y_rss}, AxisVariances{sigma_s * sigma_s, sigma_g * sigma_g});
}

double fused_rmse(const AxisVariances &rss, const AxisVariances &pdr)
{
  const double vx = fused_axis_variance(rss.var_x, pdr.var_x);
  const double vy = fused_axis_variance(rss.var_y, pdr.var_y);
  if (is_unbounded(vx) || is_unbounded(vy))
    return kUnbounded;
  return std::sqrt(vx + vy);
}

AxisVariances pdr_axis_variances(const PdrErrorEstimate &e, double heading, bool rotate_pdr_frame)
{
  const double ss = e.sigma_s * e.sigma_s;
  const double gg = e.sigma_g * e.sigma_g;
  if (!rotate_pdr_frame)
    return {ss, gg};
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  return {ss * c * c + gg * s * s, ss * s * s + gg * c * c};
}

std::vector<CurvePoint> fused_curve(const ChannelModel &ch, const BeaconLayout &layout, const Trajectory &traj,
                                    const PdrParams &pdr, const CurveOptions &opts)
{
  traj.validate();
  if (opts.reset_every < 0)
    throw std::invalid_argument("reset_every must be >= 0");

  std::vector<Point2> points;
  points.reserve(traj.step_count);
  for (int k = 1; k <= traj.step_count; ++k)
  {
    const Point2 p = trajectory_point(traj, k, pdr.step_length);
    if (!layout.floorplan.contains(p))
      throw std::invalid_argument("trajectory leaves the floorplan at step " + std::to_string(k));
    points.push_back(p);
  }

  const int horizon = opts.reset_every > 0 ? std::min(opts.reset_every, traj.step_count) : traj.step_count;
  const PdrTable table(pdr, horizon);

  std::vector<CurvePoint> curve;
  curve.reserve(points.size());
  for (int k = 1; k <= traj.step_count; ++k)
  {
    const int n = opts.reset_every > 0 ? (k - 1) % opts.reset_every + 1 : k;
    const PdrErrorEstimate e = table.at(n);
    const AxisVariances rss = rss_variances(ch, points[k - 1], layout);
    const AxisVariances walk = pdr_axis_variances(e, traj.heading, opts.rotate_pdr_frame);

    CurvePoint row;
    row.step = k;
    row.rss_rmse = (is_unbounded(rss.var_x) || is_unbounded(rss.var_y)) ? kUnbounded : std::sqrt(rss.var_x + rss.var_y);
    row.pdr_rmse = e.rmse;
    row.fused_rmse = fused_rmse(rss, walk);
    curve.push_back(row);
  }
  return curve;
}

void write_curve_csv(std::ostream &out, const std::vector<CurvePoint> &curve)
{
  out << "step,rss_rmse_m,pdr_rmse_m,fused_rmse_m\n";
  for (const auto &row : curve)
  {
    out << row.step << ',' << format_number(row.rss_rmse) << ',' << format_number(row.pdr_rmse) << ','
        << format_number(row.fused_rmse) << '\n';
  }
}

} // namespace beaconplan
