#pragma once

#include "beaconplan/geometry.hpp"
#include "beaconplan/pdr_model.hpp"
#include "beaconplan/rss_model.hpp"

#include <iosfwd>
#include <vector>

namespace beaconplan
{

enum class Source
{
  rss,
  pdr,
  fused,
};

// A 2D fix with independent per-axis variances. An unbounded variance means
// the source carries no information on that axis.
struct PositionEstimate
{
  Point2 position;
  double var_x = kUnbounded;
  double var_y = kUnbounded;
  Source source = Source::rss;
};

struct WeightedObservations
{
  std::vector<double> values;
  std::vector<double> variances;
};

struct WeightedEstimate
{
  double estimate = 0.0;
  double variance = kUnbounded;
};

// Inverse-variance weighted mean of scalar observations of one quantity.
// Unbounded variances get zero weight; zero variances are exact and, if
// present, determine the result alone. Throws NoInformation if every
// variance is unbounded.
WeightedEstimate weighted_ls(const WeightedObservations &obs);

// Per-axis least-squares fusion, errors of the two sources independent.
PositionEstimate fuse_positions(const PositionEstimate &a, const PositionEstimate &b);

// Fused variance of one axis, s1 * s2 / (s1 + s2) with the zero-weight and
// exact limits handled.
double fused_axis_variance(double var1, double var2);

// RMSE of the RSS+PDR fix: the RSS x/y variances pair with sigma_s^2 and
// sigma_g^2 respectively.
double fused_rmse(double var_x_rss, double var_y_rss, double sigma_s, double sigma_g);
double fused_rmse(const AxisVariances &rss, const AxisVariances &pdr);

struct CurveOptions
{
  // Rotate the walking-frame PDR covariance by the heading before pairing it
  // with world axes. Off by default.
  bool rotate_pdr_frame = false;
  // Restart PDR error accumulation every reset_every steps; 0 = never.
  int reset_every = 0;
};

struct CurvePoint
{
  int step = 0;
  double rss_rmse = kUnbounded;
  double pdr_rmse = 0.0;
  double fused_rmse = kUnbounded;
};

// PDR world-axis variances for a walk along `heading` after the given
// along/cross-track errors.
AxisVariances pdr_axis_variances(const PdrErrorEstimate &e, double heading, bool rotate_pdr_frame);

// RSS, PDR and fused RMSE at every step of a straight walk. Throws
// std::invalid_argument if any step leaves the floorplan.
std::vector<CurvePoint> fused_curve(const ChannelModel &ch, const BeaconLayout &layout, const Trajectory &traj,
                                    const PdrParams &pdr, const CurveOptions &opts = {});

// Header `step,rss_rmse_m,pdr_rmse_m,fused_rmse_m`, `inf` for unbounded.
void write_curve_csv(std::ostream &out, const std::vector<CurvePoint> &curve);

} // namespace beaconplan
