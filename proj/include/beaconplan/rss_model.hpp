#pragma once

#include "beaconplan/geometry.hpp"

#include <span>
#include <vector>

namespace beaconplan
{

// Which beacons enter the Fisher information sum.
enum class Audibility
{
  threshold, // predicted RSS >= sensitivity
  all,       // every beacon in the layout
};

// Log-distance path-loss channel shared by all beacons of a layout.
struct ChannelModel
{
  double beta = 3.0;           // path-loss exponent
  double sigma = 1.732;        // dBm, std of the RSS noise
  double p0 = -59.0;           // dBm at d0
  double d0 = 1.0;             // m
  double d_min = 0.5;          // m, near-field clamp
  double sensitivity = -100.0; // dBm, receiver floor
  Audibility audibility = Audibility::threshold;

  // Throws ValidationError with a "channel.*" path.
  void validate() const;

  // (10 beta / (sigma ln 10))^2, the common FIM prefactor.
  double information_scale() const;

  friend bool operator==(const ChannelModel &, const ChannelModel &) = default;
};

// Mean received power at distance d; d below d_min is clamped.
double predict_rss(const ChannelModel &ch, double d);

bool is_audible(const ChannelModel &ch, double d);

// Indices of the beacons that enter the FIM at `user`, in layout order.
std::vector<std::size_t> audible_beacons(const ChannelModel &ch, Point2 user, const BeaconLayout &layout);

struct Fim2
{
  double jxx = 0.0;
  double jxy = 0.0;
  double jyx = 0.0;
  double jyy = 0.0;

  Fim2 &operator+=(const Fim2 &o)
  {
    jxx += o.jxx;
    jxy += o.jxy;
    jyx += o.jyx;
    jyy += o.jyy;
    return *this;
  }
};

// Fisher information of a position from independent Gaussian RSS readings.
// Throws NoInformation if no beacon is audible.
Fim2 fim(const ChannelModel &ch, Point2 user, const BeaconLayout &layout);

// Determinant cutoff, relative to jxx*jyy (and absolute below 1).
inline constexpr double kDetEps = 1e-12;

struct AxisVariances
{
  double var_x = kUnbounded;
  double var_y = kUnbounded;
};

struct Crlb
{
  AxisVariances variances;
  double trace = kUnbounded;
};

// Inverse of the FIM diagonal; singular information gives unbounded values.
Crlb crlb(const Fim2 &f);

// sqrt(trace(J^-1)); unbounded where the FIM is singular or empty.
double rss_rmse(const ChannelModel &ch, Point2 user, const BeaconLayout &layout);

// Per-axis CRLB at a point; unbounded when no beacon is audible.
AxisVariances rss_variances(const ChannelModel &ch, Point2 user, const BeaconLayout &layout);

// Gradient of the Gaussian log-likelihood of `observed` (one reading per
// audible beacon, layout order) with respect to the user position.
Point2 log_likelihood_score(const ChannelModel &ch, Point2 user, const BeaconLayout &layout,
                            std::span<const double> observed);

} // namespace beaconplan
