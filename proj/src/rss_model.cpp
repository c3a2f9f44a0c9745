#include "beaconplan/rss_model.hpp"

#include "beaconplan/errors.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace beaconplan
{

void ChannelModel::validate() const
{
  auto positive = [](double v, const char *path) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ValidationError(path, "must be a positive finite number");
  };
  positive(beta, "channel.beta");
  positive(sigma, "channel.sigma_dbm");
  positive(d0, "channel.d0_m");
  positive(d_min, "channel.d_min_m");
  if (!std::isfinite(p0))
    throw ValidationError("channel.p0_dbm", "must be finite");
  if (!std::isfinite(sensitivity) || !(sensitivity < p0))
    throw ValidationError("channel.sensitivity_dbm", "must be finite and below p0_dbm");
}

double ChannelModel::information_scale() const
{
  const double k = 10.0 * beta / (sigma * std::numbers::ln10);
  return k * k;
}

double predict_rss(const ChannelModel &ch, double d)
{
  return ch.p0 - 10.0 * ch.beta * std::log10(std::max(d, ch.d_min) / ch.d0);
}

bool is_audible(const ChannelModel &ch, double d)
{
  return ch.audibility == Audibility::all || predict_rss(ch, d) >= ch.sensitivity;
}

std::vector<std::size_t> audible_beacons(const ChannelModel &ch, Point2 user, const BeaconLayout &layout)
{
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < layout.beacons.size(); ++k)
  {
    if (is_audible(ch, distance(user, layout.beacons[k].position)))
      out.push_back(k);
  }
  return out;
}

namespace
{

// Direction cosines from user to beacon. A beacon exactly at the user has no
// bearing; it contributes isotropically (cos^2 = sin^2 = 1/2, cross term 0).
struct Bearing
{
  double cc, ss, sc;
};

Bearing bearing(Point2 user, Point2 beacon)
{
  const double dx = beacon.x - user.x;
  const double dy = beacon.y - user.y;
  const double r = std::hypot(dx, dy);
  if (r == 0.0)
    return {0.5, 0.5, 0.0};
  const double c = dx / r;
  const double s = dy / r;
  return {c * c, s * s, s * c};
}

} // namespace

Fim2 fim(const ChannelModel &ch, Point2 user, const BeaconLayout &layout)
{
  Fim2 sum;
  std::size_t used = 0;
  for (const auto &b : layout.beacons)
  {
    const double r = distance(user, b.position);
    if (!is_audible(ch, r))
      continue;
    const double d = std::max(r, ch.d_min);
    const double inv_d2 = 1.0 / (d * d);
    const Bearing a = bearing(user, b.position);
    sum.jxx += a.cc * inv_d2;
    sum.jyy += a.ss * inv_d2;
    sum.jxy += a.sc * inv_d2;
    ++used;
  }
  if (used == 0)
    throw NoInformation("no audible beacon at (" + std::to_string(user.x) + ", " + std::to_string(user.y) + ")");

  const double c = ch.information_scale();
  sum.jxx *= c;
  sum.jyy *= c;
  sum.jxy *= c;
  sum.jyx = sum.jxy;
  return sum;
}

Crlb crlb(const Fim2 &f)
{
  const double det = f.jxx * f.jyy - f.jxy * f.jyx;
  if (!(det > kDetEps * std::max(1.0, f.jxx * f.jyy)))
    return {};
  Crlb out;
  out.variances.var_x = f.jyy / det;
  out.variances.var_y = f.jxx / det;
  out.trace = out.variances.var_x + out.variances.var_y;
  return out;
}

AxisVariances rss_variances(const ChannelModel &ch, Point2 user, const BeaconLayout &layout)
{
  try
  {
    return crlb(fim(ch, user, layout)).variances;
  }
  catch (const NoInformation &)
  {
    return {};
  }
}

double rss_rmse(const ChannelModel &ch, Point2 user, const BeaconLayout &layout)
{
  const AxisVariances v = rss_variances(ch, user, layout);
  if (is_unbounded(v.var_x) || is_unbounded(v.var_y))
    return kUnbounded;
  return std::sqrt(v.var_x + v.var_y);
}

Point2 log_likelihood_score(const ChannelModel &ch, Point2 user, const BeaconLayout &layout,
                            std::span<const double> observed)
{
  const auto audible = audible_beacons(ch, user, layout);
  if (observed.size() != audible.size())
    throw std::invalid_argument("observed has " + std::to_string(observed.size()) + " readings for " +
                                std::to_string(audible.size()) + " audible beacons");

  // d(mean)/d(user) = -(10 beta / ln 10) (user - beacon) / d^2, zero inside
  // the clamp where the mean is flat.
  const double slope = 10.0 * ch.beta / std::numbers::ln10;
  const double inv_var = 1.0 / (ch.sigma * ch.sigma);
  Point2 grad;
  for (std::size_t n = 0; n < audible.size(); ++n)
  {
    const Point2 b = layout.beacons[audible[n]].position;
    const double r = distance(user, b);
    if (r < ch.d_min)
      continue;
    const double residual = observed[n] - predict_rss(ch, r);
    const double r2 = r * r;
    grad.x += residual * inv_var * (-slope * (user.x - b.x) / r2);
    grad.y += residual * inv_var * (-slope * (user.y - b.y) / r2);
  }
  return grad;
}

} // namespace beaconplan
