#include "beaconplan/pdr_model.hpp"

#include "beaconplan/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace beaconplan
{

void PdrParams::validate() const
{
  if (!(step_length > 0.0) || !std::isfinite(step_length))
    throw ValidationError("pdr.step_length_m", "must be a positive finite number");
  if (!(dmax >= 0.0) || !std::isfinite(dmax))
    throw ValidationError("pdr.dmax_rad_per_s", "must be a nonnegative finite number");
  if (!(sigma_sn >= 0.0) || !std::isfinite(sigma_sn))
    throw ValidationError("pdr.sigma_sn_m", "must be a nonnegative finite number");
  if (!(step_period > 0.0) || !std::isfinite(step_period))
    throw ValidationError("pdr.step_period_s", "must be a positive finite number");
}

namespace
{

void require_steps(int n)
{
  if (n < 1)
    throw std::invalid_argument("step count must be >= 1, got " + std::to_string(n));
}

double noise_term(const PdrParams &p, int n)
{
  return p.sigma_sn_scaling == SigmaSnScaling::sqrt_n ? p.sigma_sn * std::sqrt(static_cast<double>(n)) : p.sigma_sn;
}

} // namespace

double heading_drift(const PdrParams &p, int k)
{
  require_steps(k);
  return p.dmax * static_cast<double>(k - 1) * p.step_period;
}

double sigma_s(const PdrParams &p, int n)
{
  require_steps(n);
  double sum = 0.0;
  for (int k = 1; k <= n; ++k)
    sum += p.step_length * (1.0 - std::cos(heading_drift(p, k)));
  return sum + noise_term(p, n);
}

double sigma_g(const PdrParams &p, int n)
{
  require_steps(n);
  double sum = 0.0;
  for (int k = 1; k <= n; ++k)
    sum += p.step_length * std::sin(heading_drift(p, k));
  return sum;
}

PdrErrorEstimate pdr_rmse(const PdrParams &p, int n)
{
  PdrErrorEstimate e;
  e.sigma_s = sigma_s(p, n);
  e.sigma_g = sigma_g(p, n);
  e.rmse = std::sqrt(e.sigma_s * e.sigma_s + e.sigma_g * e.sigma_g);
  return e;
}

PdrTable::PdrTable(const PdrParams &p, int max_steps) : params_(p)
{
  require_steps(max_steps);
  drift_s_.reserve(max_steps);
  drift_g_.reserve(max_steps);
  double s = 0.0;
  double g = 0.0;
  for (int k = 1; k <= max_steps; ++k)
  {
    const double drift = heading_drift(p, k);
    s += p.step_length * (1.0 - std::cos(drift));
    g += p.step_length * std::sin(drift);
    drift_s_.push_back(s);
    drift_g_.push_back(g);
  }
}

PdrErrorEstimate PdrTable::at(int n) const
{
  require_steps(n);
  if (n > max_steps())
    throw std::out_of_range("PdrTable holds " + std::to_string(max_steps()) + " steps, asked for " + std::to_string(n));
  PdrErrorEstimate e;
  e.sigma_s = drift_s_[n - 1] + noise_term(params_, n);
  e.sigma_g = drift_g_[n - 1];
  e.rmse = std::sqrt(e.sigma_s * e.sigma_s + e.sigma_g * e.sigma_g);
  return e;
}

} // namespace beaconplan
