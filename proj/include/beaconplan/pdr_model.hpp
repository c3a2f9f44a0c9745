#pragma once

#include <vector>

namespace beaconplan
{

enum class SigmaSnScaling
{
  verbatim, // sigma_SN added once
  sqrt_n,   // sigma_SN * sqrt(n), Gaussian per-step accumulation
};

struct PdrParams
{
  double step_length = 0.625; // m
  double dmax = 0.0283;       // rad/s, maximum heading drift rate
  double sigma_sn = 0.0446;   // m, step-length error term
  double step_period = 0.5;   // s per step
  SigmaSnScaling sigma_sn_scaling = SigmaSnScaling::verbatim;

  // Throws ValidationError with a "pdr.*" path.
  void validate() const;

  friend bool operator==(const PdrParams &, const PdrParams &) = default;
};

struct PdrErrorEstimate
{
  double sigma_s = 0.0; // along-track, m
  double sigma_g = 0.0; // cross-track, m
  double rmse = 0.0;
};

// Accumulated heading error at step k: dmax * (k - 1) * step_period.
double heading_drift(const PdrParams &p, int k);

double sigma_s(const PdrParams &p, int n);
double sigma_g(const PdrParams &p, int n);
PdrErrorEstimate pdr_rmse(const PdrParams &p, int n);

// Prefix sums of the along/cross-track drift terms for n = 1..max_steps,
// so curve and map generation pay O(1) per lookup.
class PdrTable
{
public:
  PdrTable(const PdrParams &p, int max_steps);

  int max_steps() const { return static_cast<int>(drift_s_.size()); }
  PdrErrorEstimate at(int n) const;

private:
  PdrParams params_;
  std::vector<double> drift_s_;
  std::vector<double> drift_g_;
};

} // namespace beaconplan
