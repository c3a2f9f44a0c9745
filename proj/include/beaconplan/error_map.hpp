#pragma once

#include "beaconplan/geometry.hpp"
#include "beaconplan/pdr_model.hpp"
#include "beaconplan/rss_model.hpp"

#include <string>
#include <string_view>

namespace beaconplan
{

enum class MapKind
{
  strength,
  rss_error,
  fused_error,
};

// How each cell picks the PDR step count it is charged with.
enum class PdrMode
{
  uniform_horizon,    // every cell uses horizon_steps
  distance_to_beacon, // ceil(nearest-beacon distance / step length), clamped to [1, horizon]
};

std::string map_kind_name(MapKind kind);
MapKind parse_map_kind(std::string_view name);
std::string pdr_mode_name(PdrMode mode);
PdrMode parse_pdr_mode(std::string_view name);

struct MapRequest
{
  MapKind kind = MapKind::strength;
  double resolution = 0.5;
  PdrMode pdr_mode = PdrMode::distance_to_beacon;
  int horizon_steps = 20;
};

// Strongest predicted RSS at each cell center. Throws NoInformation for an
// empty layout.
ErrorGrid strength_map(const ChannelModel &ch, const BeaconLayout &layout, const GridSpec &grid);

// CRLB RMSE at each cell center, unbounded where the FIM is singular.
ErrorGrid rss_error_map(const ChannelModel &ch, const BeaconLayout &layout, const GridSpec &grid);

// Fused RSS+PDR RMSE per cell. Cells without RSS information carry the PDR
// error alone.
ErrorGrid fused_error_map(const ChannelModel &ch, const BeaconLayout &layout, const GridSpec &grid,
                          const PdrParams &pdr, PdrMode mode, int horizon_steps);

ErrorGrid compute_map(const ChannelModel &ch, const BeaconLayout &layout, const PdrParams &pdr,
                      const MapRequest &request);

struct GridMean
{
  double mean = 0.0;
  double bounded_fraction = 0.0;
};

// Mean over bounded cells. Throws NoInformation if none are bounded.
GridMean grid_mean(const ErrorGrid &grid);

} // namespace beaconplan
