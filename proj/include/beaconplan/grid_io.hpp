#pragma once

#include "beaconplan/geometry.hpp"

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

namespace beaconplan
{

// Shortest "%.9g" rendering; unbounded values render as "inf".
std::string format_number(double v);

std::string unit_name(GridUnit unit);
GridUnit parse_unit(std::string_view name);

// Grid CSV: four "# key=value" header lines (unit, resolution_m, nx, ny)
// followed by ny rows of nx comma-separated values, row j = 0 first.
void write_grid_csv(std::ostream &out, const ErrorGrid &grid);
std::string grid_to_csv(const ErrorGrid &grid);
ErrorGrid read_grid_csv(std::istream &in);
ErrorGrid grid_from_csv(const std::string &text);

// Service payload: {format_version, kind, unit, nx, ny, resolution_m, values}
// with null for unbounded cells.
nlohmann::json grid_to_json(const ErrorGrid &grid, std::string_view kind);

} // namespace beaconplan
