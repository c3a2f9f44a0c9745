#include "beaconplan/grid_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace beaconplan
{

std::string format_number(double v)
{
  if (is_unbounded(v))
    return "inf";
  if (std::isnan(v) || std::isinf(v))
    throw std::invalid_argument("cannot serialize non-finite value");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string unit_name(GridUnit unit)
{
  switch (unit)
  {
  case GridUnit::dBm:
    return "dBm";
  case GridUnit::meters:
    return "m";
  case GridUnit::meters2:
    return "m2";
  }
  throw std::invalid_argument("unknown grid unit");
}

GridUnit parse_unit(std::string_view name)
{
  if (name == "dBm")
    return GridUnit::dBm;
  if (name == "m")
    return GridUnit::meters;
  if (name == "m2")
    return GridUnit::meters2;
  throw std::invalid_argument("unknown grid unit '" + std::string(name) + "'");
}

void write_grid_csv(std::ostream &out, const ErrorGrid &grid)
{
  const auto &spec = grid.spec;
  out << "# unit=" << unit_name(grid.unit) << '\n'
      << "# resolution_m=" << format_number(spec.resolution()) << '\n'
      << "# nx=" << spec.nx() << '\n'
      << "# ny=" << spec.ny() << '\n';
  for (std::size_t j = 0; j < spec.ny(); ++j)
  {
    for (std::size_t i = 0; i < spec.nx(); ++i)
    {
      if (i)
        out << ',';
      out << format_number(grid.at(i, j));
    }
    out << '\n';
  }
}

std::string grid_to_csv(const ErrorGrid &grid)
{
  std::ostringstream out;
  write_grid_csv(out, grid);
  return out.str();
}

namespace
{

std::string header_value(std::istream &in, std::string_view key)
{
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("grid csv: missing header '" + std::string(key) + "'");
  const std::string prefix = "# " + std::string(key) + "=";
  if (line.rfind(prefix, 0) != 0)
    throw std::runtime_error("grid csv: expected '" + prefix + "', got '" + line + "'");
  return line.substr(prefix.size());
}

double parse_value(const std::string &token)
{
  if (token == "inf")
    return kUnbounded;
  char *end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size() || !std::isfinite(v))
    throw std::runtime_error("grid csv: bad value '" + token + "'");
  return v;
}

} // namespace

ErrorGrid read_grid_csv(std::istream &in)
{
  const GridUnit unit = parse_unit(header_value(in, "unit"));
  const double res = parse_value(header_value(in, "resolution_m"));
  const auto nx = std::stoul(header_value(in, "nx"));
  const auto ny = std::stoul(header_value(in, "ny"));
  GridSpec spec(res, nx, ny);

  std::vector<double> values;
  values.reserve(spec.size());
  std::string line;
  for (std::size_t j = 0; j < ny; ++j)
  {
    if (!std::getline(in, line))
      throw std::runtime_error("grid csv: expected " + std::to_string(ny) + " rows");
    std::istringstream row(line);
    std::string token;
    std::size_t count = 0;
    while (std::getline(row, token, ','))
    {
      values.push_back(parse_value(token));
      ++count;
    }
    if (count != nx)
      throw std::runtime_error("grid csv: row " + std::to_string(j) + " has " + std::to_string(count) + " values");
  }
  return ErrorGrid(spec, unit, std::move(values));
}

ErrorGrid grid_from_csv(const std::string &text)
{
  std::istringstream in(text);
  return read_grid_csv(in);
}

nlohmann::json grid_to_json(const ErrorGrid &grid, std::string_view kind)
{
  nlohmann::json values = nlohmann::json::array();
  for (double v : grid.values)
  {
    if (is_unbounded(v))
      values.push_back(nullptr);
    else
      values.push_back(std::strtod(format_number(v).c_str(), nullptr));
  }
  return {
      {"format_version", 1},
      {"kind", std::string(kind)},
      {"unit", unit_name(grid.unit)},
      {"nx", grid.spec.nx()},
      {"ny", grid.spec.ny()},
      {"resolution_m", grid.spec.resolution()},
      {"values", std::move(values)},
  };
}

} // namespace beaconplan
