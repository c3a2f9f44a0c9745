#pragma once

#include "beaconplan/error_map.hpp"
#include "beaconplan/geometry.hpp"
#include "beaconplan/layout_opt.hpp"
#include "beaconplan/pdr_model.hpp"
#include "beaconplan/rss_model.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stop_token>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace beaconplan
{

inline constexpr int kFormatVersion = 1;

// Malformed JSON text; line and column are 1-based.
class ParseError : public std::runtime_error
{
public:
  ParseError(std::size_t line, std::size_t column, const std::string &message);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

struct GridSettings
{
  double resolution = 0.5; // m, display maps
  PdrMode pdr_mode = PdrMode::distance_to_beacon;
  int horizon_steps = 20;

  friend bool operator==(const GridSettings &, const GridSettings &) = default;
};

struct Project
{
  std::string id;
  std::string name;
  std::int64_t created = 0;  // UTC seconds
  std::int64_t modified = 0; // UTC seconds
  std::int64_t version = 1;  // bumped by every service mutation
  Floorplan floorplan;
  ChannelModel channel;
  PdrParams pdr;
  std::vector<Beacon> beacons;
  GridSettings grid;
  SaConfig optimize;

  BeaconLayout layout() const { return {floorplan, beacons}; }

  // Full invariant check; throws ValidationError naming the field.
  void validate() const;

  friend bool operator==(const Project &, const Project &) = default;
};

// Sortable 26-character id: 48-bit millisecond timestamp then 80 random
// bits, Crockford base32.
std::string new_project_id();

std::int64_t utc_seconds_now();

// Rounds to 9 significant digits, the precision of every exported number.
double round_sig9(double v);

// Parses and validates a project document, filling defaults for omitted
// optional fields. Throws ParseError or ValidationError.
Project load_project(const std::string &text);
Project load_project(const nlohmann::json &doc);
Project load_project_file(const std::filesystem::path &path);

nlohmann::json project_to_json(const Project &p);

// Canonical text: sorted keys, two-space indent, trailing newline.
std::string save_project(const Project &p);
void save_project_file(const Project &p, const std::filesystem::path &path);

nlohmann::json beacons_to_json(const std::vector<Beacon> &beacons);
std::vector<Beacon> beacons_from_json(const nlohmann::json &doc, const std::string &path);

// Overlay optimizer fields from `doc` (the `optimize` schema) onto `cfg`.
void apply_optimize_overrides(SaConfig &cfg, const nlohmann::json &doc, const std::string &path);
nlohmann::json optimize_to_json(const SaConfig &cfg);

nlohmann::json sa_result_to_json(const SaResult &r);

// Anneals the project's layout. With SaStart::current and a matching beacon
// count the chain starts from the project's beacons, so the result is never
// worse than the layout the planner already has.
SaResult optimize_project(const Project &p, const SaConfig &cfg,
                          const std::function<void(const SaProgress &)> &on_progress = {}, std::stop_token stop = {});

} // namespace beaconplan
