#include "beaconplan/project.hpp"

#include "beaconplan/errors.hpp"
#include "beaconplan/grid_io.hpp"

#include <chrono>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace beaconplan
{

using nlohmann::json;

ParseError::ParseError(std::size_t line, std::size_t column, const std::string &message)
    : std::runtime_error("parse error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                         message),
      line_(line), column_(column)
{
}

std::int64_t utc_seconds_now()
{
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
}

std::string new_project_id()
{
  static constexpr char alphabet[] = "0123456789ABCDEFGHJKMNPQRSTVWXYZ";
  const auto ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
          .count());

  thread_local std::mt19937_64 rng(std::random_device{}());
  std::string id(26, '0');
  for (int i = 9; i >= 0; --i)
    id[9 - i] = alphabet[(ms >> (5 * i)) & 31];
  for (int i = 10; i < 26; ++i)
    id[i] = alphabet[rng() & 31];
  return id;
}

double round_sig9(double v)
{
  if (!std::isfinite(v))
    return v;
  return std::strtod(format_number(v).c_str(), nullptr);
}

void Project::validate() const
{
  if (id.empty())
    throw ValidationError("id", "must not be empty");
  layout().validate();
  channel.validate();
  pdr.validate();
  if (!(grid.resolution > 0.0) || !std::isfinite(grid.resolution))
    throw ValidationError("grid.resolution_m", "must be a positive finite number");
  if (grid.horizon_steps < 1)
    throw ValidationError("grid.horizon_steps", "must be >= 1");
  optimize.validate();
}

namespace
{

std::string type_label(const json &v)
{
  return v.type_name();
}

// Reads the fields of one JSON object, tracking which keys were consumed so
// the rest can be rejected.
class ObjectReader
{
public:
  ObjectReader(const json &obj, std::string path) : obj_(obj), path_(std::move(path))
  {
    if (!obj_.is_object())
      throw ValidationError(path_.empty() ? "<root>" : path_, "expected an object, got " + type_label(obj_));
  }

  std::string child(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

  const json *find(const std::string &key)
  {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  const json &require(const std::string &key)
  {
    const json *v = find(key);
    if (!v)
      throw ValidationError(child(key), "required field is missing");
    return *v;
  }

  void number(const std::string &key, double &out)
  {
    if (const json *v = find(key))
    {
      if (!v->is_number())
        throw ValidationError(child(key), "expected a number, got " + type_label(*v));
      out = round_sig9(v->get<double>());
    }
  }

  template <class Int>
  void integer(const std::string &key, Int &out)
  {
    if (const json *v = find(key))
    {
      if (!v->is_number_integer())
        throw ValidationError(child(key), "expected an integer, got " + type_label(*v));
      if constexpr (std::is_unsigned_v<Int>)
      {
        if (!v->is_number_unsigned())
          throw ValidationError(child(key), "expected a nonnegative integer");
        out = v->get<Int>();
      }
      else
      {
        if (v->is_number_unsigned() && v->get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<Int>::max()))
          throw ValidationError(child(key), "integer out of range");
        const auto raw = v->get<std::int64_t>();
        if (raw < std::numeric_limits<Int>::min() || raw > std::numeric_limits<Int>::max())
          throw ValidationError(child(key), "integer out of range");
        out = static_cast<Int>(raw);
      }
    }
  }

  void string(const std::string &key, std::string &out)
  {
    if (const json *v = find(key))
    {
      if (!v->is_string())
        throw ValidationError(child(key), "expected a string, got " + type_label(*v));
      out = v->get<std::string>();
    }
  }

  template <class Enum, class Parse>
  void enumeration(const std::string &key, Enum &out, Parse parse)
  {
    if (const json *v = find(key))
    {
      if (!v->is_string())
        throw ValidationError(child(key), "expected a string, got " + type_label(*v));
      try
      {
        out = parse(v->get<std::string>());
      }
      catch (const std::invalid_argument &e)
      {
        throw ValidationError(child(key), e.what());
      }
    }
  }

  void finish() const
  {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
    {
      if (!seen_.count(it.key()))
        throw ValidationError(child(it.key()), "unknown key");
    }
  }

private:
  const json &obj_;
  std::string path_;
  std::set<std::string> seen_;
};

Audibility parse_audibility(const std::string &s)
{
  if (s == "threshold")
    return Audibility::threshold;
  if (s == "all")
    return Audibility::all;
  throw std::invalid_argument("unknown audibility '" + s + "' (expected threshold or all)");
}

SigmaSnScaling parse_scaling(const std::string &s)
{
  if (s == "verbatim")
    return SigmaSnScaling::verbatim;
  if (s == "sqrt_n")
    return SigmaSnScaling::sqrt_n;
  throw std::invalid_argument("unknown sigma_sn_scaling '" + s + "' (expected verbatim or sqrt_n)");
}

std::pair<std::size_t, std::size_t> line_column(const std::string &text, std::size_t byte)
{
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i)
  {
    if (text[i] == '\n')
    {
      ++line;
      col = 1;
    }
    else
    {
      ++col;
    }
  }
  return {line, col};
}

json num(double v) { return round_sig9(v); }

} // namespace

std::vector<Beacon> beacons_from_json(const json &doc, const std::string &path)
{
  if (!doc.is_array())
    throw ValidationError(path, "expected an array, got " + type_label(doc));
  std::vector<Beacon> out;
  for (std::size_t i = 0; i < doc.size(); ++i)
  {
    ObjectReader r(doc[i], path + "[" + std::to_string(i) + "]");
    Beacon b;
    r.require("id");
    r.string("id", b.id);
    r.require("x_m");
    r.require("y_m");
    r.number("x_m", b.position.x);
    r.number("y_m", b.position.y);
    r.finish();
    out.push_back(std::move(b));
  }
  return out;
}

json beacons_to_json(const std::vector<Beacon> &beacons)
{
  json out = json::array();
  for (const auto &b : beacons)
    out.push_back({{"id", b.id}, {"x_m", num(b.position.x)}, {"y_m", num(b.position.y)}});
  return out;
}

void apply_optimize_overrides(SaConfig &cfg, const json &doc, const std::string &path)
{
  ObjectReader r(doc, path);
  r.integer("beacon_count", cfg.beacon_count);
  r.enumeration("objective", cfg.objective, parse_objective);
  r.number("unbounded_penalty_m", cfg.unbounded_penalty);
  if (const json *t = r.find("initial_temp_m"))
  {
    if (t->is_string() && t->get<std::string>() == "auto")
      cfg.initial_temp.reset();
    else if (t->is_number())
      cfg.initial_temp = round_sig9(t->get<double>());
    else
      throw ValidationError(r.child("initial_temp_m"), "expected \"auto\" or a number");
  }
  r.number("cooling_factor", cfg.cooling_factor);
  r.integer("iters_per_temp", cfg.iters_per_temp);
  r.number("min_temp_ratio", cfg.min_temp_ratio);
  r.number("move_sigma_m", cfg.move_sigma);
  r.integer("max_evals", cfg.max_evals);
  r.integer("seed", cfg.seed);
  r.number("grid_resolution_m", cfg.grid_resolution);
  r.enumeration("start", cfg.start, parse_sa_start);
  r.finish();
}

json optimize_to_json(const SaConfig &cfg)
{
  return {
      {"beacon_count", cfg.beacon_count},
      {"objective", objective_name(cfg.objective)},
      {"unbounded_penalty_m", num(cfg.unbounded_penalty)},
      {"initial_temp_m", cfg.initial_temp ? json(num(*cfg.initial_temp)) : json("auto")},
      {"cooling_factor", num(cfg.cooling_factor)},
      {"iters_per_temp", cfg.iters_per_temp},
      {"min_temp_ratio", num(cfg.min_temp_ratio)},
      {"move_sigma_m", num(cfg.move_sigma)},
      {"max_evals", cfg.max_evals},
      {"seed", cfg.seed},
      {"grid_resolution_m", num(cfg.grid_resolution)},
      {"start", sa_start_name(cfg.start)},
  };
}

Project load_project(const json &doc)
{
  ObjectReader root(doc, "");
  int format = kFormatVersion;
  root.integer("format_version", format);
  if (format != kFormatVersion)
    throw ValidationError("format_version", "unsupported version " + std::to_string(format));

  Project p;
  root.string("id", p.id);
  root.string("name", p.name);
  root.integer("created_utc_s", p.created);
  root.integer("modified_utc_s", p.modified);
  root.integer("version", p.version);
  if (p.id.empty())
    p.id = new_project_id();
  if (p.created == 0)
    p.created = utc_seconds_now();
  if (p.modified == 0)
    p.modified = p.created;
  if (p.version < 1)
    throw ValidationError("version", "must be >= 1");

  {
    ObjectReader r(root.require("floorplan"), "floorplan");
    r.require("width_m");
    r.require("height_m");
    r.number("width_m", p.floorplan.width);
    r.number("height_m", p.floorplan.height);
    r.finish();
  }
  {
    ObjectReader r(root.require("channel"), "channel");
    r.number("beta", p.channel.beta);
    r.number("sigma_dbm", p.channel.sigma);
    r.number("p0_dbm", p.channel.p0);
    r.number("d0_m", p.channel.d0);
    r.number("d_min_m", p.channel.d_min);
    r.number("sensitivity_dbm", p.channel.sensitivity);
    r.enumeration("audibility", p.channel.audibility, parse_audibility);
    r.finish();
  }
  if (const json *v = root.find("pdr"))
  {
    ObjectReader r(*v, "pdr");
    r.number("step_length_m", p.pdr.step_length);
    r.number("dmax_rad_per_s", p.pdr.dmax);
    r.number("sigma_sn_m", p.pdr.sigma_sn);
    r.number("step_period_s", p.pdr.step_period);
    r.enumeration("sigma_sn_scaling", p.pdr.sigma_sn_scaling, parse_scaling);
    r.finish();
  }
  if (const json *v = root.find("beacons"))
    p.beacons = beacons_from_json(*v, "beacons");
  if (const json *v = root.find("grid"))
  {
    ObjectReader r(*v, "grid");
    r.number("resolution_m", p.grid.resolution);
    r.enumeration("pdr_mode", p.grid.pdr_mode, parse_pdr_mode);
    r.integer("horizon_steps", p.grid.horizon_steps);
    r.finish();
  }
  p.optimize.beacon_count = p.beacons.empty() ? p.optimize.beacon_count : static_cast<int>(p.beacons.size());
  if (const json *v = root.find("optimize"))
    apply_optimize_overrides(p.optimize, *v, "optimize");
  p.optimize.pdr_mode = p.grid.pdr_mode;
  p.optimize.horizon_steps = p.grid.horizon_steps;
  root.finish();

  p.validate();
  return p;
}

Project load_project(const std::string &text)
{
  json doc;
  try
  {
    doc = json::parse(text);
  }
  catch (const json::parse_error &e)
  {
    const auto [line, col] = line_column(text, e.byte);
    throw ParseError(line, col, e.what());
  }
  return load_project(doc);
}

Project load_project_file(const std::filesystem::path &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open project file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_project(buf.str());
}

json project_to_json(const Project &p)
{
  return {
      {"format_version", kFormatVersion},
      {"id", p.id},
      {"name", p.name},
      {"created_utc_s", p.created},
      {"modified_utc_s", p.modified},
      {"version", p.version},
      {"floorplan", {{"width_m", num(p.floorplan.width)}, {"height_m", num(p.floorplan.height)}}},
      {"channel",
       {{"beta", num(p.channel.beta)},
        {"sigma_dbm", num(p.channel.sigma)},
        {"p0_dbm", num(p.channel.p0)},
        {"d0_m", num(p.channel.d0)},
        {"d_min_m", num(p.channel.d_min)},
        {"sensitivity_dbm", num(p.channel.sensitivity)},
        {"audibility", p.channel.audibility == Audibility::all ? "all" : "threshold"}}},
      {"pdr",
       {{"step_length_m", num(p.pdr.step_length)},
        {"dmax_rad_per_s", num(p.pdr.dmax)},
        {"sigma_sn_m", num(p.pdr.sigma_sn)},
        {"step_period_s", num(p.pdr.step_period)},
        {"sigma_sn_scaling", p.pdr.sigma_sn_scaling == SigmaSnScaling::sqrt_n ? "sqrt_n" : "verbatim"}}},
      {"beacons", beacons_to_json(p.beacons)},
      {"grid",
       {{"resolution_m", num(p.grid.resolution)},
        {"pdr_mode", pdr_mode_name(p.grid.pdr_mode)},
        {"horizon_steps", p.grid.horizon_steps}}},
      {"optimize", optimize_to_json(p.optimize)},
  };
}

std::string save_project(const Project &p) { return project_to_json(p).dump(2) + "\n"; }

void save_project_file(const Project &p, const std::filesystem::path &path)
{
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot write '" + tmp + "'");
    out << save_project(p);
  }
  std::filesystem::rename(tmp, path);
}

json sa_result_to_json(const SaResult &r)
{
  json history = json::array();
  for (const auto &h : r.history)
    history.push_back({{"eval", h.eval}, {"current", num(h.current)}, {"best", num(h.best)}, {"temperature", num(h.temperature)}});
  return {
      {"best_beacons", beacons_to_json(r.best_layout.beacons)},
      {"best_objective_m", num(r.best_objective)},
      {"evals_used", r.evals_used},
      {"initial_temp_m", num(r.initial_temp)},
      {"config", optimize_to_json(r.config)},
      {"history", std::move(history)},
  };
}

SaResult optimize_project(const Project &p, const SaConfig &cfg, const std::function<void(const SaProgress &)> &on_progress,
                          std::stop_token stop)
{
  const GridSpec grid(p.floorplan, cfg.grid_resolution);
  if (cfg.start == SaStart::current && p.beacons.size() == static_cast<std::size_t>(cfg.beacon_count))
    return anneal(p.channel, p.layout(), grid, cfg, &p.pdr, on_progress, stop);
  return anneal(p.channel, p.floorplan, grid, cfg, &p.pdr, on_progress, stop);
}

} // namespace beaconplan
