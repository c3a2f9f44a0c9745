#pragma once

#include <stdexcept>
#include <string>

namespace beaconplan
{

// Raised when a computation has no usable input: no audible beacon, all
// sources unbounded, an empty layout.
class NoInformation : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Invariant violation in user-supplied data. `path` names the offending
// field, e.g. "beacons[3].x_m".
class ValidationError : public std::runtime_error
{
public:
  ValidationError(std::string path, const std::string &message)
      : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path))
  {
  }

  const std::string &path() const noexcept { return path_; }

private:
  std::string path_;
};

} // namespace beaconplan
