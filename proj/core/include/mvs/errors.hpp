#pragma once

#include <stdexcept>
#include <string>

namespace mvs {

// Plane passes through (or numerically grazes) the reference camera center.
struct DegeneratePlane : std::runtime_error {
  explicit DegeneratePlane(const std::string& what) : std::runtime_error(what) {}
};

struct SceneTooSmall : std::runtime_error {
  explicit SceneTooSmall(const std::string& what) : std::runtime_error(what) {}
};

struct MissingFile : std::runtime_error {
  explicit MissingFile(const std::string& what) : std::runtime_error(what) {}
};

struct MalformedCamera : std::runtime_error {
  explicit MalformedCamera(const std::string& what) : std::runtime_error(what) {}
};

struct MalformedHeader : std::runtime_error {
  explicit MalformedHeader(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::runtime_error {
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateSpec : std::runtime_error {
  explicit DegenerateSpec(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyCloud : std::runtime_error {
  explicit EmptyCloud(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mvs
