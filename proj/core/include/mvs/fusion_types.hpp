#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "mvs/geometry.hpp"

namespace mvs {

struct FusionParams {
  double f_rel_depth = 0.01;  // relative depth agreement threshold
  double f_ang_deg = 30.0;    // world-frame normal agreement, degrees
  int f_con = 2;              // required number of consistent source views
  // Optional disparity-unit check for users who can supply a baseline*focal
  // scale; replaces the relative-depth test when both fields are set.
  std::optional<double> f_eps_disparity;
  std::optional<double> disparity_scale;
};

struct FusedPoint {
  Vec3 position = Vec3::Zero();          // world frame
  Vec3 normal = Vec3(0, 0, 1);           // world frame, unit
  std::array<std::uint8_t, 3> color{};   // from the reference image
  std::int32_t support = 0;              // consistent source views
};

}  // namespace mvs
