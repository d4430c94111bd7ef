#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace mvs {

// Single-channel luminance image, values in [0,1], row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<float> luma;

  float at(int x, int y) const { return luma[std::size_t(y) * width + x]; }
  float& at(int x, int y) { return luma[std::size_t(y) * width + x]; }

  bool contains(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }

  // Pixel (x, y) has its center at continuous coordinates (x+0.5, y+0.5).
  // Bilinear interpolation is defined on [0.5, width-0.5] x [0.5, height-0.5].
  bool in_bilinear_bounds(double u, double v) const {
    return u >= 0.5 && u <= width - 0.5 && v >= 0.5 && v <= height - 0.5;
  }

  double sample_bilinear(double u, double v) const {
    const double fx = u - 0.5;
    const double fy = v - 0.5;
    int x0 = int(fx);
    int y0 = int(fy);
    if (x0 < 0) x0 = 0;
    if (y0 < 0) y0 = 0;
    const int x1 = x0 + 1 < width ? x0 + 1 : width - 1;
    const int y1 = y0 + 1 < height ? y0 + 1 : height - 1;
    const double wx = fx - x0;
    const double wy = fy - y0;
    const double v00 = at(x0, y0);
    const double v10 = at(x1, y0);
    const double v01 = at(x0, y1);
    const double v11 = at(x1, y1);
    return (1.0 - wy) * ((1.0 - wx) * v00 + wx * v10) +
           wy * ((1.0 - wx) * v01 + wx * v11);
  }
};

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::array<std::uint8_t, 3>> rgb;  // row-major

  const std::array<std::uint8_t, 3>& at(int x, int y) const {
    return rgb[std::size_t(y) * width + x];
  }
  std::array<std::uint8_t, 3>& at(int x, int y) {
    return rgb[std::size_t(y) * width + x];
  }
};

// Rec.709 luma, fixed so matching scores are bit-stable across loaders.
GrayImage luma_from_rgb(const RgbImage& rgb);

}  // namespace mvs
