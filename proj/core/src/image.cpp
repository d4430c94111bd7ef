#include "mvs/image.hpp"

namespace mvs {

GrayImage luma_from_rgb(const RgbImage& rgb) {
  GrayImage g;
  g.width = rgb.width;
  g.height = rgb.height;
  g.luma.resize(std::size_t(rgb.width) * rgb.height);
  for (std::size_t i = 0; i < g.luma.size(); ++i) {
    const auto& c = rgb.rgb[i];
    g.luma[i] = float((0.2126 * c[0] + 0.7152 * c[1] + 0.0722 * c[2]) / 255.0);
  }
  return g;
}

}  // namespace mvs
