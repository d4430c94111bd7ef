#include "mvs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "mvs/errors.hpp"
#include "mvs/rng.hpp"

namespace mvs {

namespace {

// Classic 2D gradient noise, deterministic in the seed.
class PerlinNoise {
 public:
  explicit PerlinNoise(std::uint64_t seed) {
    std::iota(perm_.begin(), perm_.begin() + 256, 0);
    PixelRng rng(seed, 0, 0, 0, 0xFEED);
    for (int i = 255; i > 0; --i) {
      const int j = int(rng.next_u64() % std::uint64_t(i + 1));
      std::swap(perm_[i], perm_[j]);
    }
    for (int i = 0; i < 256; ++i) perm_[256 + i] = perm_[i];
  }

  double noise(double x, double y) const {
    const int xi = int(std::floor(x)) & 255;
    const int yi = int(std::floor(y)) & 255;
    const double xf = x - std::floor(x);
    const double yf = y - std::floor(y);
    const double u = fade(xf);
    const double v = fade(yf);
    const int aa = perm_[perm_[xi] + yi];
    const int ab = perm_[perm_[xi] + yi + 1];
    const int ba = perm_[perm_[xi + 1] + yi];
    const int bb = perm_[perm_[xi + 1] + yi + 1];
    const double x1 = lerp(grad(aa, xf, yf), grad(ba, xf - 1, yf), u);
    const double x2 = lerp(grad(ab, xf, yf - 1), grad(bb, xf - 1, yf - 1), u);
    return lerp(x1, x2, v);
  }

  double fbm(double x, double y, int octaves, double lacunarity,
             double gain) const {
    double sum = 0.0, amp = 1.0, norm = 0.0, freq = 1.0;
    for (int o = 0; o < octaves; ++o) {
      sum += amp * noise(x * freq, y * freq);
      norm += amp;
      amp *= gain;
      freq *= lacunarity;
    }
    return sum / norm;
  }

 private:
  static double fade(double t) { return t * t * t * (t * (t * 6 - 15) + 10); }
  static double lerp(double a, double b, double t) { return a + t * (b - a); }
  static double grad(int h, double x, double y) {
    switch (h & 7) {
      case 0: return x + y;
      case 1: return x - y;
      case 2: return -x + y;
      case 3: return -x - y;
      case 4: return x;
      case 5: return -x;
      case 6: return y;
      default: return -y;
    }
  }
  std::array<int, 512> perm_;
};

Vec3 get_vec3(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3)
    throw DegenerateSpec("expected a 3-element array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

std::pair<Vec3, Vec3> plane_axes(const PlaneSpec& plane) {
  const Vec3 n = plane.normal.normalized();
  Vec3 u = plane.u_axis;
  if (u.norm() < 1e-12) {
    const Vec3 helper =
        std::abs(n.z()) < 0.9 ? Vec3(0, 0, 1) : Vec3(0, 1, 0);
    u = helper.cross(n);
  }
  u -= n * n.dot(u);
  if (u.norm() < 1e-12)
    throw DegenerateSpec("plane u_axis parallel to the normal");
  u.normalize();
  return {u, n.cross(u)};
}

SynthSpec parse_synth_spec(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw MissingFile("missing scene spec: " + json_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DegenerateSpec("cannot parse scene spec: " + std::string(e.what()));
  }

  SynthSpec spec;
  spec.width = j.value("width", spec.width);
  spec.height = j.value("height", spec.height);
  spec.texture_seed = j.value("texture_seed", spec.texture_seed);
  spec.depth_min = j.value("depth_min", spec.depth_min);
  spec.depth_max = j.value("depth_max", spec.depth_max);
  if (j.contains("cameras")) {
    const auto& c = j["cameras"];
    spec.camera_count = c.value("count", spec.camera_count);
    spec.baseline = c.value("baseline", spec.baseline);
    spec.fov_deg = c.value("fov_degrees", spec.fov_deg);
    if (c.contains("target")) spec.target = get_vec3(c["target"]);
  }
  if (!j.contains("planes") || !j["planes"].is_array())
    throw DegenerateSpec("scene spec needs a 'planes' array");
  for (const auto& p : j["planes"]) {
    PlaneSpec plane;
    plane.point = get_vec3(p.at("point"));
    plane.normal = get_vec3(p.at("normal"));
    if (p.contains("u_axis")) plane.u_axis = get_vec3(p["u_axis"]);
    plane.extent_u = p.at("extent_u").get<double>();
    plane.extent_v = p.at("extent_v").get<double>();
    plane.tone = p.value("tone", plane.tone);
    spec.planes.push_back(plane);
  }
  return spec;
}

double distance_to_planes(const Vec3& p, std::span<const PlaneSpec> planes) {
  double best = std::numeric_limits<double>::infinity();
  for (const PlaneSpec& plane : planes) {
    const auto [u, v] = plane_axes(plane);
    const Vec3 d = p - plane.point;
    const double cu = std::clamp(d.dot(u), -plane.extent_u / 2.0,
                                 plane.extent_u / 2.0);
    const double cv = std::clamp(d.dot(v), -plane.extent_v / 2.0,
                                 plane.extent_v / 2.0);
    best = std::min(best, (d - cu * u - cv * v).norm());
  }
  return best;
}

namespace {

struct RenderPlane {
  Vec3 point, normal, u, v;
  double half_u, half_v;
  double tone;
  double tex_offset;  // decorrelates the shared noise field between planes
};

CameraModel make_ring_camera(const SynthSpec& spec, int index) {
  const double fx =
      (spec.width / 2.0) / std::tan(spec.fov_deg * M_PI / 360.0);
  Mat3 K = Mat3::Identity();
  K(0, 0) = fx;
  K(1, 1) = fx;
  K(0, 2) = spec.width / 2.0;
  K(1, 2) = spec.height / 2.0;

  const double offset = (index - (spec.camera_count - 1) / 2.0);
  const Vec3 center(offset * spec.baseline, 0.05 * offset * spec.baseline, 0.0);

  // Look-at rotation: camera z toward the target, x roughly world x.
  const Vec3 z = (spec.target - center).normalized();
  Vec3 x = Vec3(1, 0, 0) - z * z.x();
  if (x.norm() < 1e-9) x = Vec3(0, 1, 0) - z * z.y();
  x.normalize();
  const Vec3 y = z.cross(x);
  Mat3 R;
  R.row(0) = x.transpose();
  R.row(1) = y.transpose();
  R.row(2) = z.transpose();
  const Vec3 t = -(R * center);
  return CameraModel(K, R, t, spec.width, spec.height, spec.depth_min,
                     spec.depth_max);
}

}  // namespace

SynthScene synth_scene(const SynthSpec& spec) {
  if (spec.planes.empty()) throw DegenerateSpec("no planes in scene spec");
  if (spec.camera_count < 2)
    throw DegenerateSpec("need at least 2 cameras");
  if (spec.width < 8 || spec.height < 8)
    throw DegenerateSpec("image extent too small");
  for (const PlaneSpec& p : spec.planes) {
    if (p.extent_u <= 0 || p.extent_v <= 0)
      throw DegenerateSpec("non-positive plane extent");
    if (p.normal.norm() < 1e-12) throw DegenerateSpec("zero plane normal");
  }

  std::vector<RenderPlane> planes;
  for (std::size_t i = 0; i < spec.planes.size(); ++i) {
    const PlaneSpec& p = spec.planes[i];
    const auto [u, v] = plane_axes(p);
    planes.push_back(RenderPlane{p.point, p.normal.normalized(), u, v,
                                 p.extent_u / 2.0, p.extent_v / 2.0, p.tone,
                                 double(i) * 131.0});
  }

  SynthScene out;
  out.spec = spec;
  const PerlinNoise noise(spec.texture_seed);
  // Base texture wavelength in world units; fine enough that an 11x11 match
  // window sees real structure, coarse enough to stay above pixel Nyquist.
  const double tex_scale = 0.35;

  for (int ci = 0; ci < spec.camera_count; ++ci) {
    CameraModel cam = make_ring_camera(spec, ci);
    if (distance_to_planes(cam.center(), spec.planes) < 1e-6)
      throw DegenerateSpec("camera center touches a plane");

    RgbImage rgb;
    rgb.width = spec.width;
    rgb.height = spec.height;
    rgb.rgb.assign(std::size_t(spec.width) * spec.height, {128, 128, 128});
    DepthNormalMap gt = DepthNormalMap::zeros(spec.width, spec.height);

    const Vec3 C = cam.center();
    const Mat3 Rt = cam.R().transpose();
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        const Vec3 r = cam.ray(Pixel{x, y});  // camera frame, z = 1
        const Vec3 dir = Rt * r;              // world frame
        double best_depth = std::numeric_limits<double>::infinity();
        const RenderPlane* hit = nullptr;
        double hit_u = 0, hit_v = 0;
        for (const RenderPlane& pl : planes) {
          const double denom = pl.normal.dot(dir);
          if (std::abs(denom) < 1e-12) continue;
          const double s = pl.normal.dot(pl.point - C) / denom;
          if (s <= 0.0 || s >= best_depth) continue;
          const Vec3 X = C + s * dir;
          const double pu = (X - pl.point).dot(pl.u);
          const double pv = (X - pl.point).dot(pl.v);
          if (std::abs(pu) > pl.half_u || std::abs(pv) > pl.half_v) continue;
          best_depth = s;  // ray scaled to z=1, so s is the camera depth
          hit = &pl;
          hit_u = pu;
          hit_v = pv;
        }
        if (!hit) continue;

        const double tex = noise.fbm(hit_u / tex_scale + hit->tex_offset,
                                     hit_v / tex_scale + hit->tex_offset,
                                     4, 2.0, 0.55);
        const double luma = std::clamp(hit->tone + 0.55 * tex, 0.02, 0.98);
        const auto value = std::uint8_t(std::lround(luma * 255.0));
        rgb.at(x, y) = {value, value, value};

        const std::size_t idx = gt.index(x, y);
        gt.depth[idx] = best_depth;
        Vec3 n_cam = cam.R() * hit->normal;
        if (n_cam.dot(r) > 0.0) n_cam = -n_cam;  // face the camera
        gt.normal[idx] = n_cam;
        gt.best_cost[idx] = 0.0;
        gt.valid[idx] = 1;
      }
    }

    GrayImage gray = luma_from_rgb(rgb);
    char name[16];
    std::snprintf(name, sizeof(name), "%04d", ci);
    out.scene.views.push_back(SceneView{name, std::move(cam), std::move(rgb),
                                        std::move(gray)});
    out.gt.push_back(std::move(gt));
  }
  return out;
}

void write_synth_scene(const SynthScene& s, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "images");
  fs::create_directories(dir / "cams");
  fs::create_directories(dir / "gt");
  for (std::size_t i = 0; i < s.scene.views.size(); ++i) {
    const SceneView& view = s.scene.views[i];
    write_image(dir / "images" / (view.name + ".png"), view.rgb);
    write_camera_file(dir / "cams" / (view.name + ".txt"), view.cam);
    write_pfm(dir / "gt" / ("depth_" + view.name + ".pfm"),
              depth_to_pfm(s.gt[i]));
    write_pfm(dir / "gt" / ("normal_" + view.name + ".pfm"),
              normal_to_pfm(s.gt[i]));
  }
}

}  // namespace mvs
