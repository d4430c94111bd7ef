#include "mvs/scene_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "mvs/errors.hpp"

namespace mvs {

namespace fs = std::filesystem;

RgbImage read_image(const fs::path& path) {
  cv::Mat img = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (img.empty()) throw MissingFile("cannot read image: " + path.string());
  RgbImage out;
  out.width = img.cols;
  out.height = img.rows;
  out.rgb.resize(std::size_t(img.cols) * img.rows);
  for (int y = 0; y < img.rows; ++y)
    for (int x = 0; x < img.cols; ++x) {
      const cv::Vec3b bgr = img.at<cv::Vec3b>(y, x);
      out.at(x, y) = {bgr[2], bgr[1], bgr[0]};
    }
  return out;
}

void write_image(const fs::path& path, const RgbImage& rgb) {
  cv::Mat img(rgb.height, rgb.width, CV_8UC3);
  for (int y = 0; y < rgb.height; ++y)
    for (int x = 0; x < rgb.width; ++x) {
      const auto& c = rgb.at(x, y);
      img.at<cv::Vec3b>(y, x) = cv::Vec3b(c[2], c[1], c[0]);
    }
  if (!cv::imwrite(path.string(), img))
    throw MissingFile("cannot write image: " + path.string());
}

RgbImage resize_image(const RgbImage& rgb, double factor) {
  const int nw = std::max(1, int(std::lround(rgb.width * factor)));
  const int nh = std::max(1, int(std::lround(rgb.height * factor)));
  cv::Mat img(rgb.height, rgb.width, CV_8UC3);
  for (int y = 0; y < rgb.height; ++y)
    for (int x = 0; x < rgb.width; ++x) {
      const auto& c = rgb.at(x, y);
      img.at<cv::Vec3b>(y, x) = cv::Vec3b(c[2], c[1], c[0]);
    }
  cv::Mat resized;
  cv::resize(img, resized, cv::Size(nw, nh), 0, 0,
             factor < 1.0 ? cv::INTER_AREA : cv::INTER_LINEAR);
  RgbImage out;
  out.width = nw;
  out.height = nh;
  out.rgb.resize(std::size_t(nw) * nh);
  for (int y = 0; y < nh; ++y)
    for (int x = 0; x < nw; ++x) {
      const cv::Vec3b bgr = resized.at<cv::Vec3b>(y, x);
      out.at(x, y) = {bgr[2], bgr[1], bgr[0]};
    }
  return out;
}

CameraModel scale_camera(const CameraModel& cam, double factor, int new_width,
                         int new_height) {
  Mat3 K = cam.K();
  K(0, 0) *= factor;
  K(0, 1) *= factor;
  K(0, 2) *= factor;
  K(1, 1) *= factor;
  K(1, 2) *= factor;
  return CameraModel(K, cam.R(), cam.t(), new_width, new_height,
                     cam.depth_min(), cam.depth_max());
}

namespace {

CameraModel parse_camera_file(const fs::path& path, int width, int height) {
  std::ifstream in(path);
  if (!in) throw MissingFile("missing camera file: " + path.string());

  auto fail = [&](int line, const std::string& what) {
    std::ostringstream os;
    os << path.string() << ":" << line << ": " << what;
    throw MalformedCamera(os.str());
  };

  std::string tag;
  if (!(in >> tag) || tag != "extrinsic")
    fail(1, "expected 'extrinsic', got '" + tag + "'");
  Mat3 R;
  Vec3 t;
  for (int r = 0; r < 3; ++r)
    if (!(in >> R(r, 0) >> R(r, 1) >> R(r, 2) >> t(r)))
      fail(2 + r, "malformed [R|t] row");
  if (!(in >> tag) || tag != "intrinsic")
    fail(5, "expected 'intrinsic', got '" + tag + "'");
  Mat3 K;
  for (int r = 0; r < 3; ++r)
    if (!(in >> K(r, 0) >> K(r, 1) >> K(r, 2)))
      fail(6 + r, "malformed K row");
  double dmin, dmax;
  if (!(in >> dmin >> dmax)) fail(9, "malformed depth range");

  const Mat3 rtr = R.transpose() * R - Mat3::Identity();
  if (rtr.cwiseAbs().maxCoeff() > 1e-6)
    fail(2, "rotation not orthonormal (||R^T R - I|| > 1e-6)");
  // Text precision keeps R only approximately orthonormal; project it back.
  Eigen::JacobiSVD<Mat3> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  R = svd.matrixU() * svd.matrixV().transpose();
  if (R.determinant() < 0.0) fail(2, "rotation has negative determinant");

  if (!(dmin > 0.0 && dmin < dmax)) fail(9, "require 0 < depth_min < depth_max");
  if (K(0, 0) <= 0.0 || K(1, 1) <= 0.0 || K(2, 2) != 1.0)
    fail(6, "K must have positive focals and K(2,2)=1");
  if (K(0, 2) < 0.0 || K(0, 2) > width || K(1, 2) < 0.0 || K(1, 2) > height)
    throw DimensionMismatch(path.string() +
                            ": principal point outside the image extent");
  return CameraModel(K, R, t, width, height, dmin, dmax);
}

}  // namespace

Scene read_scene(const fs::path& dir) {
  const fs::path img_dir = dir / "images";
  const fs::path cam_dir = dir / "cams";
  if (!fs::is_directory(img_dir))
    throw MissingFile("missing directory: " + img_dir.string());
  if (!fs::is_directory(cam_dir))
    throw MissingFile("missing directory: " + cam_dir.string());

  std::vector<fs::path> image_files;
  for (const auto& e : fs::directory_iterator(img_dir)) {
    const std::string ext = e.path().extension().string();
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg")
      image_files.push_back(e.path());
  }
  std::sort(image_files.begin(), image_files.end());
  if (image_files.size() < 2)
    throw SceneTooSmall("scene needs at least 2 images, found " +
                        std::to_string(image_files.size()));

  Scene scene;
  scene.views.reserve(image_files.size());
  for (const fs::path& img_path : image_files) {
    const std::string stem = img_path.stem().string();
    RgbImage rgb = read_image(img_path);
    CameraModel cam =
        parse_camera_file(cam_dir / (stem + ".txt"), rgb.width, rgb.height);
    GrayImage gray = luma_from_rgb(rgb);
    scene.views.push_back(
        SceneView{stem, std::move(cam), std::move(rgb), std::move(gray)});
  }
  return scene;
}

void write_camera_file(const fs::path& path, const CameraModel& cam) {
  std::ofstream out(path);
  if (!out) throw MissingFile("cannot open for write: " + path.string());
  out.precision(17);
  out << "extrinsic\n";
  for (int r = 0; r < 3; ++r)
    out << cam.R()(r, 0) << ' ' << cam.R()(r, 1) << ' ' << cam.R()(r, 2) << ' '
        << cam.t()(r) << '\n';
  out << "intrinsic\n";
  for (int r = 0; r < 3; ++r)
    out << cam.K()(r, 0) << ' ' << cam.K()(r, 1) << ' ' << cam.K()(r, 2)
        << '\n';
  out << cam.depth_min() << ' ' << cam.depth_max() << '\n';
}

namespace {

void swap_float_bytes(float* data, std::size_t n) {
  auto* bytes = reinterpret_cast<std::uint8_t*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(bytes[4 * i + 0], bytes[4 * i + 3]);
    std::swap(bytes[4 * i + 1], bytes[4 * i + 2]);
  }
}

}  // namespace

Pfm read_pfm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile("missing PFM: " + path.string());

  std::string magic;
  in >> magic;
  Pfm pfm;
  if (magic == "Pf") pfm.channels = 1;
  else if (magic == "PF") pfm.channels = 3;
  else throw MalformedHeader(path.string() + ": bad PFM magic '" + magic + "'");

  double scale;
  if (!(in >> pfm.width >> pfm.height >> scale))
    throw MalformedHeader(path.string() + ": bad PFM dimensions/scale");
  if (pfm.width <= 0 || pfm.height <= 0 || scale == 0.0)
    throw MalformedHeader(path.string() + ": bad PFM dimensions/scale");
  in.get();  // single whitespace after the scale

  const std::size_t n = std::size_t(pfm.width) * pfm.height * pfm.channels;
  pfm.data.resize(n);
  // PFM rows are stored bottom-to-top.
  const std::size_t row_floats = std::size_t(pfm.width) * pfm.channels;
  for (int y = pfm.height - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(pfm.data.data() + y * row_floats),
            std::streamsize(row_floats * sizeof(float)));
    if (!in) throw MalformedHeader(path.string() + ": truncated PFM payload");
  }
  const bool file_little = scale < 0.0;
  if (file_little != (std::endian::native == std::endian::little))
    swap_float_bytes(pfm.data.data(), n);
  return pfm;
}

void write_pfm(const fs::path& path, const Pfm& pfm) {
  for (float v : pfm.data)
    if (!std::isfinite(v))
      throw std::invalid_argument("write_pfm: non-finite value");
  if (int(pfm.data.size()) != pfm.width * pfm.height * pfm.channels)
    throw std::invalid_argument("write_pfm: size mismatch");
  if (pfm.channels != 1 && pfm.channels != 3)
    throw std::invalid_argument("write_pfm: channels must be 1 or 3");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw MissingFile("cannot open for write: " + path.string());
  out << (pfm.channels == 1 ? "Pf" : "PF") << '\n'
      << pfm.width << ' ' << pfm.height << '\n'
      << "-1.0" << '\n';
  std::vector<float> row(std::size_t(pfm.width) * pfm.channels);
  const std::size_t row_floats = row.size();
  for (int y = pfm.height - 1; y >= 0; --y) {
    std::memcpy(row.data(), pfm.data.data() + y * row_floats,
                row_floats * sizeof(float));
    if (std::endian::native != std::endian::little)
      swap_float_bytes(row.data(), row_floats);
    out.write(reinterpret_cast<const char*>(row.data()),
              std::streamsize(row_floats * sizeof(float)));
  }
}

Pfm depth_to_pfm(const DepthNormalMap& map) {
  Pfm pfm;
  pfm.width = map.width;
  pfm.height = map.height;
  pfm.channels = 1;
  pfm.data.resize(map.depth.size());
  for (std::size_t i = 0; i < map.depth.size(); ++i)
    pfm.data[i] = map.valid[i] ? float(map.depth[i]) : 0.0f;
  return pfm;
}

Pfm normal_to_pfm(const DepthNormalMap& map) {
  Pfm pfm;
  pfm.width = map.width;
  pfm.height = map.height;
  pfm.channels = 3;
  pfm.data.resize(map.normal.size() * 3);
  for (std::size_t i = 0; i < map.normal.size(); ++i) {
    pfm.data[3 * i + 0] = float(map.normal[i].x());
    pfm.data[3 * i + 1] = float(map.normal[i].y());
    pfm.data[3 * i + 2] = float(map.normal[i].z());
  }
  return pfm;
}

Pfm cost_to_pfm(const DepthNormalMap& map) {
  Pfm pfm;
  pfm.width = map.width;
  pfm.height = map.height;
  pfm.channels = 1;
  pfm.data.resize(map.best_cost.size());
  for (std::size_t i = 0; i < map.best_cost.size(); ++i)
    pfm.data[i] = float(map.best_cost[i]);
  return pfm;
}

DepthNormalMap map_from_pfm(const Pfm& depth, const Pfm& normal,
                            const Pfm* cost) {
  if (depth.channels != 1 || normal.channels != 3)
    throw DimensionMismatch("map_from_pfm: depth must be 1-channel, normal 3");
  if (normal.width != depth.width || normal.height != depth.height ||
      (cost && (cost->width != depth.width || cost->height != depth.height)))
    throw DimensionMismatch("map_from_pfm: component sizes differ");

  DepthNormalMap map = DepthNormalMap::zeros(depth.width, depth.height);
  for (std::size_t i = 0; i < map.depth.size(); ++i) {
    map.depth[i] = depth.data[i];
    map.normal[i] = Vec3(normal.data[3 * i + 0], normal.data[3 * i + 1],
                         normal.data[3 * i + 2]);
    map.best_cost[i] = cost ? cost->data[i] : 0.0;
    const bool ok = cost ? (cost->data[i] < 2.0f)
                         : (std::isfinite(depth.data[i]) && depth.data[i] > 0);
    map.valid[i] = ok && depth.data[i] > 0 ? 1 : 0;
  }
  return map;
}

void write_ply(const fs::path& path, std::span<const FusedPoint> points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MissingFile("cannot open for write: " + path.string());
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << points.size() << '\n'
      << "property float x\nproperty float y\nproperty float z\n"
      << "property float nx\nproperty float ny\nproperty float nz\n"
      << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
      << "end_header\n";
  for (const FusedPoint& p : points) {
    float buf[6] = {float(p.position.x()), float(p.position.y()),
                    float(p.position.z()), float(p.normal.x()),
                    float(p.normal.y()),   float(p.normal.z())};
    if (std::endian::native != std::endian::little)
      swap_float_bytes(buf, 6);
    out.write(reinterpret_cast<const char*>(buf), sizeof(buf));
    out.write(reinterpret_cast<const char*>(p.color.data()), 3);
  }
}

std::vector<FusedPoint> read_ply(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile("missing PLY: " + path.string());

  std::string line;
  std::size_t count = 0;
  bool little = true;
  std::vector<std::string> props;
  if (!std::getline(in, line) || line != "ply")
    throw MalformedHeader(path.string() + ": not a PLY file");
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word == "format") {
      ss >> word;
      if (word == "binary_little_endian") little = true;
      else if (word == "binary_big_endian") little = false;
      else throw MalformedHeader(path.string() + ": unsupported PLY format");
    } else if (word == "element") {
      std::string kind;
      ss >> kind >> count;
      if (kind != "vertex")
        throw MalformedHeader(path.string() + ": unsupported PLY element");
    } else if (word == "property") {
      std::string type, name;
      ss >> type >> name;
      props.push_back(name);
    } else if (word == "end_header") {
      break;
    }
  }
  const std::vector<std::string> expected = {"x",  "y",  "z",   "nx",   "ny",
                                             "nz", "red", "green", "blue"};
  if (props != expected)
    throw MalformedHeader(path.string() + ": unsupported PLY layout");

  std::vector<FusedPoint> points(count);
  for (FusedPoint& p : points) {
    float buf[6];
    in.read(reinterpret_cast<char*>(buf), sizeof(buf));
    std::uint8_t color[3];
    in.read(reinterpret_cast<char*>(color), 3);
    if (!in) throw MalformedHeader(path.string() + ": truncated PLY payload");
    if (little != (std::endian::native == std::endian::little))
      swap_float_bytes(buf, 6);
    p.position = Vec3(buf[0], buf[1], buf[2]);
    p.normal = Vec3(buf[3], buf[4], buf[5]);
    p.color = {color[0], color[1], color[2]};
    p.support = 0;  // not serialized
  }
  return points;
}

}  // namespace mvs
