#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mvs/errors.hpp"
#include "mvs/eval.hpp"
#include "mvs/fusion.hpp"
#include "mvs/scene_io.hpp"
#include "mvs/solver.hpp"
#include "mvs/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct EstimateOptions {
  std::string scene_dir;
  std::string out_dir;
  double downsample = 1.0;
  std::string scheme = "acp";
  std::string config_file;
  mvs::SolverConfig solver;
};

mvs::PropagationScheme parse_scheme(const std::string& s) {
  if (s == "acp") return mvs::PropagationScheme::Asymmetric;
  if (s == "scp") return mvs::PropagationScheme::Symmetric;
  throw CLI::ValidationError("--scheme", "must be 'acp' or 'scp'");
}

// Flat JSON config; every key must be known so typos cannot silently skew an
// experiment.
void apply_config(const std::string& path, mvs::SolverConfig* cfg,
                  std::string* scheme) {
  std::ifstream in(path);
  if (!in) throw mvs::MissingFile("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("config parse error: " + std::string(e.what()));
  }
  if (!j.is_object()) throw std::runtime_error("config must be a JSON object");

  for (const auto& [key, value] : j.items()) {
    if (key == "iterations") cfg->iterations = value.get<int>();
    else if (key == "seed") cfg->seed = value.get<std::uint64_t>();
    else if (key == "threads") cfg->threads = value.get<int>();
    else if (key == "scheme") *scheme = value.get<std::string>();
    else if (key == "window_radius") cfg->window.radius = value.get<int>();
    else if (key == "window_skip") cfg->window.skip = value.get<int>();
    else if (key == "sigma_i") cfg->sigma_I = value.get<double>();
    else if (key == "sigma_x") cfg->sigma_x = value.get<double>();
    else if (key == "tau_mc_init") cfg->viewsel.tau_mc_init = value.get<double>();
    else if (key == "alpha") cfg->viewsel.alpha = value.get<double>();
    else if (key == "beta") cfg->viewsel.beta = value.get<double>();
    else if (key == "n1") cfg->viewsel.n1 = value.get<int>();
    else if (key == "n2") cfg->viewsel.n2 = value.get<int>();
    else if (key == "tau_up") cfg->viewsel.tau_up = value.get<double>();
    else if (key == "k") cfg->viewsel.k = value.get<int>();
    else if (key == "broadcast_unselected_fallback")
      cfg->viewsel.broadcast_unselected_fallback = value.get<bool>();
    else if (key == "bisection_iters")
      cfg->refinement.bisection_iters = value.get<int>();
    else if (key == "depth_frac") cfg->refinement.depth_frac = value.get<double>();
    else if (key == "angle_max") cfg->refinement.angle_max = value.get<double>();
    else
      throw std::runtime_error("config: unknown key '" + key + "'");
  }
}

mvs::Scene load_scene_scaled(const std::string& dir, double factor) {
  mvs::Scene scene = mvs::read_scene(dir);
  if (factor == 1.0) return scene;
  mvs::Scene scaled;
  for (const mvs::SceneView& view : scene.views) {
    mvs::RgbImage rgb = mvs::resize_image(view.rgb, factor);
    mvs::CameraModel cam =
        mvs::scale_camera(view.cam, factor, rgb.width, rgb.height);
    mvs::GrayImage gray = mvs::luma_from_rgb(rgb);
    scaled.views.push_back(mvs::SceneView{view.name, std::move(cam),
                                          std::move(rgb), std::move(gray)});
  }
  return scaled;
}

int cmd_estimate(const EstimateOptions& opt) {
  mvs::SolverConfig cfg = opt.solver;
  cfg.scheme = parse_scheme(opt.scheme);

  const mvs::Scene scene = load_scene_scaled(opt.scene_dir, opt.downsample);
  fs::create_directories(opt.out_dir);

  double total = 0.0;
  for (int ref = 0; ref < int(scene.views.size()); ++ref) {
    const auto start = std::chrono::steady_clock::now();
    const mvs::DepthNormalMap map = mvs::estimate_depth_map(scene, ref, cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    total += secs;

    const std::string& name = scene.views[ref].name;
    const fs::path out(opt.out_dir);
    mvs::write_pfm(out / ("depth_" + name + ".pfm"), mvs::depth_to_pfm(map));
    mvs::write_pfm(out / ("normal_" + name + ".pfm"), mvs::normal_to_pfm(map));
    mvs::write_pfm(out / ("cost_" + name + ".pfm"), mvs::cost_to_pfm(map));
    std::printf("image %s: solved in %.3f s\n", name.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("total solve time: %.3f s (%zu images)\n", total,
              scene.views.size());
  return 0;
}

std::vector<mvs::DepthNormalMap> load_maps(const mvs::Scene& scene,
                                           const fs::path& maps_dir) {
  std::vector<mvs::DepthNormalMap> maps;
  for (const mvs::SceneView& view : scene.views) {
    const fs::path depth_path = maps_dir / ("depth_" + view.name + ".pfm");
    const fs::path normal_path = maps_dir / ("normal_" + view.name + ".pfm");
    const fs::path cost_path = maps_dir / ("cost_" + view.name + ".pfm");
    const mvs::Pfm depth = mvs::read_pfm(depth_path);
    const mvs::Pfm normal = mvs::read_pfm(normal_path);
    if (fs::exists(cost_path)) {
      const mvs::Pfm cost = mvs::read_pfm(cost_path);
      maps.push_back(mvs::map_from_pfm(depth, normal, &cost));
    } else {
      maps.push_back(mvs::map_from_pfm(depth, normal, nullptr));
    }
    if (maps.back().width != view.cam.width() ||
        maps.back().height != view.cam.height())
      throw mvs::DimensionMismatch("map size differs from image size: " +
                                   depth_path.string());
  }
  return maps;
}

int cmd_fuse(const std::string& scene_dir, const std::string& maps_dir,
             const std::string& out_file, const mvs::FusionParams& params) {
  const mvs::Scene scene = mvs::read_scene(scene_dir);
  const std::vector<mvs::DepthNormalMap> maps = load_maps(scene, maps_dir);

  const std::vector<mvs::FusedPoint> points =
      mvs::fuse(scene, maps, params);
  if (points.empty())
    std::fprintf(stderr, "warning: consistency check rejected every pixel\n");
  mvs::write_ply(out_file, points);

  std::map<int, std::size_t> histogram;
  for (const mvs::FusedPoint& p : points) ++histogram[p.support];
  std::printf("fused %zu points -> %s\n", points.size(), out_file.c_str());
  std::printf("consistent-view histogram:\n");
  for (const auto& [support, count] : histogram)
    std::printf("  %d views: %zu points\n", support, count);
  return 0;
}

int cmd_synth(const std::string& spec_file, const std::string& out_dir) {
  const mvs::SynthSpec spec = mvs::parse_synth_spec(spec_file);
  const mvs::SynthScene synth = mvs::synth_scene(spec);
  mvs::write_synth_scene(synth, out_dir);
  std::printf("rendered %zu views of %zu planes -> %s\n",
              synth.scene.views.size(), spec.planes.size(), out_dir.c_str());
  return 0;
}

struct EvalOptions {
  std::string est_dir;
  std::string gt_dir;
  std::string curve_file;
  std::string scene_dir;
  std::string scheme = "acp";
  std::string config_file;
  mvs::SolverConfig solver;
};

std::vector<mvs::DepthNormalMap> load_gt_maps(const fs::path& gt_dir,
                                              std::vector<std::string>* names) {
  std::vector<fs::path> depth_files;
  for (const auto& e : fs::directory_iterator(gt_dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("depth_", 0) == 0 && e.path().extension() == ".pfm")
      depth_files.push_back(e.path());
  }
  std::sort(depth_files.begin(), depth_files.end());
  if (depth_files.empty())
    throw mvs::MissingFile("no depth_*.pfm in " + gt_dir.string());

  std::vector<mvs::DepthNormalMap> maps;
  for (const fs::path& p : depth_files) {
    const std::string stem = p.stem().string().substr(6);  // after "depth_"
    const mvs::Pfm depth = mvs::read_pfm(p);
    const mvs::Pfm normal =
        mvs::read_pfm(p.parent_path() / ("normal_" + stem + ".pfm"));
    const fs::path cost_path = p.parent_path() / ("cost_" + stem + ".pfm");
    if (fs::exists(cost_path)) {
      const mvs::Pfm cost = mvs::read_pfm(cost_path);
      maps.push_back(mvs::map_from_pfm(depth, normal, &cost));
    } else {
      maps.push_back(mvs::map_from_pfm(depth, normal, nullptr));
    }
    if (names) names->push_back(stem);
  }
  return maps;
}

int cmd_eval(const EvalOptions& opt) {
  const std::vector<double> thresholds = {0.005, 0.01, 0.02, 0.05};

  std::vector<std::string> names;
  const std::vector<mvs::DepthNormalMap> gt = load_gt_maps(opt.gt_dir, &names);
  std::vector<mvs::DepthNormalMap> est;
  for (const std::string& name : names) {
    const mvs::Pfm depth =
        mvs::read_pfm(fs::path(opt.est_dir) / ("depth_" + name + ".pfm"));
    const mvs::Pfm normal =
        mvs::read_pfm(fs::path(opt.est_dir) / ("normal_" + name + ".pfm"));
    const fs::path cost_path =
        fs::path(opt.est_dir) / ("cost_" + name + ".pfm");
    if (fs::exists(cost_path)) {
      const mvs::Pfm cost = mvs::read_pfm(cost_path);
      est.push_back(mvs::map_from_pfm(depth, normal, &cost));
    } else {
      est.push_back(mvs::map_from_pfm(depth, normal, nullptr));
    }
  }

  std::printf("%-8s", "image");
  for (double tau : thresholds) std::printf("  <%4.1f%%", tau * 100.0);
  std::printf("  %s\n", "complete");
  std::vector<double> mean(thresholds.size(), 0.0);
  double mean_complete = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const mvs::DepthErrorStats stats = mvs::depth_error_stats(
        est[i], gt[i], thresholds, mvs::ErrorKind::Relative);
    std::printf("%-8s", names[i].c_str());
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      std::printf("  %5.1f", stats.fraction[k] * 100.0);
      mean[k] += stats.fraction[k];
    }
    std::printf("  %7.1f\n", stats.completeness * 100.0);
    mean_complete += stats.completeness;
  }
  std::printf("%-8s", "mean");
  for (double m : mean) std::printf("  %5.1f", m / double(est.size()) * 100.0);
  std::printf("  %7.1f\n", mean_complete / double(est.size()) * 100.0);

  if (!opt.curve_file.empty()) {
    if (opt.scene_dir.empty())
      throw std::runtime_error("--curve requires --scene to run the solver");
    const mvs::Scene scene = mvs::read_scene(opt.scene_dir);
    if (scene.views.size() != gt.size())
      throw mvs::DimensionMismatch("scene/GT view counts differ");

    std::vector<int> refs(scene.views.size());
    for (std::size_t i = 0; i < refs.size(); ++i) refs[i] = int(i);

    std::vector<mvs::CurvePoint> points;
    for (const auto scheme : {mvs::PropagationScheme::Asymmetric,
                              mvs::PropagationScheme::Symmetric}) {
      const auto part = mvs::convergence_curve(scene, gt, opt.solver, scheme,
                                               thresholds, refs);
      points.insert(points.end(), part.begin(), part.end());
    }
    mvs::write_curve_csv(opt.curve_file, points);
    std::printf("wrote convergence curve: %s\n", opt.curve_file.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PatchMatch multi-view stereo: depth maps, fusion, synthetic "
               "scenes and evaluation"};
  app.require_subcommand(1);

  EstimateOptions est;
  CLI::App* estimate =
      app.add_subcommand("estimate", "Estimate depth/normal maps per image");
  estimate->add_option("--scene", est.scene_dir, "Scene directory")->required();
  estimate->add_option("--out", est.out_dir, "Output directory")->required();
  estimate->add_option("--iters", est.solver.iterations, "Solver iterations");
  estimate->add_option("--downsample", est.downsample,
                       "Scale images and intrinsics by this factor");
  estimate->add_option("--scheme", est.scheme, "Propagation scheme: acp|scp");
  estimate->add_option("--seed", est.solver.seed, "Random seed");
  estimate->add_option("--threads", est.solver.threads, "Worker thread cap");
  estimate->add_option("--config", est.config_file, "JSON config file");

  std::string fuse_scene, fuse_maps, fuse_out;
  mvs::FusionParams fusion;
  double feps = -1.0, fscale = -1.0;
  CLI::App* fuse = app.add_subcommand("fuse", "Fuse depth maps to a PLY cloud");
  fuse->add_option("--scene", fuse_scene, "Scene directory")->required();
  fuse->add_option("--maps", fuse_maps, "Directory of depth/normal PFMs")
      ->required();
  fuse->add_option("--out", fuse_out, "Output PLY file")->required();
  fuse->add_option("--frel", fusion.f_rel_depth, "Relative depth threshold");
  fuse->add_option("--fang", fusion.f_ang_deg, "Normal angle threshold, deg");
  fuse->add_option("--fcon", fusion.f_con, "Required consistent views");
  fuse->add_option("--feps", feps, "Disparity threshold (with --fscale)");
  fuse->add_option("--fscale", fscale, "Baseline*focal disparity scale");

  std::string synth_spec, synth_out;
  CLI::App* synth =
      app.add_subcommand("synth", "Render a synthetic scene with ground truth");
  synth->add_option("--spec", synth_spec, "Scene spec JSON")->required();
  synth->add_option("--out", synth_out, "Output directory")->required();

  EvalOptions eval;
  CLI::App* evalc = app.add_subcommand("eval", "Evaluate depth maps against GT");
  evalc->add_option("--est", eval.est_dir, "Estimated maps directory")
      ->required();
  evalc->add_option("--gt", eval.gt_dir, "Ground-truth maps directory")
      ->required();
  evalc->add_option("--curve", eval.curve_file,
                    "Write an ACP-vs-SCP convergence CSV here");
  evalc->add_option("--scene", eval.scene_dir,
                    "Scene directory (required with --curve)");
  evalc->add_option("--seed", eval.solver.seed, "Random seed for --curve");
  evalc->add_option("--iters", eval.solver.iterations,
                    "Solver iterations for --curve");
  evalc->add_option("--threads", eval.solver.threads, "Worker thread cap");
  evalc->add_option("--config", eval.config_file, "JSON config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (*estimate) {
      if (!est.config_file.empty()) {
        // Precedence: defaults < config file < explicit flags.
        const int iters_flag = est.solver.iterations;
        const std::uint64_t seed_flag = est.solver.seed;
        const int threads_flag = est.solver.threads;
        const std::string scheme_flag = est.scheme;
        try {
          apply_config(est.config_file, &est.solver, &est.scheme);
        } catch (const mvs::MissingFile&) {
          throw;
        } catch (const std::exception& e) {
          std::fprintf(stderr, "error: %s\n", e.what());
          return 2;
        }
        if (estimate->count("--iters")) est.solver.iterations = iters_flag;
        if (estimate->count("--seed")) est.solver.seed = seed_flag;
        if (estimate->count("--threads")) est.solver.threads = threads_flag;
        if (estimate->count("--scheme")) est.scheme = scheme_flag;
      }
      if (est.downsample <= 0.0 || est.downsample > 8.0) {
        std::fprintf(stderr, "error: --downsample out of range\n");
        return 2;
      }
      parse_scheme(est.scheme);
      return cmd_estimate(est);
    }
    if (*fuse) {
      if (feps > 0.0) fusion.f_eps_disparity = feps;
      if (fscale > 0.0) fusion.disparity_scale = fscale;
      return cmd_fuse(fuse_scene, fuse_maps, fuse_out, fusion);
    }
    if (*synth) return cmd_synth(synth_spec, synth_out);
    if (*evalc) {
      if (!eval.config_file.empty()) {
        std::string scheme = "acp";
        try {
          apply_config(eval.config_file, &eval.solver, &scheme);
        } catch (const mvs::MissingFile&) {
          throw;
        } catch (const std::exception& e) {
          std::fprintf(stderr, "error: %s\n", e.what());
          return 2;
        }
      }
      return cmd_eval(eval);
    }
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
