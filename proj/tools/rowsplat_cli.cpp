// SPDX-License-Identifier: Apache-2.0
//
// rowsplat — CPU renderer and analysis toolkit for Gaussian splat scenes.
// Subcommands: render, compare, cachesim, psnr, synth.

#include <rowsplat/irss_core.hpp>
#include <rowsplat/perf_model.hpp>
#include <rowsplat/scene_io.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

using nlohmann::ordered_json;
using namespace rowsplat;

constexpr const char* kVersion = ROWSPLAT_VERSION;

void write_json(const ordered_json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open stats file for writing: " + path);
  }
  out << doc.dump(2) << "\n";
}

ordered_json config_echo(const RenderConfig& config) {
  return ordered_json{{"precision", to_string(config.precision)},
                      {"chunk_size", config.chunk_size},
                      {"alpha_min", config.alpha_min},
                      {"alpha_clamp", config.alpha_clamp},
                      {"transmittance_stop", config.transmittance_stop},
                      {"transform1_only_flops", config.transform1_only_flops},
                      {"background", {config.background[0], config.background[1],
                                      config.background[2]}},
                      {"tile_size", kTileSize},
                      {"tile_order", "row-major"}};
}

ordered_json counters_json(const FlopCounters& c) {
  return ordered_json{{"exponent_flops", c.exponent_flops},
                      {"blend_flops", c.blend_flops},
                      {"fragments_evaluated", c.fragments_evaluated},
                      {"fragments_significant", c.fragments_significant},
                      {"fragments_skipped", c.fragments_skipped},
                      {"rows_skipped", c.rows_skipped},
                      {"gaussians_skipped", c.gaussians_skipped},
                      {"row_segments", c.row_segments}};
}

ordered_json perf_json(const PerfReport& perf) {
  ordered_json doc{{"frame_steps_lockstep_proxy", perf.frame_steps_lockstep_proxy},
                   {"frame_steps_rowpe", perf.frame_steps_rowpe},
                   {"lockstep_lane_steps", perf.lockstep_lane_steps},
                   {"lockstep_lane_step_budget", perf.lockstep_lane_step_budget},
                   {"speedup_proxy", perf.speedup_proxy}};
  if (perf.utilization.has_value()) {
    doc["utilization"] = *perf.utilization;
  } else {
    doc["utilization"] = nullptr;
  }
  return doc;
}

ordered_json header_json(const std::string& command) {
  return ordered_json{{"tool", "rowsplat"}, {"version", kVersion}, {"command", command}};
}

void write_image_by_extension(const ImageBuffer& image, const std::string& path) {
  if (path.ends_with(".ppm")) {
    write_ppm(image, path);
  } else if (path.ends_with(".png")) {
    write_png(image, path);
  } else if (path.ends_with(".pfm")) {
    write_pfm(image, path);
  } else {
    throw DataError("unsupported image extension (want .ppm/.png/.pfm): " + path);
  }
}

std::string format_psnr(double db) {
  if (std::isinf(db)) {
    return "inf";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", db);
  return buf;
}

struct RenderArgs {
  std::string scene_path;
  std::string camera_path;
  std::string dataflow = "irss";
  std::string precision = "fp32";
  std::string out_path;
  std::string stats_path;
  std::string row_work_path;
  std::size_t chunk_size = 0;
  bool transform1_flops = false;
  std::vector<float> background{0.0f, 0.0f, 0.0f};
};

RenderConfig to_config(const RenderArgs& args) {
  RenderConfig config;
  config.precision = precision_from_string(args.precision);
  config.chunk_size = args.chunk_size;
  config.transform1_only_flops = args.transform1_flops;
  config.background = Eigen::Vector3f(args.background.at(0), args.background.at(1),
                                      args.background.at(2));
  return config;
}

int cmd_render(const RenderArgs& args) {
  const Scene scene = load_ply(args.scene_path);
  const Camera camera = load_camera(args.camera_path);
  const RenderConfig config = to_config(args);
  const Dataflow dataflow = dataflow_from_string(args.dataflow);

  ordered_json stats = header_json("render");
  stats["scene"] = args.scene_path;
  stats["camera"] = args.camera_path;
  stats["dataflow"] = args.dataflow;
  stats["config"] = config_echo(config);
  stats["image"] = {{"width", camera.width}, {"height", camera.height}};
  stats["gaussians"] = scene.size();

  if (dataflow == Dataflow::kPfs) {
    const PfsResult result = render_pfs(scene, camera, config);
    if (!args.out_path.empty()) {
      write_image_by_extension(result.image, args.out_path);
    }
    stats["counters"] = counters_json(result.counters);
    stats["lockstep"] = {{"lane_steps", result.lockstep.lane_steps},
                         {"useful_lane_steps", result.lockstep.useful_lane_steps},
                         {"useful_fraction", result.lockstep.useful_fraction()}};
    std::cout << "rendered " << args.scene_path << " [pfs/" << args.precision << "]: "
              << result.counters.fragments_significant << " of "
              << result.counters.fragments_evaluated << " fragments significant\n";
  } else {
    const IrssResult result = render_irss(scene, camera, config);
    if (!args.out_path.empty()) {
      write_image_by_extension(result.image, args.out_path);
    }
    stats["counters"] = counters_json(result.counters);
    stats["perf"] = perf_json(tile_engine_steps(result.row_work));
    if (!args.row_work_path.empty()) {
      save_row_work_stats(result.row_work, args.row_work_path);
    }
    std::cout << "rendered " << args.scene_path << " [irss/" << args.precision << "]: "
              << result.counters.fragments_evaluated << " fragments shaded, "
              << result.counters.rows_skipped << " rows skipped\n";
  }
  if (!args.stats_path.empty()) {
    write_json(stats, args.stats_path);
  }
  return 0;
}

struct CompareArgs {
  std::string scene_path;
  std::string camera_path;
  std::string precision = "fp32";
  std::string stats_path;
  std::size_t chunk_size = 0;
};

int cmd_compare(const CompareArgs& args) {
  const Scene scene = load_ply(args.scene_path);
  const Camera camera = load_camera(args.camera_path);
  RenderConfig config;
  config.precision = precision_from_string(args.precision);
  config.chunk_size = args.chunk_size;

  const PfsResult pfs = render_pfs(scene, camera, config);
  const IrssResult irss = render_irss(scene, camera, config);

  RenderConfig t1 = config;
  t1.transform1_only_flops = true;
  const IrssResult irss_t1 = render_irss(scene, camera, t1);

  const double psnr = psnr_db(pfs.image, irss.image);
  const double fragments = static_cast<double>(irss.counters.fragments_evaluated);
  const double segments = static_cast<double>(irss.counters.row_segments);
  // Sharing-only ratio: cost of the same fragments under per-fragment direct
  // evaluation vs the row-shared counters. 11F / (11S + 2(F-S)).
  const double sharing_ratio =
      irss.counters.exponent_flops
          ? 11.0 * fragments / static_cast<double>(irss.counters.exponent_flops)
          : 1.0;
  const double sharing_ratio_t1 =
      irss_t1.counters.exponent_flops
          ? 11.0 * fragments / static_cast<double>(irss_t1.counters.exponent_flops)
          : 1.0;
  const double total_ratio =
      irss.counters.exponent_flops
          ? static_cast<double>(pfs.counters.exponent_flops) /
                static_cast<double>(irss.counters.exponent_flops)
          : 0.0;
  const double reduction =
      pfs.counters.fragments_evaluated
          ? 1.0 - fragments / static_cast<double>(pfs.counters.fragments_evaluated)
          : 0.0;
  const PerfReport perf = tile_engine_steps(irss.row_work);

  ordered_json stats = header_json("compare");
  stats["scene"] = args.scene_path;
  stats["camera"] = args.camera_path;
  stats["config"] = config_echo(config);
  stats["psnr_db"] = std::isinf(psnr) ? ordered_json("inf") : ordered_json(psnr);
  stats["max_channel_difference"] = max_channel_difference(pfs.image, irss.image);
  stats["exponent_flop_ratio_same_fragments"] = sharing_ratio;
  stats["exponent_flop_ratio_same_fragments_transform1"] = sharing_ratio_t1;
  stats["exponent_flop_ratio_total"] = total_ratio;
  stats["evaluated_fragment_reduction"] = reduction;
  stats["mean_row_segment_length"] = segments ? fragments / segments : 0.0;
  stats["pfs"] = counters_json(pfs.counters);
  stats["pfs"]["useful_lane_fraction"] = pfs.lockstep.useful_fraction();
  stats["irss"] = counters_json(irss.counters);
  stats["perf"] = perf_json(perf);
  if (!args.stats_path.empty()) {
    write_json(stats, args.stats_path);
  }

  std::cout << "psnr_db " << format_psnr(psnr) << "\n";
  std::cout << "exponent_flop_ratio_same_fragments " << sharing_ratio << "\n";
  std::cout << "exponent_flop_ratio_total " << total_ratio << "\n";
  std::cout << "evaluated_fragment_reduction " << reduction << "\n";
  std::cout << "rows_skipped " << irss.counters.rows_skipped << "\n";
  if (perf.utilization.has_value()) {
    std::cout << "simt_utilization " << *perf.utilization << "\n";
  }
  return 0;
}

struct CacheSimArgs {
  std::string scene_path;
  std::string camera_path;
  std::string trace_path;       // pre-recorded trace instead of scene+camera
  std::string save_trace_path;  // optional trace CSV output
  std::string curve_path;       // capacity sweep CSV
  std::string stats_path;
  std::vector<std::size_t> capacities{4096, 8192, 16384, 32768, 65536};
  std::vector<std::string> policies{"rd", "lru"};
  std::size_t line_bytes = 48;
  bool coarse = false;  // default: refined (exact-test) trace
};

int cmd_cachesim(const CacheSimArgs& args) {
  CacheTrace trace;
  if (!args.trace_path.empty()) {
    trace = load_trace_csv(args.trace_path);
  } else {
    const Scene scene = load_ply(args.scene_path);
    const Camera camera = load_camera(args.camera_path);
    const auto splats = project_scene(scene, camera);
    TileWorklist worklist = bin_coarse(splats, camera.width, camera.height);
    sort_tiles(worklist);
    trace = emit_access_trace(worklist, splats, !args.coarse);
  }
  if (!args.save_trace_path.empty()) {
    save_trace_csv(trace, args.save_trace_path);
  }
  trace = precompute_reuse_distances(std::move(trace));

  ordered_json stats = header_json("cachesim");
  stats["accesses"] = trace.accesses.size();
  stats["line_bytes"] = args.line_bytes;
  stats["tile_order"] = "row-major";
  ordered_json runs = ordered_json::array();

  std::ofstream curve;
  if (!args.curve_path.empty()) {
    curve.open(args.curve_path);
    if (!curve) {
      throw IoError("cannot open curve file for writing: " + args.curve_path);
    }
    curve << "capacity_bytes,policy,hit_rate\n";
  }

  for (const std::string& policy_name : args.policies) {
    CacheConfig config;
    config.policy = cache_policy_from_string(policy_name);
    config.line_bytes = args.line_bytes;
    for (const std::size_t capacity : args.capacities) {
      config.capacity_bytes = capacity;
      const CacheStats s = simulate(trace, config);
      runs.push_back(ordered_json{{"policy", policy_name},
                                  {"capacity", capacity},
                                  {"accesses", s.accesses},
                                  {"hits", s.hits},
                                  {"misses", s.misses},
                                  {"bytes", s.bytes_read},
                                  {"hit_rate", s.hit_rate()}});
      if (curve.is_open()) {
        curve << capacity << "," << policy_name << "," << s.hit_rate() << "\n";
      }
      std::cout << policy_name << " " << capacity << " B: hit_rate " << s.hit_rate()
                << " bytes " << s.bytes_read << "\n";
    }
  }

  // Off-chip traffic reduction of the reuse-distance policy at the largest
  // capacity, against no cache at all.
  CacheConfig none;
  none.policy = CachePolicy::kNone;
  none.line_bytes = args.line_bytes;
  const CacheStats base = simulate(trace, none);
  CacheConfig best;
  best.policy = CachePolicy::kReuseDistance;
  best.line_bytes = args.line_bytes;
  best.capacity_bytes = args.capacities.empty() ? 32768 : args.capacities.back();
  const CacheStats rd = simulate(trace, best);
  const double traffic_reduction =
      base.bytes_read ? 1.0 - static_cast<double>(rd.bytes_read) /
                                  static_cast<double>(base.bytes_read)
                      : 0.0;
  stats["runs"] = std::move(runs);
  stats["traffic_reduction_vs_no_cache"] = traffic_reduction;
  std::cout << "traffic_reduction_vs_no_cache " << traffic_reduction << "\n";

  if (!args.stats_path.empty()) {
    write_json(stats, args.stats_path);
  }
  return 0;
}

int cmd_psnr(const std::string& image_a, const std::string& image_b) {
  const FloatImage a = read_image(image_a);
  const FloatImage b = read_image(image_b);
  std::cout << format_psnr(psnr_db(a, b)) << "\n";
  return 0;
}

struct SynthArgs {
  std::size_t count = 10000;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string camera_out_path;
  std::vector<double> scale_range{0.009, 0.055};
  std::vector<double> opacity_range{0.15, 0.95};
  std::vector<float> extent{-7.0f, -5.0f, 8.0f, 7.0f, 5.0f, 20.0f};
  double anisotropy = 7.0;
  int sh_degree = 3;
  int width = 640;
  int height = 480;
  float focal = 500.0f;
};

int cmd_synth(const SynthArgs& args) {
  SyntheticConfig cfg;
  cfg.count = args.count;
  cfg.seed = args.seed;
  cfg.scale_min = args.scale_range.at(0);
  cfg.scale_max = args.scale_range.at(1);
  cfg.opacity_min = args.opacity_range.at(0);
  cfg.opacity_max = args.opacity_range.at(1);
  cfg.extent_min = Eigen::Vector3f(args.extent.at(0), args.extent.at(1), args.extent.at(2));
  cfg.extent_max = Eigen::Vector3f(args.extent.at(3), args.extent.at(4), args.extent.at(5));
  cfg.max_anisotropy = args.anisotropy;
  cfg.sh_degree = args.sh_degree;

  const Scene scene = synthetic_scene(cfg);
  write_ply(scene, args.out_path);
  std::cout << "wrote " << scene.size() << " gaussians to " << args.out_path << "\n";

  if (!args.camera_out_path.empty()) {
    Camera cam;
    cam.fx = cam.fy = args.focal;
    cam.cx = static_cast<float>(args.width) / 2.0f;
    cam.cy = static_cast<float>(args.height) / 2.0f;
    cam.width = args.width;
    cam.height = args.height;
    cam.near_z = 0.2f;
    cam.far_z = 100.0f;
    save_camera(cam, args.camera_out_path);
    std::cout << "wrote camera to " << args.camera_out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CPU renderer and analysis toolkit for Gaussian splat scenes"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RenderArgs render_args;
  CLI::App* render = app.add_subcommand("render", "Render a scene with one dataflow");
  render->add_option("--scene", render_args.scene_path, "Scene PLY")->required();
  render->add_option("--camera", render_args.camera_path, "Camera JSON")->required();
  render->add_option("--dataflow", render_args.dataflow, "pfs | irss")
      ->check(CLI::IsMember({"pfs", "irss"}));
  render->add_option("--precision", render_args.precision,
                     "fp32 | fp64-accum | fp16-emulated")
      ->check(CLI::IsMember({"fp32", "fp64-accum", "fp16-emulated"}));
  render->add_option("--out", render_args.out_path, "Output image (.ppm/.png/.pfm)");
  render->add_option("--stats", render_args.stats_path, "Stats JSON path");
  render->add_option("--row-work", render_args.row_work_path,
                     "Row work stats JSON (irss only)");
  render->add_option("--chunk-size", render_args.chunk_size,
                     "Depth-order chunk size (0 = unchunked)");
  render->add_flag("--transform1-flops", render_args.transform1_flops,
                   "Account 3 FLOPs per shared fragment (whitening only)");
  render->add_option("--background", render_args.background, "Background RGB")
      ->expected(3);

  CompareArgs compare_args;
  CLI::App* compare = app.add_subcommand("compare", "Render with both dataflows and report");
  compare->add_option("--scene", compare_args.scene_path, "Scene PLY")->required();
  compare->add_option("--camera", compare_args.camera_path, "Camera JSON")->required();
  compare->add_option("--precision", compare_args.precision, "fp32 | fp64-accum | fp16-emulated")
      ->check(CLI::IsMember({"fp32", "fp64-accum", "fp16-emulated"}));
  compare->add_option("--stats", compare_args.stats_path, "Report JSON path");
  compare->add_option("--chunk-size", compare_args.chunk_size, "Depth-order chunk size");

  CacheSimArgs cache_args;
  CLI::App* cachesim = app.add_subcommand("cachesim", "Trace-driven reuse cache simulation");
  cachesim->add_option("--scene", cache_args.scene_path, "Scene PLY");
  cachesim->add_option("--camera", cache_args.camera_path, "Camera JSON");
  cachesim->add_option("--trace", cache_args.trace_path, "Pre-recorded trace CSV");
  cachesim->add_option("--save-trace", cache_args.save_trace_path, "Write the trace CSV here");
  cachesim->add_option("--capacities", cache_args.capacities, "Capacities in bytes")
      ->delimiter(',');
  cachesim->add_option("--policy", cache_args.policies, "rd | lru | opt | none")->delimiter(',');
  cachesim->add_option("--line-bytes", cache_args.line_bytes, "Gaussian feature record size");
  cachesim->add_option("--curve", cache_args.curve_path, "Sweep CSV path");
  cachesim->add_option("--stats", cache_args.stats_path, "Stats JSON path");
  cachesim->add_flag("--coarse", cache_args.coarse,
                     "Use the coarse (bounding-square) trace instead of the exact-test one");

  std::string psnr_a, psnr_b;
  CLI::App* psnr = app.add_subcommand("psnr", "Peak signal-to-noise ratio of two images");
  psnr->add_option("image_a", psnr_a, "First image (.ppm/.pfm)")->required();
  psnr->add_option("image_b", psnr_b, "Second image (.ppm/.pfm)")->required();

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic scene (and camera)");
  synth->add_option("--count", synth_args.count, "Number of gaussians");
  synth->add_option("--seed", synth_args.seed, "Generator seed");
  synth->add_option("--out", synth_args.out_path, "Scene PLY path")->required();
  synth->add_option("--camera-out", synth_args.camera_out_path, "Camera JSON path");
  synth->add_option("--scale-range", synth_args.scale_range, "World stddev bounds")->expected(2);
  synth->add_option("--opacity-range", synth_args.opacity_range, "Opacity bounds")->expected(2);
  synth->add_option("--extent", synth_args.extent, "Box min xyz then max xyz")->expected(6);
  synth->add_option("--anisotropy", synth_args.anisotropy, "Max axis ratio");
  synth->add_option("--sh-degree", synth_args.sh_degree, "SH degree 0..3");
  synth->add_option("--width", synth_args.width, "Camera width");
  synth->add_option("--height", synth_args.height, "Camera height");
  synth->add_option("--focal", synth_args.focal, "Focal length in pixels");

  CLI11_PARSE(app, argc, argv);

  try {
    if (render->parsed()) return cmd_render(render_args);
    if (compare->parsed()) return cmd_compare(compare_args);
    if (cachesim->parsed()) {
      if (cache_args.trace_path.empty() &&
          (cache_args.scene_path.empty() || cache_args.camera_path.empty())) {
        std::cerr << "error: cachesim needs --trace or both --scene and --camera\n";
        return 1;
      }
      return cmd_cachesim(cache_args);
    }
    if (psnr->parsed()) return cmd_psnr(psnr_a, psnr_b);
    if (synth->parsed()) return cmd_synth(synth_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
