// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rlcuts/image.hpp"
#include "rlcuts/render.hpp"
#include "rlcuts/scene_gen.hpp"
#include "rlcuts/scene_io.hpp"

namespace {

using namespace rlcuts;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitParse = 4;
constexpr int kExitSchema = 5;
constexpr int kExitNoEmitters = 6;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <typename T>
std::string join_series(const std::vector<T>& values) {
  std::ostringstream os;
  os.precision(17);
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) os << ';';
    os << values[i];
  }
  return os.str();
}

std::map<std::string, std::string> parse_params(const std::string& text) {
  std::map<std::string, std::string> params;
  if (text.empty()) return params;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("bad generator parameter '" + item + "', expected key=value");
    }
    params[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return params;
}

int64_t take_int(std::map<std::string, std::string>& params, const std::string& key,
                 int64_t fallback) {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  const std::string value = it->second;
  params.erase(it);
  try {
    size_t used = 0;
    const int64_t parsed = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw UsageError("generator parameter '" + key + "' is not an integer: " + value);
  }
}

std::string sanitize(const std::string& id) {
  std::string clean;
  for (char c : id) {
    clean += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  }
  return clean;
}

struct ResolvedScene {
  std::string id;
  Scene scene;
};

ResolvedScene resolve_scene(const std::string& spec, int width, int height) {
  ResolvedScene out;
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  if (name == "cornell_grid" || name == "window_room") {
    auto params =
        parse_params(colon == std::string::npos ? "" : spec.substr(colon + 1));
    const uint64_t seed = uint64_t(take_int(params, "seed", 1));
    const int dome = int(take_int(params, "dome", 512));
    if (name == "cornell_grid") {
      out.scene = gen_cornell_grid(int(take_int(params, "k", 2)), seed, dome);
    } else {
      out.scene = gen_window_room(int(take_int(params, "n", 3)), seed, dome);
    }
    if (!params.empty()) {
      throw UsageError("unknown generator parameter '" + params.begin()->first + "'");
    }
    out.id = sanitize(spec);
  } else {
    out.scene = load_scene(spec);
    out.id = sanitize(fs::path(spec).stem().string());
  }
  if (width > 0) out.scene.camera.width = width;
  if (height > 0) out.scene.camera.height = height;
  return out;
}

SamplerKind parse_sampler(const std::string& name) {
  if (name == "uniform") return SamplerKind::uniform;
  if (name == "energy") return SamplerKind::energy;
  if (name == "rl") return SamplerKind::rl_lightcuts;
  throw UsageError("unknown sampler '" + name + "'");
}

const char* sampler_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::uniform: return "uniform";
    case SamplerKind::energy: return "energy";
    case SamplerKind::rl_lightcuts: return "rl";
  }
  return "?";
}

// Every flag that influences a run, echoed into the CSV for provenance.
struct RunFlags {
  uint32_t spp = 64;
  uint32_t passes = 16;
  uint32_t depth = 1;
  uint32_t workers = 1;
  uint64_t seed = 1;
  int width = 0;   // 0 keeps the scene camera resolution
  int height = 0;
  uint32_t cut_size = 128;
  double alpha = 0.2;
  double threshold_T = 4.0;
  double eps_q = -1;
  uint32_t iterations = 1;
  double base_tile = 0;
  uint32_t capacity = 1u << 16;
  uint32_t probe_limit = 32;
  uint32_t normal_bits = 4;
  double jitter = 0;
  std::string alpha_schedule = "fixed";
};

void add_run_flags(CLI::App* cmd, RunFlags& flags, bool with_sampler_params = true) {
  cmd->add_option("--spp", flags.spp, "Samples per pixel (total over all passes)");
  cmd->add_option("--passes", flags.passes, "Rendering passes; spp must divide evenly");
  cmd->add_option("--depth", flags.depth, "Maximum path depth");
  cmd->add_option("--workers", flags.workers, "Worker threads");
  cmd->add_option("--seed", flags.seed, "Random seed");
  cmd->add_option("--width", flags.width, "Image width override");
  cmd->add_option("--height", flags.height, "Image height override");
  if (!with_sampler_params) return;
  cmd->add_option("--cut-size", flags.cut_size, "Learned cut size")
      ->check(CLI::IsMember({128, 256}));
  cmd->add_option("--alpha", flags.alpha, "Q learning rate");
  cmd->add_option("--threshold-T", flags.threshold_T, "Split-collapse threshold");
  cmd->add_option("--eps-q", flags.eps_q, "Q floor; negative resolves to 1e-4/M");
  cmd->add_option("--iterations", flags.iterations, "Split-collapse rounds per pass");
  cmd->add_option("--base-tile", flags.base_tile,
                  "Level-0 cell size; non-positive derives scene diagonal / 256");
  cmd->add_option("--capacity", flags.capacity, "Hash slot count");
  cmd->add_option("--probe-limit", flags.probe_limit, "Linear probe bound");
  cmd->add_option("--normal-bits", flags.normal_bits, "Octahedral bits per component");
  cmd->add_option("--jitter", flags.jitter, "Cell jitter scale");
  cmd->add_option("--alpha-schedule", flags.alpha_schedule, "Q learning rate schedule")
      ->check(CLI::IsMember({"fixed", "harmonic"}));
}

RenderConfig make_config(const RunFlags& flags, SamplerKind sampler) {
  RenderConfig config;
  config.spp = flags.spp;
  config.passes = flags.passes;
  config.max_depth = flags.depth;
  config.sampler = sampler;
  config.cut.cut_size = flags.cut_size;
  config.cut.alpha = flags.alpha;
  config.cut.split_threshold = flags.threshold_T;
  config.cut.eps_q = flags.eps_q;
  config.cut.iterations = flags.iterations;
  config.hash.capacity = flags.capacity;
  config.hash.base_tile = flags.base_tile;
  config.hash.probe_limit = flags.probe_limit;
  config.hash.normal_bits = flags.normal_bits;
  config.hash.jitter_scale = flags.jitter;
  config.cut.alpha_schedule = flags.alpha_schedule == "harmonic"
                                  ? AlphaSchedule::harmonic
                                  : AlphaSchedule::fixed;
  config.seed = flags.seed;
  config.workers = flags.workers;
  return config;
}

const char kStatsHeader[] =
    "scene,sampler,spp,passes,width,height,seed,depth,workers,cut_size,alpha,"
    "threshold_T,eps_q,iterations,base_tile,capacity,probe_limit,normal_bits,"
    "jitter_scale,alpha_schedule,wall_ms,mse,relative_mse,pass_mse_series,"
    "sc_changes_per_pass,occupied_cells,lookups,fallback_hits,fallback_rate,error";

void write_stats_row(std::ostream& out, const std::string& scene_id,
                     SamplerKind sampler, const RunFlags& flags, int width,
                     int height, double base_tile, const RenderResult* result,
                     std::optional<double> error_mse,
                     std::optional<double> error_rel,
                     const std::string& error_message) {
  out << csv_escape(scene_id) << ',' << sampler_name(sampler) << ',' << flags.spp
      << ',' << flags.passes << ',' << width << ',' << height << ',' << flags.seed
      << ',' << flags.depth << ',' << flags.workers << ',' << flags.cut_size << ','
      << flags.alpha << ',' << flags.threshold_T << ',' << flags.eps_q << ','
      << flags.iterations << ',' << base_tile << ',' << flags.capacity << ','
      << flags.probe_limit << ',' << flags.normal_bits << ',' << flags.jitter << ','
      << flags.alpha_schedule << ',';
  if (result != nullptr) {
    const double rate = result->lookups > 0
                            ? double(result->fallback_hits) / double(result->lookups)
                            : 0.0;
    out << format_double(result->wall_ms) << ','
        << (error_mse ? format_double(*error_mse) : "") << ','
        << (error_rel ? format_double(*error_rel) : "") << ','
        << csv_escape(join_series(result->pass_mse)) << ','
        << csv_escape(join_series(result->sc_changes)) << ','
        << result->occupied_cells << ',' << result->lookups << ','
        << result->fallback_hits << ',' << format_double(rate);
  } else {
    out << ",,,,,,,,";
  }
  out << ',' << csv_escape(error_message) << "\n";
}

struct SubcommandArgs {
  std::string scene_spec;
  std::string sampler = "rl";
  std::string out_dir = "out";
  std::string out_file;
  std::string reference_path;
  std::string image_a;
  std::string image_b;
  std::vector<std::string> scenes;
  std::vector<std::string> samplers{"uniform", "energy", "rl"};
  std::vector<uint32_t> spp_list{64};
  uint32_t ref_spp = 2048;
  RunFlags flags;
};

int cmd_render(const SubcommandArgs& args) {
  const SamplerKind sampler = parse_sampler(args.sampler);
  const ResolvedScene resolved =
      resolve_scene(args.scene_spec, args.flags.width, args.flags.height);
  const RenderConfig config = make_config(args.flags, sampler);
  const RenderContext ctx = build_context(resolved.scene, config);

  std::optional<Image> reference;
  if (!args.reference_path.empty()) reference = read_pfm(args.reference_path);

  const RenderResult result =
      render_frame(ctx, config, reference ? &*reference : nullptr);

  fs::create_directories(args.out_dir);
  std::ostringstream stem;
  stem << resolved.id << '_' << sampler_name(sampler) << '_' << args.flags.spp
       << "spp";
  const fs::path base = fs::path(args.out_dir) / stem.str();
  write_pfm(result.image, base.string() + ".pfm");
  write_ppm(result.image, base.string() + ".ppm");

  std::optional<double> error_mse;
  std::optional<double> error_rel;
  if (reference) {
    error_mse = mse(result.image, *reference);
    error_rel = relative_mse(result.image, *reference);
  }
  const std::string stats_path = base.string() + "_stats.csv";
  std::ofstream stats(stats_path);
  if (!stats) throw ImageIoError(ImageIoErrc::io_error, "cannot write " + stats_path);
  stats << kStatsHeader << "\n";
  write_stats_row(stats, resolved.id, sampler, args.flags, resolved.scene.camera.width,
                  resolved.scene.camera.height, ctx.base_tile, &result, error_mse,
                  error_rel, "");
  std::cout << "wrote " << base.string() << ".pfm, .ppm and " << stats_path << "\n";
  return kExitOk;
}

int cmd_reference(const SubcommandArgs& args) {
  if (args.flags.spp < 1024) {
    throw UsageError("reference requires --spp >= 1024");
  }
  const ResolvedScene resolved =
      resolve_scene(args.scene_spec, args.flags.width, args.flags.height);
  RunFlags flags = args.flags;
  flags.passes = 1;
  const RenderConfig config = make_config(flags, SamplerKind::uniform);
  const RenderContext ctx = build_context(resolved.scene, config);
  const RenderResult result = render_frame(ctx, config);
  const fs::path out = args.out_file.empty()
                           ? fs::path("reference_" + resolved.id + ".pfm")
                           : fs::path(args.out_file);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_pfm(result.image, out.string());
  std::cout << "wrote " << out.string() << "\n";
  return kExitOk;
}

int cmd_compare(const SubcommandArgs& args) {
  const Image a = read_pfm(args.image_a);
  const Image b = read_pfm(args.image_b);
  std::cout << "mse," << format_double(mse(a, b)) << "\n";
  std::cout << "relative_mse," << format_double(relative_mse(a, b)) << "\n";
  return kExitOk;
}

int cmd_bench(const SubcommandArgs& args) {
  fs::create_directories(args.out_dir);
  const fs::path table_path = fs::path(args.out_dir) / "bench.csv";
  const fs::path series_path = fs::path(args.out_dir) / "bench_series.csv";
  std::ofstream table(table_path);
  std::ofstream series(series_path);
  if (!table || !series) {
    throw ImageIoError(ImageIoErrc::io_error, "cannot write bench CSVs");
  }
  table << kStatsHeader << "\n";
  series << "scene,sampler,spp,pass,mse,sc_changes\n";

  size_t attempted = 0;
  size_t failed = 0;
  for (const std::string& scene_spec : args.scenes) {
    std::optional<ResolvedScene> resolved;
    std::optional<RenderContext> ctx_storage;
    std::optional<Image> reference;
    std::string scene_error;
    try {
      resolved = resolve_scene(scene_spec, args.flags.width, args.flags.height);
      RunFlags ref_flags = args.flags;
      ref_flags.spp = args.ref_spp;
      ref_flags.passes = 1;
      // A shared seed would correlate the reference's sample streams with the
      // benchmarked runs and bias every MSE downward; keep them disjoint.
      ref_flags.seed = args.flags.seed + 1000003;
      const RenderConfig ref_config = make_config(ref_flags, SamplerKind::uniform);
      ctx_storage = build_context(resolved->scene, ref_config);
      std::cerr << "bench: reference " << scene_spec << " at " << args.ref_spp
                << " spp\n";
      reference = render_frame(*ctx_storage, ref_config).image;
      write_pfm(*reference,
                (fs::path(args.out_dir) / ("ref_" + resolved->id + ".pfm")).string());
    } catch (const std::exception& e) {
      scene_error = e.what();
    }

    for (const std::string& sampler_str : args.samplers) {
      for (uint32_t spp : args.spp_list) {
        ++attempted;
        RunFlags flags = args.flags;
        flags.spp = spp;
        std::string row_scene = resolved ? resolved->id : sanitize(scene_spec);
        try {
          if (!scene_error.empty()) throw std::runtime_error(scene_error);
          const SamplerKind sampler = parse_sampler(sampler_str);
          const RenderConfig config = make_config(flags, sampler);
          std::cerr << "bench: " << row_scene << " " << sampler_str << " " << spp
                    << " spp\n";
          const RenderResult result =
              render_frame(*ctx_storage, config, &*reference);
          const double run_mse = mse(result.image, *reference);
          const double run_rel = relative_mse(result.image, *reference);
          std::ostringstream stem;
          stem << row_scene << '_' << sampler_str << '_' << spp << "spp";
          const fs::path base = fs::path(args.out_dir) / stem.str();
          write_pfm(result.image, base.string() + ".pfm");
          write_ppm(result.image, base.string() + ".ppm");
          write_stats_row(table, row_scene, sampler, flags,
                          resolved->scene.camera.width, resolved->scene.camera.height,
                          ctx_storage->base_tile, &result, run_mse, run_rel, "");
          for (size_t pass = 0; pass < result.pass_mse.size(); ++pass) {
            series << csv_escape(row_scene) << ',' << sampler_str << ',' << spp << ','
                   << pass << ',' << format_double(result.pass_mse[pass]) << ','
                   << result.sc_changes[pass] << "\n";
          }
        } catch (const std::exception& e) {
          ++failed;
          SamplerKind kind = SamplerKind::uniform;
          try {
            kind = parse_sampler(sampler_str);
          } catch (const std::exception&) {
          }
          write_stats_row(table, row_scene, kind, flags, flags.width, flags.height,
                          0, nullptr, std::nullopt, std::nullopt, e.what());
        }
      }
    }
  }
  std::cout << "wrote " << table_path.string() << " and " << series_path.string()
            << "\n";
  return (attempted > 0 && failed == attempted) ? kExitRuntime : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Many-lights direct-illumination sampling benchmark"};
  app.require_subcommand(1);

  SubcommandArgs args;

  CLI::App* render = app.add_subcommand("render", "Render one scene with one sampler");
  render->add_option("--scene", args.scene_spec,
                     "Scene JSON path or generator spec like cornell_grid:k=2")
      ->required();
  render->add_option("--sampler", args.sampler, "uniform | energy | rl")
      ->check(CLI::IsMember({"uniform", "energy", "rl"}));
  render->add_option("--out", args.out_dir, "Output directory");
  render->add_option("--ref", args.reference_path,
                     "Reference PFM enabling per-pass error tracking");
  add_run_flags(render, args.flags);

  CLI::App* reference =
      app.add_subcommand("reference", "High-spp uniform ground-truth render");
  reference->add_option("--scene", args.scene_spec, "Scene path or generator spec")
      ->required();
  reference->add_option("--out", args.out_file, "Output PFM path");
  add_run_flags(reference, args.flags, false);

  CLI::App* compare = app.add_subcommand("compare", "MSE between two PFM images");
  compare->add_option("image_a", args.image_a, "Test image")->required();
  compare->add_option("image_b", args.image_b, "Reference image")->required();

  CLI::App* bench =
      app.add_subcommand("bench", "Cross-product of scenes, samplers and spp");
  bench->add_option("--scenes", args.scenes, "Scene specs")
      ->required()
      ->delimiter(',');
  bench->add_option("--samplers", args.samplers, "Sampler subset")->delimiter(',');
  bench->add_option("--spp-list", args.spp_list, "spp values")->delimiter(',');
  bench->add_option("--ref-spp", args.ref_spp, "Reference spp per scene");
  bench->add_option("--out", args.out_dir, "Output directory");
  add_run_flags(bench, args.flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (render->parsed()) return cmd_render(args);
    if (reference->parsed()) {
      if (reference->count("--spp") == 0) args.flags.spp = 4096;
      return cmd_reference(args);
    }
    if (compare->parsed()) return cmd_compare(args);
    if (bench->parsed()) return cmd_bench(args);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SceneIoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case SceneIoErrc::io_error: return kExitIo;
      case SceneIoErrc::parse_error: return kExitParse;
      case SceneIoErrc::schema_error: return kExitSchema;
      case SceneIoErrc::no_emitters: return kExitNoEmitters;
    }
    return kExitRuntime;
  } catch (const ImageIoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ImageIoErrc::io_error ? kExitIo : kExitParse;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
