#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "tetforge/report_json.hpp"
#include "tetforge/tetforge.hpp"

namespace tetforge::cli {

enum ExitCode : int { kOk = 0, kIoError = 1, kStructuralError = 2, kBadFlags = 3 };

struct CliConfig {
  std::string input;
  std::string output;
  std::string format;
  std::string histogram;
  std::string report;
  std::string generate;
  std::vector<int> fix_refs;
  std::vector<double> schedule{0.75, 0.85, 0.95};
  RunConfig run;
  bool no_surface_motion = false;
  bool all_patches = false;
  bool squared = false;
  bool in_place = false;
};

inline spdlog::level::level_enum log_level_from_env() {
  const char* env = std::getenv("TETFORGE_LOG");
  if (!env) return spdlog::level::info;
  const std::string s(env);
  if (s == "error") return spdlog::level::err;
  if (s == "debug") return spdlog::level::debug;
  return spdlog::level::info;
}

inline std::string pass_line(const PassRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "pass %d.%d b=%.3f q_min=%.6f dihedral=[%.2f, %.2f] drift=%.6f%% time=%.3fs patches=%zu",
                r.stage + 1, r.pass, r.b, r.q_min, r.min_dihedral, r.max_dihedral, r.volume_drift_percent,
                r.seconds, r.patches);
  return buf;
}

/// Entry point behind the `tetforge` binary. Pass lines go to `out`,
/// diagnostics to `err`.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  sink->set_pattern("tetforge: %l: %v");
  spdlog::logger log("tetforge", sink);
  log.set_level(log_level_from_env());

  CliConfig c;
  CLI::App app{"Tetrahedral mesh quality improvement by log-barrier Newton smoothing", "tetforge"};
  app.add_option("input", c.input, "Input mesh (.mesh or .vtk)");
  app.add_option("-o,--output", c.output, "Output mesh path");
  app.add_option("--format", c.format, "Mesh format override")->check(CLI::IsMember({"medit", "vtk"}));
  app.add_option("--target-quality", c.run.target_quality, "Seed tets below this quality")->check(CLI::Range(-1.0, 1.0));
  app.add_option("--barrier-schedule", c.schedule, "Barrier constants in (0,1), nondecreasing")->delimiter(',');
  app.add_option("--max-passes", c.run.max_passes, "Passes per barrier constant")->check(CLI::PositiveNumber);
  app.add_option("--feature-angle", c.run.feature_angle, "Crease detection angle in degrees")->check(CLI::Range(0.0, 180.0));
  app.add_flag("--no-surface-motion", c.no_surface_motion, "Keep all surface vertices fixed");
  app.add_flag("--all-patches", c.all_patches, "Optimize every element, not only those below target");
  app.add_option("--fix", c.fix_refs, "Fix vertices carrying this reference tag (repeatable)");
  app.add_option("--histogram", c.histogram, "Write the final dihedral histogram as CSV");
  app.add_option("--report", c.report, "Write a JSON optimization report");
  app.add_option("--jobs", c.run.jobs, "Worker threads for patch dispatch")->check(CLI::PositiveNumber);
  app.add_option("--seed", c.run.seed, "Seed for --generate");
  app.add_flag("--in-place", c.in_place, "Allow writing over the input");
  app.add_flag("--squared-barrier", c.squared, "Minimize the squared log-barrier");
  app.add_option("--generate", c.generate, "Synthesize the input: grid:N[:P], sphere:N[:P], slivers:N:K[:P], inverted:N:K[:P]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    log.error("{}", e.what());
    return kBadFlags;
  }

  c.run.b_schedule = c.schedule;
  c.run.surface_motion = !c.no_surface_motion;
  c.run.mode = c.all_patches ? PatchMode::AllPatches : PatchMode::Selective;
  c.run.objective = c.squared ? ObjectiveKind::SquaredLogBarrier : ObjectiveKind::LogBarrier;
  try {
    c.run.check();
  } catch (const InvalidArgument& e) {
    log.error("{}", e.what());
    return kBadFlags;
  }

  if (c.input.empty() == c.generate.empty()) {
    log.error("give exactly one of an input mesh or --generate");
    return kBadFlags;
  }
  if (c.in_place) {
    if (c.input.empty()) {
      log.error("--in-place needs an input mesh");
      return kBadFlags;
    }
    if (c.output.empty()) c.output = c.input;
  } else if (!c.input.empty() && !c.output.empty()) {
    std::error_code ec;
    const bool same = std::filesystem::exists(c.output) && std::filesystem::equivalent(c.input, c.output, ec);
    if (same || c.input == c.output) {
      log.error("output '{}' is the input; pass --in-place to overwrite it", c.output);
      return kBadFlags;
    }
  }

  std::optional<MeshFormat> forced;
  if (!c.format.empty()) forced = parse_format_name(c.format);

  TetMesh mesh;
  MeshFormat in_format = MeshFormat::Medit;
  try {
    if (!c.generate.empty()) {
      mesh = generate_test_mesh(parse_fixture_spec(c.generate), c.run.seed);
    } else {
      if (!std::filesystem::exists(c.input)) {
        log.error("input '{}' does not exist", c.input);
        return kIoError;
      }
      auto f = format_from_path(c.input);
      if (!f) f = forced;
      if (!f) {
        log.error("cannot infer the format of '{}'; pass --format", c.input);
        return kBadFlags;
      }
      in_format = *f;
      mesh = load_mesh(c.input, in_format);
    }
  } catch (const InvalidArgument& e) {
    log.error("{}", e.what());
    return kBadFlags;
  } catch (const StructuralError& e) {
    log.error("{}", e.what());
    return kStructuralError;
  } catch (const Error& e) {
    log.error("{}", e.what());
    return kIoError;
  }

  try {
    if (!c.fix_refs.empty()) fix_vertices_by_ref(mesh, c.fix_refs);
    log.debug("{} vertices, {} tets", mesh.num_vertices(), mesh.num_tets());

    RunHooks hooks;
    hooks.on_pass = [&](const PassRecord& r) { out << pass_line(r) << '\n'; };
    const OptimizationReport rep = optimize_mesh(mesh, c.run, hooks);
    log.info("q_min {:.6f} -> {:.6f}, dihedral [{:.2f}, {:.2f}] -> [{:.2f}, {:.2f}], {} passes, {:.3f}s",
             rep.initial.q_min, rep.final.q_min, rep.initial.min_dihedral, rep.initial.max_dihedral,
             rep.final.min_dihedral, rep.final.max_dihedral, rep.passes.size(), rep.seconds);
    if (rep.stalled_patches > 0) log.info("{} patch solves stalled", rep.stalled_patches);
    if (rep.final.inverted > 0) log.error("{} inverted tets remain", rep.final.inverted);

    if (!c.output.empty()) {
      MeshFormat of = forced ? *forced : format_from_path(c.output).value_or(in_format);
      save_mesh(mesh, c.output, of);
    }
    if (!c.histogram.empty()) write_file_atomic(c.histogram, histogram_csv(rep.final.histogram));
    if (!c.report.empty()) write_file_atomic(c.report, to_json(rep).dump(2) + "\n");
  } catch (const StructuralError& e) {
    log.error("{}", e.what());
    return kStructuralError;
  } catch (const IoError& e) {
    log.error("{}", e.what());
    return kIoError;
  } catch (const Error& e) {
    log.error("{}", e.what());
    return kStructuralError;
  }
  return kOk;
}

}  // namespace tetforge::cli
