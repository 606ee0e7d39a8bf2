// Command-line front end: run one walk ensemble (or a whole figure's worth)
// and write distributions, metrics and a reproduction manifest.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qwalk/io.hpp"
#include "qwalk/version.hpp"

namespace {

struct Job {
  std::string name;
  qwalk::RunConfig cfg;
};

int run_all(const std::vector<Job>& jobs, const std::string& out_root, bool single,
            const std::string& explicit_out) {
  for (const Job& job : jobs) {
    const std::string dir = !explicit_out.empty()
                                ? (single ? explicit_out : explicit_out + "/" + job.name)
                                : out_root + "/" + job.name;
    const qwalk::EnsembleResult res = qwalk::run_to_directory(job.cfg, dir);
    for (const std::string& w : res.resolved.warnings)
      std::cerr << "warning: " << w << '\n';
    std::cout << job.name << ": steps=" << job.cfg.steps
              << " trajectories=" << job.cfg.n_traj << " events=" << res.total_events
              << " elapsed=" << res.elapsed_seconds << "s -> " << dir << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"momentum-space quantum walk simulator"};
  app.set_version_flag("--version", std::string(qwalk::kVersion));

  std::string config_path, preset_name, manifest_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> trajectories, threads;
  bool list_presets = false;

  app.add_option("--config", config_path, "INI config file");
  app.add_option("--preset", preset_name,
                 "preset name (see --list-presets) or sweep group fig3|fig4|fig5");
  app.add_option("--from-manifest", manifest_path,
                 "reproduce a previous run from its manifest.json");
  app.add_option("--seed", seed, "override the RNG seed");
  app.add_option("--trajectories", trajectories, "override the trajectory count");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--list-presets", list_presets, "print preset names and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_presets) {
      for (const std::string& n : qwalk::preset_names()) std::cout << n << '\n';
      return 0;
    }

    std::vector<Job> jobs;
    std::string config_out_dir;

    const bool is_group =
        preset_name == "fig3" || preset_name == "fig4" || preset_name == "fig5";
    if (is_group) {
      if (!manifest_path.empty())
        throw qwalk::ConfigError("--from-manifest cannot be combined with a sweep");
      for (const std::string& n : qwalk::sweep_group(preset_name)) {
        Job j{n, qwalk::preset(n)};
        if (!config_path.empty()) {
          qwalk::ParsedConfig pc = qwalk::parse_config_file(config_path, j.cfg);
          for (const std::string& w : pc.warnings) std::cerr << "warning: " << w << '\n';
          j.cfg = pc.run;
          config_out_dir = pc.out_dir;
        }
        jobs.push_back(std::move(j));
      }
    } else {
      qwalk::RunConfig base;
      std::string name = "run";
      if (!manifest_path.empty()) {
        if (!preset_name.empty() || !config_path.empty())
          throw qwalk::ConfigError(
              "--from-manifest replaces --preset/--config; give it alone");
        base = qwalk::config_from_manifest_file(manifest_path);
        name = "reproduced";
      } else {
        if (!preset_name.empty()) {
          base = qwalk::preset(preset_name);
          name = preset_name;
        }
        if (!config_path.empty()) {
          qwalk::ParsedConfig pc = qwalk::parse_config_file(config_path, base);
          for (const std::string& w : pc.warnings) std::cerr << "warning: " << w << '\n';
          base = pc.run;
          config_out_dir = pc.out_dir;
          if (preset_name.empty())
            name = std::filesystem::path(config_path).stem().string();
        }
      }
      jobs.push_back({name, base});
    }

    for (Job& j : jobs) {
      if (seed) j.cfg.seed = *seed;
      if (trajectories) j.cfg.n_traj = *trajectories;
      if (threads) j.cfg.threads = *threads;
    }

    std::string explicit_out = !out_dir.empty() ? out_dir : config_out_dir;
    return run_all(jobs, qwalk::default_output_root(), jobs.size() == 1, explicit_out);
  } catch (const qwalk::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const qwalk::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
