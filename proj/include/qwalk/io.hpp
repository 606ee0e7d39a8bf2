#pragma once

// Config files, figure presets, and result serialization.
//
// Configs are flat INI-style key = value files with sections [physics],
// [walk], [se], [ensemble], [output].  Parsing is strict: unknown sections
// or keys, duplicate keys, and malformed values are hard errors carrying the
// line number, because a silently ignored typo in a physics key is worse
// than a failed run.  An empty file is valid and yields the defaults.
//
// Results are written as CSV (17 significant digits, lossless for binary64)
// plus a JSON manifest that echoes every input field needed to reproduce the
// run bit for bit.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwalk/analysis.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/trajectory.hpp"
#include "qwalk/version.hpp"

namespace qwalk {

struct ParsedConfig {
  RunConfig run;
  std::string out_dir;
  std::vector<std::string> warnings;
  std::vector<std::string> provenance;  // "section.key" for every key present
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline double parse_double(const std::string& v, const std::string& where, int line) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config line " + std::to_string(line) + ": value '" + v +
                      "' for " + where + " is not a number");
  }
}

inline long parse_int(const std::string& v, const std::string& where, int line) {
  try {
    std::size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config line " + std::to_string(line) + ": value '" + v +
                      "' for " + where + " is not an integer");
  }
}

inline std::uint64_t parse_u64(const std::string& v, const std::string& where, int line) {
  try {
    std::size_t pos = 0;
    const unsigned long long d = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config line " + std::to_string(line) + ": value '" + v +
                      "' for " + where + " is not an unsigned integer");
  }
}

inline bool parse_bool(const std::string& v, const std::string& where, int line) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config line " + std::to_string(line) + ": value '" + v +
                    "' for " + where + " is not a boolean");
}

inline std::pair<double, double> parse_ratio(const std::string& v,
                                             const std::string& where, int line) {
  const std::size_t colon = v.find(':');
  if (colon == std::string::npos)
    throw ConfigError("config line " + std::to_string(line) + ": value '" + v +
                      "' for " + where + " must look like '50:50'");
  const double a = parse_double(trim(v.substr(0, colon)), where, line);
  const double b = parse_double(trim(v.substr(colon + 1)), where, line);
  if (!(a > 0.0 && b > 0.0))
    throw ConfigError("config line " + std::to_string(line) + ": ratio parts in " +
                      where + " must be positive");
  return {a, b};
}

}

// Parses a config from text.  `source` appears in error messages; `base`
// supplies the starting values (used to overlay a config onto a preset).
inline ParsedConfig parse_config_text(const std::string& text,
                                      const std::string& source = "<string>",
                                      const RunConfig& base = RunConfig{}) {
  ParsedConfig pc;
  pc.run = base;
  RunConfig& rc = pc.run;
  std::string section;
  std::set<std::string> seen;
  bool have_omega = false, have_d1 = false, have_d2 = false;
  bool have_targets = false;
  bool have_k = false, have_k1 = false, have_k2 = false;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = detail::trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError(source + " line " + std::to_string(line) +
                          ": malformed section header '" + s + "'");
      section = detail::trim(s.substr(1, s.size() - 2));
      if (section != "physics" && section != "walk" && section != "se" &&
          section != "ensemble" && section != "output")
        throw ConfigError(source + " line " + std::to_string(line) +
                          ": unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + " line " + std::to_string(line) +
                        ": expected 'key = value', got '" + s + "'");
    if (section.empty())
      throw ConfigError(source + " line " + std::to_string(line) +
                        ": key outside of any section");
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string val = detail::trim(s.substr(eq + 1));
    const std::string full = section + "." + key;
    if (!seen.insert(full).second)
      throw ConfigError(source + " line " + std::to_string(line) + ": duplicate key '" +
                        full + "'");
    pc.provenance.push_back(full);

    using namespace detail;
    if (section == "physics") {
      if (key == "k") {
        rc.k1 = rc.k2 = parse_double(val, full, line);
        have_k = have_targets = true;
      } else if (key == "k1") {
        rc.k1 = parse_double(val, full, line);
        have_k1 = have_targets = true;
      } else if (key == "k2") {
        rc.k2 = parse_double(val, full, line);
        have_k2 = have_targets = true;
      } else if (key == "p_se") {
        rc.p_se = parse_double(val, full, line);
        have_targets = true;
      } else if (key == "ratio") {
        std::tie(rc.ratio1, rc.ratio2) = parse_ratio(val, full, line);
      } else if (key == "tau_p") {
        rc.tau_p = parse_double(val, full, line);
      } else if (key == "tau_se") {
        rc.tau_se = parse_double(val, full, line);
      } else if (key == "tau") {
        rc.tau = parse_double(val, full, line);
      } else if (key == "period_phys") {
        rc.period_phys = parse_double(val, full, line);
      } else if (key == "omega") {
        rc.physics.omega = parse_double(val, full, line);
        have_omega = true;
      } else if (key == "delta1") {
        rc.physics.delta1 = parse_double(val, full, line);
        have_d1 = true;
      } else if (key == "delta2") {
        rc.physics.delta2 = parse_double(val, full, line);
        have_d2 = true;
      } else {
        throw ConfigError(source + " line " + std::to_string(line) +
                          ": unknown key '" + key + "' in [physics]");
      }
    } else if (section == "walk") {
      if (key == "steps") {
        rc.steps = static_cast<int>(parse_int(val, full, line));
      } else if (key == "n_max") {
        rc.n_max = static_cast<int>(parse_int(val, full, line));
      } else if (key == "coin_alpha") {
        rc.coin_alpha = parse_double(val, full, line);
      } else if (key == "coin_chi") {
        rc.coin_chi = parse_double(val, full, line);
      } else if (key == "phase_correction") {
        rc.apply_phase_correction = parse_bool(val, full, line);
      } else {
        throw ConfigError(source + " line " + std::to_string(line) +
                          ": unknown key '" + key + "' in [walk]");
      }
    } else if (section == "se") {
      if (key == "collapse_mode") {
        if (val == "mean_cos")
          rc.collapse_mode = CollapseMode::MeanCos;
        else if (val == "exact_cos")
          rc.collapse_mode = CollapseMode::ExactCos;
        else
          throw ConfigError(source + " line " + std::to_string(line) +
                            ": collapse_mode must be mean_cos or exact_cos");
      } else if (key == "substeps") {
        rc.substeps = static_cast<int>(parse_int(val, full, line));
      } else if (key == "finite_pulse_kinetics") {
        rc.finite_pulse_kinetics = parse_bool(val, full, line);
      } else {
        throw ConfigError(source + " line " + std::to_string(line) +
                          ": unknown key '" + key + "' in [se]");
      }
    } else if (section == "ensemble") {
      if (key == "trajectories") {
        rc.n_traj = static_cast<int>(parse_int(val, full, line));
      } else if (key == "beta_mean") {
        rc.beta_mean = parse_double(val, full, line);
      } else if (key == "beta_fwhm") {
        rc.beta_fwhm = parse_double(val, full, line);
      } else if (key == "seed") {
        rc.seed = parse_u64(val, full, line);
      } else if (key == "threads") {
        rc.threads = static_cast<int>(parse_int(val, full, line));
      } else {
        throw ConfigError(source + " line " + std::to_string(line) +
                          ": unknown key '" + key + "' in [ensemble]");
      }
    } else {  // output
      if (key == "dir") {
        pc.out_dir = val;
      } else {
        throw ConfigError(source + " line " + std::to_string(line) +
                          ": unknown key '" + key + "' in [output]");
      }
    }
  }

  if (have_k && (have_k1 || have_k2))
    throw ConfigError(source + ": give either k or the pair k1/k2, not both");
  if (have_k1 != have_k2)
    throw ConfigError(source + ": k1 and k2 must be given together");

  const int nexp = (have_omega ? 1 : 0) + (have_d1 ? 1 : 0) + (have_d2 ? 1 : 0);
  if (nexp != 0 && nexp != 3)
    throw ConfigError(source + ": omega, delta1, delta2 must be given together");
  if (nexp == 3) {
    rc.has_explicit_physics = true;
    rc.physics.tau_p = rc.tau_p;
    rc.physics.tau_se = rc.tau_se;
    rc.physics.tau = rc.tau;
    rc.physics.period_phys = rc.period_phys;
    if (have_targets)
      pc.warnings.push_back(
          "explicit omega/delta1/delta2 given: the k and p_se targets are ignored");
  }
  return pc;
}

inline ParsedConfig parse_config_file(const std::string& path,
                                      const RunConfig& base = RunConfig{}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path, base);
}

// ---------------------------------------------------------------------------
// Figure presets.

// All presets share the published working point k = 1.45 and tau_p = 380 ns.
inline std::vector<std::string> preset_names() {
  return {"ideal_t15", "ideal_t50",
          "fig3a", "fig3b", "fig3c", "fig3d",
          "fig4_p037_r5050", "fig4_p037_r7030", "fig4_p037_r9901",
          "fig4_p11_r5050", "fig4_p11_r7030", "fig4_p11_r9901",
          "fig5a", "fig5b", "fig5c", "fig5d"};
}

inline RunConfig preset(const std::string& name) {
  RunConfig c;
  c.k1 = c.k2 = 1.45;
  c.steps = 15;
  c.n_traj = 1000;

  auto ratio = [&](double a, double b) {
    c.ratio1 = a;
    c.ratio2 = b;
  };
  if (name == "ideal_t15") {
    c.p_se = 0.0;
    c.n_traj = 1;
  } else if (name == "ideal_t50") {
    c.p_se = 0.0;
    c.n_traj = 1;
    c.steps = 50;
  } else if (name == "fig3a") {
    c.p_se = 0.037;
  } else if (name == "fig3b") {
    c.p_se = 0.11;
  } else if (name == "fig3c") {
    c.p_se = 0.037;
    c.steps = 50;
  } else if (name == "fig3d") {
    c.p_se = 0.11;
    c.steps = 50;
  } else if (name == "fig4_p037_r5050") {
    c.p_se = 0.037;
    ratio(50, 50);
  } else if (name == "fig4_p037_r7030") {
    c.p_se = 0.037;
    ratio(70, 30);
  } else if (name == "fig4_p037_r9901") {
    c.p_se = 0.037;
    ratio(99, 1);
  } else if (name == "fig4_p11_r5050") {
    c.p_se = 0.11;
    ratio(50, 50);
  } else if (name == "fig4_p11_r7030") {
    c.p_se = 0.11;
    ratio(70, 30);
  } else if (name == "fig4_p11_r9901") {
    c.p_se = 0.11;
    ratio(99, 1);
  } else if (name == "fig5a") {
    c.p_se = 0.037;
    c.beta_fwhm = 0.025;
  } else if (name == "fig5b") {
    c.p_se = 0.037;
    c.beta_fwhm = 0.01;
  } else if (name == "fig5c") {
    c.p_se = 0.02;
    c.beta_fwhm = 0.01;
  } else if (name == "fig5d") {
    c.p_se = 0.02;
    c.beta_fwhm = 0.02;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

// Sweep groups: every preset belonging to one figure.
inline std::vector<std::string> sweep_group(const std::string& name) {
  if (name == "fig3") return {"ideal_t15", "ideal_t50", "fig3a", "fig3b", "fig3c", "fig3d"};
  if (name == "fig4")
    return {"fig4_p037_r5050", "fig4_p037_r7030", "fig4_p037_r9901",
            "fig4_p11_r5050", "fig4_p11_r7030", "fig4_p11_r9901"};
  if (name == "fig5") return {"ideal_t15", "fig5a", "fig5b", "fig5c", "fig5d"};
  throw ConfigError("unknown sweep group '" + name + "' (expected fig3, fig4 or fig5)");
}

// ---------------------------------------------------------------------------
// Serialization.

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

}

inline void write_distribution_csv(const std::string& path,
                                   const std::vector<MomentumDistribution>& frames) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "step,n,p1,p2,p_total\n";
  for (const MomentumDistribution& d : frames)
    for (int n = -d.n_max; n <= d.n_max; ++n)
      out << d.step << ',' << n << ',' << detail::fmt17(d.p1[d.index(n)]) << ','
          << detail::fmt17(d.p2[d.index(n)]) << ',' << detail::fmt17(d.total[d.index(n)])
          << '\n';
  if (!out) throw ConfigError("short write on '" + path + "'");
}

inline void write_metrics_csv(const std::string& path,
                              const std::vector<MomentumDistribution>& frames, double k) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "step,mass,mean,variance,peak_left,peak_right,contrast,l1_gaussian\n";
  for (const MomentumDistribution& d : frames) {
    const WalkMetrics m = metrics(d, k);
    out << d.step << ',' << detail::fmt17(m.mass) << ',' << detail::fmt17(m.mean) << ','
        << detail::fmt17(m.variance) << ',' << detail::fmt17(m.peak_left) << ','
        << detail::fmt17(m.peak_right) << ',' << detail::fmt17(m.contrast) << ','
        << detail::fmt17(m.l1_gaussian) << '\n';
  }
  if (!out) throw ConfigError("short write on '" + path + "'");
}

inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["k1"] = c.k1;
  j["k2"] = c.k2;
  j["p_se"] = c.p_se;
  j["ratio1"] = c.ratio1;
  j["ratio2"] = c.ratio2;
  j["tau_p"] = c.tau_p;
  j["tau_se"] = c.tau_se;
  j["tau"] = c.tau;
  j["period_phys"] = c.period_phys;
  j["has_explicit_physics"] = c.has_explicit_physics;
  if (c.has_explicit_physics) {
    j["omega"] = c.physics.omega;
    j["delta1"] = c.physics.delta1;
    j["delta2"] = c.physics.delta2;
  }
  j["steps"] = c.steps;
  j["n_max"] = c.n_max;
  j["coin_alpha"] = c.coin_alpha;
  j["coin_chi"] = c.coin_chi;
  j["phase_correction"] = c.apply_phase_correction;
  j["collapse_mode"] =
      (c.collapse_mode == CollapseMode::ExactCos) ? "exact_cos" : "mean_cos";
  j["substeps"] = c.substeps;
  j["finite_pulse_kinetics"] = c.finite_pulse_kinetics;
  j["trajectories"] = c.n_traj;
  j["beta_mean"] = c.beta_mean;
  j["beta_fwhm"] = c.beta_fwhm;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    c.k1 = j.at("k1").get<double>();
    c.k2 = j.at("k2").get<double>();
    c.p_se = j.at("p_se").get<double>();
    c.ratio1 = j.at("ratio1").get<double>();
    c.ratio2 = j.at("ratio2").get<double>();
    c.tau_p = j.at("tau_p").get<double>();
    c.tau_se = j.at("tau_se").get<double>();
    c.tau = j.at("tau").get<double>();
    c.period_phys = j.at("period_phys").get<double>();
    c.has_explicit_physics = j.at("has_explicit_physics").get<bool>();
    if (c.has_explicit_physics) {
      c.physics.omega = j.at("omega").get<double>();
      c.physics.delta1 = j.at("delta1").get<double>();
      c.physics.delta2 = j.at("delta2").get<double>();
      c.physics.tau_p = c.tau_p;
      c.physics.tau_se = c.tau_se;
      c.physics.tau = c.tau;
      c.physics.period_phys = c.period_phys;
    }
    c.steps = j.at("steps").get<int>();
    c.n_max = j.at("n_max").get<int>();
    c.coin_alpha = j.at("coin_alpha").get<double>();
    c.coin_chi = j.at("coin_chi").get<double>();
    c.apply_phase_correction = j.at("phase_correction").get<bool>();
    c.collapse_mode = (j.at("collapse_mode").get<std::string>() == "exact_cos")
                          ? CollapseMode::ExactCos
                          : CollapseMode::MeanCos;
    c.substeps = j.at("substeps").get<int>();
    c.finite_pulse_kinetics = j.at("finite_pulse_kinetics").get<bool>();
    c.n_traj = j.at("trajectories").get<int>();
    c.beta_mean = j.at("beta_mean").get<double>();
    c.beta_fwhm = j.at("beta_fwhm").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.threads = j.at("threads").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest config is incomplete: ") + e.what());
  }
  return c;
}

inline nlohmann::json manifest_json(const EnsembleResult& res) {
  const ResolvedRun& r = res.resolved;
  nlohmann::json j;
  j["version"] = kVersion;
  j["rng"] = {{"algorithm", Rng::kAlgorithm}, {"seed", r.cfg.seed}};
  j["config"] = config_to_json(r.cfg);
  j["derived"] = {{"k1", r.derived.k1},
                  {"k2", r.derived.k2},
                  {"gamma1", r.weights.gamma1},
                  {"gamma2", r.weights.gamma2},
                  {"gamma", r.weights.gamma1 + r.weights.gamma2},
                  {"p_se", r.derived.p_se},
                  {"xi1", r.derived.xi1},
                  {"xi2", r.derived.xi2},
                  {"phi_dyn", r.derived.phi_dyn},
                  {"kick1", r.kick1},
                  {"kick2", r.kick2},
                  {"omega", r.physics.omega},
                  {"delta1", r.physics.delta1},
                  {"delta2", r.physics.delta2},
                  {"spacing", r.spacing},
                  {"n_sites", r.n_sites}};
  j["ensemble"] = {{"trajectories", r.cfg.n_traj},
                   {"total_events", res.total_events},
                   {"mean_beta", res.mean_beta},
                   {"elapsed_seconds", res.elapsed_seconds}};
  j["warnings"] = r.warnings;
  j["files"] = {"distribution.csv", "metrics.csv"};
  return j;
}

inline RunConfig config_from_manifest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.contains("config")) throw ConfigError("manifest '" + path + "' has no config");
  return config_from_json(j.at("config"));
}

// Runs one ensemble and writes distribution.csv, metrics.csv and
// manifest.json into `dir` (created if needed).
inline EnsembleResult run_to_directory(const RunConfig& cfg, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "'");
  EnsembleResult res = run_ensemble(cfg);
  write_distribution_csv(dir + "/distribution.csv", res.frames);
  write_metrics_csv(dir + "/metrics.csv", res.frames, std::sqrt(cfg.k1 * cfg.k2));
  std::ofstream mout(dir + "/manifest.json");
  if (!mout) throw ConfigError("cannot write manifest in '" + dir + "'");
  mout << manifest_json(res).dump(2) << '\n';
  return res;
}

// Default output root: $QWALK_OUTPUT_ROOT if set, else ./runs.
inline std::string default_output_root() {
  if (const char* env = std::getenv("QWALK_OUTPUT_ROOT"); env && *env) return env;
  return "runs";
}

}
