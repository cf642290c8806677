#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "carleman/grid.hpp"
#include "carleman/profiles.hpp"

namespace carleman {

// A profile as written in the config plus the resolved closed form. `spec`
// is the normalized list [{"profile"|"file": ..., "scale": ...}, ...]; the
// terms are summed.
struct ProfileEntry {
  nlohmann::json spec;
  Profile profile;
};

struct GridBlock {
  double L = 4.0, d = 1.0, T = 1.0;
  int n1 = 160, n2 = 40, nt = 200;
};

struct WeightsBlock {
  ProfileEntry beta_tilde;
  double m = 2.0;
  std::vector<double> lambda{1.0, 2.0, 4.0};
  std::vector<double> s{8.0, 16.0, 32.0, 64.0};
};

// (a~, b~) is the pair the closed-form q~ solves. The base pair (a, b) is
// either given directly or as a~ - alpha, b~ - gamma; it defaults to the tilde pair.
struct CoefficientsBlock {
  ProfileEntry a, b, a_tilde, b_tilde, alpha, gamma;
};

struct FixtureBlock {
  std::string q_tilde = "shifted-phase";  // forward and inverse runs
  std::string audit = "bump";             // test function of the Carleman and lemma audits
};

struct RunBlock {
  std::uint64_t seed = 12345;
  bool seed_from_env = false;
  double noise_level = 0.0;
  bool smooth = false;
  Side side = Side::GammaPlus;
  int variant = 2;
  int levels = 3;            // forward refinement study
  bool refine_n1 = false;
  std::vector<double> gap_scales{1.0, 2.0};
  double stability_lambda = 1.0;
  bool export_fields = false;
  std::string out = "carleman-out";
};

struct RunConfig {
  std::string source;  // file name, for messages
  GridBlock grid;
  WeightsBlock weights;
  CoefficientsBlock coefficients;
  FixtureBlock fixture;
  RunBlock run;

  StripGrid build_grid() const;
  ProfileContext context() const { return {grid.d, grid.L, grid.T}; }
  // Every resolved value, defaults included.
  nlohmann::json to_json() const;
  // FNV-1a over the canonical dump of to_json().
  std::string digest() const;
};

// Parses a TOML document. Unknown blocks or keys, wrong types and unresolvable
// names raise ConfigError with the file, line and field. Relative table paths
// resolve against base_dir. env_seed, when set, overrides run.seed.
RunConfig parse_config(const std::string& text, const std::string& source, const std::filesystem::path& base_dir,
                       const char* env_seed = nullptr);

// Reads the file and applies CARLEMAN_LAB_SEED from the environment.
RunConfig load_config(const std::filesystem::path& path);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace carleman
