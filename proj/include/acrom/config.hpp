#pragma once
//
// Pipeline configuration: flat `key = value` lines grouped under
// `[section]` headers; `#` starts a comment. Unknown keys are errors.
//
//   [mesh]         r1 r2 c1 c2 h (h required)
//   [offline]      nu eps dt t_start t_end snapshot_every snapshot_from
//                  initial_state (rest|file) initial_path forcing (rotating|none)
//                  checkpoint_every                  (dt, t_end required)
//   [pod]          velocity_modes pressure_modes     (count or "full")
//   [rom]          modes (list) pressure_modes (list) dt t_start t_end
//                  stress_includes_nu
//   [angles]       max_modes
//   [convergence]  dts (list) modes pressure_modes t_start t_end
//

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "acrom/mesh.hpp"
#include "acrom/offline.hpp"

namespace acrom {

struct MeshConfig {
  OffsetCylinderGeometry geometry;
  double h = 0.05;
};

/// -1 requests every mode the snapshots admit.
inline constexpr int kAllModes = -1;

struct PodConfig {
  int velocity_modes = kAllModes;
  int pressure_modes = kAllModes;
};

struct RomConfig {
  std::vector<int> modes{7};
  /// Same length as `modes`, or empty to use M = R.
  std::vector<int> pressure_modes;
  /// Defaults to the offline step.
  std::optional<double> dt;
  /// Window; defaults to the snapshot window.
  std::optional<double> t_start;
  std::optional<double> t_end;
  bool stress_includes_nu = false;
};

struct AnglesConfig {
  int max_modes = 20;
};

struct ConvergenceConfig {
  std::vector<double> dts{8e-3, 4e-3, 2e-3, 1e-3};
  int modes = 50;
  std::optional<int> pressure_modes;
  std::optional<double> t_start;
  std::optional<double> t_end;
};

struct PipelineConfig {
  MeshConfig mesh;
  OfflineConfig offline;
  PodConfig pod;
  RomConfig rom;
  AnglesConfig angles;
  ConvergenceConfig convergence;
};

/// Throws ConfigError naming the offending key or line.
PipelineConfig parse_config(const std::filesystem::path& path);
/// `origin` names the source in messages; relative paths resolve against `base_dir`.
PipelineConfig parse_config_text(const std::string& text, const std::string& origin,
                                 const std::filesystem::path& base_dir = {});

}  // namespace acrom
