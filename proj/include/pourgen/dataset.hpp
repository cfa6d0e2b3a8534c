// Copyright 2026 The pourgen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pourgen/linalg.hpp"
#include "pourgen/rng.hpp"

namespace pourgen {

/// Per-trial constants: the three force readings plus cup/container
/// geometry and the material density ratio. Together they form the static
/// vector z fed to every network.
struct StaticContext {
  double f_init_lbf = 0.0;
  double f_empty_lbf = 0.0;
  double f_final_lbf = 0.0;
  double d_cup_mm = 0.0;
  double h_cup_mm = 0.0;
  double d_ctn_mm = 0.0;
  double h_ctn_mm = 0.0;
  double rho = 0.0;  // material density / water density

  Vec as_vector() const {
    return {f_init_lbf, f_empty_lbf, f_final_lbf, d_cup_mm,
            h_cup_mm,   d_ctn_mm,    h_ctn_mm,    rho};
  }
};

enum class Provenance { Synthetic, Imported };

/// One pouring demonstration: rotation and sensed force at 60 Hz plus the
/// static context and the identities that drive holdout splits.
struct TrialRecord {
  std::string id;
  std::string cup_id;
  std::string container_id;
  std::string material_id;
  Vec theta;  // degrees
  Vec force;  // lbf
  StaticContext ctx;
  Provenance provenance = Provenance::Synthetic;

  std::size_t length() const { return theta.size(); }
};

struct Corpus {
  std::vector<TrialRecord> trials;

  std::size_t t_max() const;
  bool empty() const { return trials.empty(); }
};

/// f = sqrt(fx^2 + fy^2 + fz^2). Rejects non-finite components.
double sensed_force(double fx, double fy, double fz);

enum class PadMode { Zero, EndValue };

/// Extend `seq` to `target_len` with zeros or with copies of the last value.
Vec pad(const Vec& seq, std::size_t target_len, PadMode mode);

/// The 10-vector a_t = [theta_t, f_t, f_init, f_empty, f_final, d_cup,
/// h_cup, d_ctn, h_ctn, rho]. `t` is a 0-based frame index.
Vec assemble_features(const TrialRecord& trial, std::size_t t);

// ---------------------------------------------------------------------------
// Tilted-cylinder fill oracle
// ---------------------------------------------------------------------------

/// Volume (m^3) a vertical cylinder of radius/height (m) retains when tilted
/// by `tilt_deg` and allowed to spill over the rim. Closed form:
/// while the free surface still meets the wall all around,
///   V = pi r^2 (h - r tan t);
/// once the surface cuts the base (tan t > h / 2r), the remaining body is a
/// cylindrical hoof over the chord x = a, a = r - h / tan t:
///   V = tan t * ( 2/3 (r^2-a^2)^{3/2} + a^2 sqrt(r^2-a^2) - a r^2 acos(a/r) ).
/// Zero from 90 degrees on. Monotone non-increasing in the tilt.
double cylinder_capacity(double tilt_deg, double radius_m, double height_m);

/// Smallest tilt at which the capacity drops to `volume_m3` (bisection).
double capacity_tilt_for_volume(double volume_m3, double radius_m,
                                double height_m);

/// Quasi-static pour state: retained volume only ever decreases (material
/// that left the cup does not come back when the cup tilts upright again).
class FillState {
 public:
  FillState(double radius_m, double height_m, double fill_volume_m3,
            double density_ratio, double empty_lbf);

  /// Reconstruct geometry and fill level from the static context
  /// (f_init - f_empty divided by the material weight coefficient).
  explicit FillState(const StaticContext& ctx);

  /// Jitter-free sensed force after moving to `theta_deg`; advances the
  /// spill ratchet.
  double force_at(double theta_deg);

  double retained_volume() const { return retained_m3_; }
  double weight_lbf(double volume_m3) const;

 private:
  double radius_m_;
  double height_m_;
  double density_ratio_;
  double empty_lbf_;
  double retained_m3_;
};

// ---------------------------------------------------------------------------
// Synthetic demonstration generator
// ---------------------------------------------------------------------------

struct CupSpec {
  std::string id;
  double d_mm = 0.0;
  double h_mm = 0.0;
  double empty_lbf = 0.0;
};

struct ContainerSpec {
  std::string id;
  double d_mm = 0.0;
  double h_mm = 0.0;
};

struct MaterialSpec {
  std::string id;
  double rho = 0.0;
};

/// Extra trials for one specific (cup, container, material) cell, on top of
/// the uniform per-combination coverage.
struct ExtraCell {
  std::string cup_id;
  std::string container_id;
  std::string material_id;
  std::size_t count = 0;
};

struct GeneratorSpec {
  std::vector<CupSpec> cups;
  std::vector<ContainerSpec> containers;
  std::vector<MaterialSpec> materials;
  std::size_t trials_per_combo = 1;
  std::vector<ExtraCell> extra_cells;

  double fill_frac_lo = 0.50, fill_frac_hi = 0.80;  // of cup volume
  double pour_frac_lo = 0.40, pour_frac_hi = 0.75;  // of the fill poured out
  double theta1_lo_deg = -5.0, theta1_hi_deg = 8.0;

  double angle_jitter_deg = 0.25;  // pointwise std of the smooth wobble
  double force_jitter_lbf = 0.01;

  // Rotation-profile coefficients (degrees per frame at 60 Hz).
  double ramp_speed_base = 1.05, ramp_speed_rho = 0.55;
  double drain_speed_base = 0.28, drain_speed_rho = 0.22,
         drain_speed_ctn = 0.12;
  std::size_t hold_frames = 8;
  double return_fraction = 0.45;  // theta_end = fraction * theta_flow
  double return_speed_base = 1.45, return_speed_cup = 0.25;
  std::size_t settle_frames = 6;

  static GeneratorSpec defaults();
  static GeneratorSpec from_json_file(const std::string& path);

  std::size_t total_trials() const;
  /// Throws with every problem listed when the spec is unusable.
  void validate() const;
};

Corpus synthesize_corpus(const GeneratorSpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Corpus files: manifest.csv + one CSV per trial, 17-digit decimal text
// ---------------------------------------------------------------------------

void save_corpus(const Corpus& corpus, const std::string& dir);
Corpus load_corpus(const std::string& dir);

// ---------------------------------------------------------------------------
// Generalization splits
// ---------------------------------------------------------------------------

/// The concrete ids designated unseen; which of them are active is decided
/// by the case number (1 cup, 2 container, 3 material, 4 cup+container,
/// 5 container+material, 6 cup+material, 7 all three).
struct UnseenIds {
  std::string cup_id = "c6";
  std::string container_id = "k10";
  std::string material_id = "ice";
};

struct Split {
  std::vector<std::size_t> train;  // corpus indices
  std::vector<std::size_t> test;
};

/// Names of the active unseen elements for a case, e.g. {"cup:c6"}.
std::vector<std::string> unseen_elements(int case_id, const UnseenIds& ids);

/// Test trials carry every active unseen id, train trials carry none;
/// trials mixing the two are dropped. Throws if either side is empty.
Split holdout_split(const Corpus& corpus, int case_id, const UnseenIds& ids);

}  // namespace pourgen
