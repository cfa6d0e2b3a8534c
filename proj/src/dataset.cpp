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

#include "pourgen/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "pourgen/textio.hpp"

namespace pourgen {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kWaterDensity = 998.0;   // kg/m^3
constexpr double kGravity = 9.80665;      // m/s^2
constexpr double kNewtonPerLbf = 4.4482216152605;

// Weight in lbf of `volume` m^3 of material at the given density ratio.
double material_weight_lbf(double volume_m3, double density_ratio) {
  return volume_m3 * kWaterDensity * density_ratio * kGravity / kNewtonPerLbf;
}

double smoothstep(double u) { return u * u * (3.0 - 2.0 * u); }

}  // namespace

std::size_t Corpus::t_max() const {
  std::size_t m = 0;
  for (const auto& tr : trials) m = std::max(m, tr.length());
  return m;
}

double sensed_force(double fx, double fy, double fz) {
  if (!std::isfinite(fx) || !std::isfinite(fy) || !std::isfinite(fz))
    throw std::invalid_argument("sensed_force: non-finite component");
  return std::sqrt(fx * fx + fy * fy + fz * fz);
}

Vec pad(const Vec& seq, std::size_t target_len, PadMode mode) {
  if (seq.empty()) throw std::invalid_argument("pad: empty sequence");
  if (target_len < seq.size())
    throw std::invalid_argument("pad: target length shorter than sequence");
  Vec out = seq;
  out.resize(target_len, mode == PadMode::Zero ? 0.0 : seq.back());
  return out;
}

Vec assemble_features(const TrialRecord& trial, std::size_t t) {
  if (t >= trial.length()) {
    std::ostringstream ss;
    ss << "assemble_features: frame " << t << " out of range for trial of "
       << trial.length() << " frames";
    throw std::invalid_argument(ss.str());
  }
  Vec a;
  a.reserve(10);
  a.push_back(trial.theta[t]);
  a.push_back(trial.force[t]);
  const Vec z = trial.ctx.as_vector();
  a.insert(a.end(), z.begin(), z.end());
  return a;
}

// ---------------------------------------------------------------------------
// Fill oracle
// ---------------------------------------------------------------------------

double cylinder_capacity(double tilt_deg, double radius_m, double height_m) {
  if (radius_m <= 0.0 || height_m <= 0.0)
    throw std::invalid_argument("cylinder_capacity: non-positive geometry");
  const double t = std::abs(tilt_deg);
  if (t >= 90.0) return 0.0;
  const double full = kPi * radius_m * radius_m * height_m;
  if (t == 0.0) return full;
  const double tan_t = std::tan(t * kPi / 180.0);
  if (tan_t <= height_m / (2.0 * radius_m)) {
    // Surface still meets the wall all the way around.
    return kPi * radius_m * radius_m * (height_m - radius_m * tan_t);
  }
  // Hoof over the chord x = a.
  const double a = radius_m - height_m / tan_t;
  const double r2 = radius_m * radius_m;
  const double s = std::sqrt(std::max(0.0, r2 - a * a));
  const double v = tan_t * ((2.0 / 3.0) * s * s * s + a * a * s -
                            a * r2 * std::acos(a / radius_m));
  return std::max(0.0, v);
}

double capacity_tilt_for_volume(double volume_m3, double radius_m,
                                double height_m) {
  const double full = kPi * radius_m * radius_m * height_m;
  if (volume_m3 >= full) return 0.0;
  if (volume_m3 <= 0.0) return 90.0;
  double lo = 0.0, hi = 90.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (cylinder_capacity(mid, radius_m, height_m) > volume_m3)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

FillState::FillState(double radius_m, double height_m, double fill_volume_m3,
                     double density_ratio, double empty_lbf)
    : radius_m_(radius_m),
      height_m_(height_m),
      density_ratio_(density_ratio),
      empty_lbf_(empty_lbf),
      retained_m3_(fill_volume_m3) {
  const double full = kPi * radius_m * radius_m * height_m;
  if (fill_volume_m3 < 0.0 || fill_volume_m3 > full)
    throw std::invalid_argument("FillState: fill volume outside [0, brim]");
}

FillState::FillState(const StaticContext& ctx)
    : FillState(ctx.d_cup_mm / 2000.0, ctx.h_cup_mm / 1000.0,
                std::max(0.0, ctx.f_init_lbf - ctx.f_empty_lbf) /
                    material_weight_lbf(1.0, ctx.rho),
                ctx.rho, ctx.f_empty_lbf) {
  // A jittered f_init reading can imply slightly more than a brimful cup;
  // clamp to the brim instead of rejecting.
  const double full = kPi * radius_m_ * radius_m_ * height_m_;
  retained_m3_ = std::min(retained_m3_, full);
}

double FillState::weight_lbf(double volume_m3) const {
  return material_weight_lbf(volume_m3, density_ratio_);
}

double FillState::force_at(double theta_deg) {
  const double cap = cylinder_capacity(theta_deg, radius_m_, height_m_);
  retained_m3_ = std::min(retained_m3_, cap);
  return empty_lbf_ + weight_lbf(retained_m3_);
}

// ---------------------------------------------------------------------------
// Generator spec
// ---------------------------------------------------------------------------

GeneratorSpec GeneratorSpec::defaults() {
  GeneratorSpec s;
  s.cups = {{"c1", 60.0, 95.0, 0.18},  {"c2", 68.0, 100.0, 0.22},
            {"c3", 74.0, 108.0, 0.25}, {"c4", 81.0, 112.0, 0.29},
            {"c5", 88.0, 120.0, 0.33}, {"c6", 95.0, 130.0, 0.38}};
  s.containers = {{"k1", 150.0, 85.0}, {"k2", 140.0, 90.0},
                  {"k3", 130.0, 80.0}, {"k4", 120.0, 95.0},
                  {"k5", 110.0, 75.0}, {"k6", 100.0, 90.0},
                  {"k7", 90.0, 85.0},  {"k8", 80.0, 95.0},
                  {"k9", 70.0, 80.0},  {"k10", 58.0, 105.0}};
  s.materials = {{"water", 1.00}, {"beans", 0.85}, {"ice", 0.55}};
  s.trials_per_combo = 1;
  // Mirror the thin corner cell the original data collection ended up with.
  s.extra_cells = {{"c6", "k10", "ice", 7}};
  return s;
}

std::size_t GeneratorSpec::total_trials() const {
  std::size_t n =
      cups.size() * containers.size() * materials.size() * trials_per_combo;
  for (const auto& e : extra_cells) n += e.count;
  return n;
}

namespace {

template <typename T>
const T* find_by_id(const std::vector<T>& items, const std::string& id) {
  for (const auto& it : items)
    if (it.id == id) return &it;
  return nullptr;
}

}  // namespace

void GeneratorSpec::validate() const {
  std::vector<std::string> problems;
  if (cups.empty()) problems.push_back("no cups listed");
  if (containers.empty()) problems.push_back("no containers listed");
  if (materials.empty()) problems.push_back("no materials listed");
  for (const auto& c : cups)
    if (c.d_mm <= 0.0 || c.h_mm <= 0.0 || c.empty_lbf <= 0.0)
      problems.push_back("cup " + c.id + " has non-positive dimensions");
  for (const auto& k : containers)
    if (k.d_mm <= 0.0 || k.h_mm <= 0.0)
      problems.push_back("container " + k.id + " has non-positive dimensions");
  for (const auto& m : materials)
    if (m.rho <= 0.0)
      problems.push_back("material " + m.id + " has non-positive density");
  if (!(fill_frac_lo > 0.0 && fill_frac_lo <= fill_frac_hi))
    problems.push_back("fill fraction range is empty or non-positive");
  if (fill_frac_hi > 1.0)
    problems.push_back("fill fraction above the brim");
  if (!(pour_frac_lo > 0.0 && pour_frac_lo <= pour_frac_hi &&
        pour_frac_hi < 1.0))
    problems.push_back("pour fraction range must sit inside (0, 1)");
  if (std::max(std::abs(theta1_lo_deg), std::abs(theta1_hi_deg)) > 15.0)
    problems.push_back("start angle range leaves the near-level band (15 deg)");
  if (angle_jitter_deg < 0.0 || force_jitter_lbf < 0.0)
    problems.push_back("negative jitter");
  if (ramp_speed_base <= 0.0 || drain_speed_base <= 0.0 ||
      return_speed_base <= 0.0)
    problems.push_back("non-positive profile speed");
  if (!(return_fraction >= 0.0 && return_fraction < 1.0))
    problems.push_back("return fraction must be in [0, 1)");
  for (const auto& e : extra_cells) {
    if (!find_by_id(cups, e.cup_id))
      problems.push_back("extra cell names unknown cup " + e.cup_id);
    if (!find_by_id(containers, e.container_id))
      problems.push_back("extra cell names unknown container " +
                         e.container_id);
    if (!find_by_id(materials, e.material_id))
      problems.push_back("extra cell names unknown material " + e.material_id);
  }
  if (total_trials() == 0) problems.push_back("spec requests zero trials");
  if (!problems.empty()) {
    std::ostringstream ss;
    ss << "generator spec invalid (" << problems.size() << " problem"
       << (problems.size() == 1 ? "" : "s") << "):";
    for (const auto& p : problems) ss << "\n  - " << p;
    throw std::invalid_argument(ss.str());
  }
}

GeneratorSpec GeneratorSpec::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open generator spec " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("generator spec " + path + ": " + e.what());
  }

  GeneratorSpec s = defaults();
  if (j.contains("cups")) {
    s.cups.clear();
    for (const auto& c : j.at("cups"))
      s.cups.push_back({c.at("id").get<std::string>(), c.at("d_mm"),
                        c.at("h_mm"), c.at("empty_lbf")});
  }
  if (j.contains("containers")) {
    s.containers.clear();
    for (const auto& c : j.at("containers"))
      s.containers.push_back(
          {c.at("id").get<std::string>(), c.at("d_mm"), c.at("h_mm")});
  }
  if (j.contains("materials")) {
    s.materials.clear();
    for (const auto& m : j.at("materials"))
      s.materials.push_back({m.at("id").get<std::string>(), m.at("rho")});
  }
  if (j.contains("extra_cells")) {
    s.extra_cells.clear();
    for (const auto& e : j.at("extra_cells"))
      s.extra_cells.push_back({e.at("cup").get<std::string>(),
                               e.at("container").get<std::string>(),
                               e.at("material").get<std::string>(),
                               e.at("count").get<std::size_t>()});
  }
  auto opt = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  opt("trials_per_combo", s.trials_per_combo);
  opt("fill_frac_lo", s.fill_frac_lo);
  opt("fill_frac_hi", s.fill_frac_hi);
  opt("pour_frac_lo", s.pour_frac_lo);
  opt("pour_frac_hi", s.pour_frac_hi);
  opt("theta1_lo_deg", s.theta1_lo_deg);
  opt("theta1_hi_deg", s.theta1_hi_deg);
  opt("angle_jitter_deg", s.angle_jitter_deg);
  opt("force_jitter_lbf", s.force_jitter_lbf);
  opt("ramp_speed_base", s.ramp_speed_base);
  opt("ramp_speed_rho", s.ramp_speed_rho);
  opt("drain_speed_base", s.drain_speed_base);
  opt("drain_speed_rho", s.drain_speed_rho);
  opt("drain_speed_ctn", s.drain_speed_ctn);
  opt("hold_frames", s.hold_frames);
  opt("return_fraction", s.return_fraction);
  opt("return_speed_base", s.return_speed_base);
  opt("return_speed_cup", s.return_speed_cup);
  opt("settle_frames", s.settle_frames);
  return s;
}

// ---------------------------------------------------------------------------
// Trial synthesis
// ---------------------------------------------------------------------------

namespace {

struct JitterWave {
  double amp;
  double freq;   // cycles per trial
  double phase;
};

TrialRecord generate_trial(const GeneratorSpec& spec, const CupSpec& cup,
                           const ContainerSpec& ctn, const MaterialSpec& mat,
                           std::size_t index, Rng rng) {
  const double fill = rng.uniform(spec.fill_frac_lo, spec.fill_frac_hi);
  const double pour = rng.uniform(spec.pour_frac_lo, spec.pour_frac_hi);
  const double theta1 = rng.uniform(spec.theta1_lo_deg, spec.theta1_hi_deg);

  const double radius = cup.d_mm / 2000.0;
  const double height = cup.h_mm / 1000.0;
  const double v_full = kPi * radius * radius * height;
  const double v_fill = fill * v_full;
  const double v_keep = (1.0 - pour) * v_fill;

  // Key angles: where spilling starts and where the demanded amount is out.
  const double theta_flow = capacity_tilt_for_volume(v_fill, radius, height);
  const double theta_pour = capacity_tilt_for_volume(v_keep, radius, height);
  const double theta_end = spec.return_fraction * theta_flow;

  // Phase speeds (deg/frame); material and geometry leave their mark here,
  // which is what the holdout cases later probe.
  const double v_ramp = spec.ramp_speed_base + spec.ramp_speed_rho * mat.rho;
  const double v_drain = spec.drain_speed_base +
                         spec.drain_speed_rho * mat.rho +
                         spec.drain_speed_ctn * (90.0 / ctn.d_mm);
  const double v_return =
      spec.return_speed_base +
      spec.return_speed_cup * (cup.h_mm / 110.0 - 1.0);

  const auto frames_for = [](double span_deg, double speed, std::size_t lo) {
    const double f = std::ceil(std::max(span_deg, 0.0) / speed);
    return std::max<std::size_t>(lo, static_cast<std::size_t>(f));
  };
  const std::size_t d_ramp = frames_for(theta_flow - theta1, v_ramp, 8);
  const std::size_t d_drain = frames_for(theta_pour - theta_flow, v_drain, 6);
  const std::size_t d_return = frames_for(theta_pour - theta_end, v_return, 8);
  const std::size_t n_frames =
      d_ramp + d_drain + spec.hold_frames + d_return + spec.settle_frames + 1;

  // Smooth band-limited wobble. Its point std is angle_jitter_deg, but being
  // low frequency it perturbs frame-to-frame velocity only marginally.
  JitterWave waves[3];
  const double amp = spec.angle_jitter_deg * std::sqrt(2.0 / 3.0);
  for (auto& w : waves) {
    w.amp = amp;
    w.freq = rng.uniform(0.5, 2.5);
    w.phase = rng.uniform(0.0, 2.0 * kPi);
  }

  TrialRecord tr;
  tr.cup_id = cup.id;
  tr.container_id = ctn.id;
  tr.material_id = mat.id;
  tr.provenance = Provenance::Synthetic;
  {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "t%04zu", index + 1);
    tr.id = buf;
  }

  tr.theta.resize(n_frames);
  for (std::size_t n = 0; n < n_frames; ++n) {
    double base;
    std::size_t k = n;
    if (k <= d_ramp) {
      base = theta1 + (theta_flow - theta1) *
                          smoothstep(static_cast<double>(k) / d_ramp);
    } else if ((k -= d_ramp) <= d_drain) {
      base = theta_flow + (theta_pour - theta_flow) *
                              smoothstep(static_cast<double>(k) / d_drain);
    } else if ((k -= d_drain) <= spec.hold_frames) {
      base = theta_pour;
    } else if ((k -= spec.hold_frames) <= d_return) {
      base = theta_pour - (theta_pour - theta_end) *
                              smoothstep(static_cast<double>(k) / d_return);
    } else {
      base = theta_end;
    }
    double jitter = 0.0;
    for (const auto& w : waves)
      jitter += w.amp * std::sin(2.0 * kPi * w.freq * n / n_frames + w.phase);
    tr.theta[n] = base + jitter;
  }

  FillState state(radius, height, v_fill, mat.rho, cup.empty_lbf);
  tr.force.resize(n_frames);
  for (std::size_t n = 0; n < n_frames; ++n) {
    const double f = state.force_at(tr.theta[n]) +
                     rng.normal(0.0, spec.force_jitter_lbf);
    tr.force[n] = std::max(cup.empty_lbf, f);
  }

  tr.ctx.f_init_lbf = tr.force.front();
  tr.ctx.f_empty_lbf = cup.empty_lbf;
  tr.ctx.f_final_lbf = tr.force.back();
  tr.ctx.d_cup_mm = cup.d_mm;
  tr.ctx.h_cup_mm = cup.h_mm;
  tr.ctx.d_ctn_mm = ctn.d_mm;
  tr.ctx.h_ctn_mm = ctn.h_mm;
  tr.ctx.rho = mat.rho;
  return tr;
}

}  // namespace

Corpus synthesize_corpus(const GeneratorSpec& spec, std::uint64_t seed) {
  spec.validate();
  Corpus corpus;
  corpus.trials.reserve(spec.total_trials());
  const Rng base(seed);
  std::size_t index = 0;
  for (const auto& cup : spec.cups)
    for (const auto& ctn : spec.containers)
      for (const auto& mat : spec.materials)
        for (std::size_t rep = 0; rep < spec.trials_per_combo; ++rep) {
          corpus.trials.push_back(
              generate_trial(spec, cup, ctn, mat, index, base.fork(index)));
          ++index;
        }
  for (const auto& cell : spec.extra_cells) {
    const CupSpec* cup = find_by_id(spec.cups, cell.cup_id);
    const ContainerSpec* ctn = find_by_id(spec.containers, cell.container_id);
    const MaterialSpec* mat = find_by_id(spec.materials, cell.material_id);
    for (std::size_t rep = 0; rep < cell.count; ++rep) {
      corpus.trials.push_back(
          generate_trial(spec, *cup, *ctn, *mat, index, base.fork(index)));
      ++index;
    }
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Corpus files
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kManifestHeader =
    "trial_id,cup_id,container_id,material_id,f_init_lbf,f_empty_lbf,"
    "f_final_lbf,d_cup_mm,h_cup_mm,d_ctn_mm,h_ctn_mm,rho,length,file";

void check_trial_invariants(const TrialRecord& tr, const std::string& where) {
  if (tr.length() < 2)
    throw std::runtime_error(where + ": trial needs at least 2 frames");
  if (tr.force.size() != tr.theta.size())
    throw std::runtime_error(where + ": theta/force length mismatch");
  if (std::abs(tr.theta.front()) > 15.0)
    throw std::runtime_error(where + ": first angle is not near level");
  for (double f : tr.force)
    if (!(f >= 0.0)) throw std::runtime_error(where + ": negative force");
}

}  // namespace

void save_corpus(const Corpus& corpus, const std::string& dir) {
  if (corpus.empty()) throw std::invalid_argument("save_corpus: empty corpus");
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  std::ofstream manifest(fs::path(dir) / "manifest.csv");
  if (!manifest)
    throw std::runtime_error("save_corpus: cannot write manifest in " + dir);
  manifest << kManifestHeader << "\n";
  for (const auto& tr : corpus.trials) {
    const std::string file = tr.id + ".csv";
    const Vec z = tr.ctx.as_vector();
    manifest << tr.id << ',' << tr.cup_id << ',' << tr.container_id << ','
             << tr.material_id;
    for (double v : z) manifest << ',' << fmt_g17(v);
    manifest << ',' << tr.length() << ',' << file << "\n";

    std::ofstream out(fs::path(dir) / file);
    if (!out) throw std::runtime_error("save_corpus: cannot write " + file);
    out << "t,theta_deg,force_lbf\n";
    for (std::size_t t = 0; t < tr.length(); ++t)
      out << (t + 1) << ',' << fmt_g17(tr.theta[t]) << ','
          << fmt_g17(tr.force[t]) << "\n";
  }
}

Corpus load_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path manifest_path = fs::path(dir) / "manifest.csv";
  std::ifstream manifest(manifest_path);
  if (!manifest)
    throw std::runtime_error("load_corpus: cannot open " +
                             manifest_path.string());

  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(manifest, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line.rfind("trial_id,", 0) != 0)
        throw std::runtime_error(manifest_path.string() +
                                 ":1: missing manifest header");
      continue;
    }
    const auto f = split_csv_line(line);
    const std::string where =
        manifest_path.string() + ":" + std::to_string(lineno);
    if (f.size() != 14)
      throw std::runtime_error(where + ": expected 14 fields, got " +
                               std::to_string(f.size()));
    TrialRecord tr;
    tr.id = f[0];
    tr.cup_id = f[1];
    tr.container_id = f[2];
    tr.material_id = f[3];
    tr.ctx.f_init_lbf = parse_double(f[4], where + " f_init");
    tr.ctx.f_empty_lbf = parse_double(f[5], where + " f_empty");
    tr.ctx.f_final_lbf = parse_double(f[6], where + " f_final");
    tr.ctx.d_cup_mm = parse_double(f[7], where + " d_cup");
    tr.ctx.h_cup_mm = parse_double(f[8], where + " h_cup");
    tr.ctx.d_ctn_mm = parse_double(f[9], where + " d_ctn");
    tr.ctx.h_ctn_mm = parse_double(f[10], where + " h_ctn");
    tr.ctx.rho = parse_double(f[11], where + " rho");
    const std::size_t expect_len = parse_count(f[12], where + " length");
    tr.provenance = Provenance::Imported;

    const fs::path trial_path = fs::path(dir) / f[13];
    std::ifstream in(trial_path);
    if (!in)
      throw std::runtime_error(where + ": cannot open trial file " +
                               trial_path.string());
    std::string row;
    std::size_t rowno = 0;
    while (std::getline(in, row)) {
      ++rowno;
      if (row.empty()) continue;
      if (rowno == 1) continue;  // header
      const auto c = split_csv_line(row);
      const std::string rwhere =
          trial_path.string() + ":" + std::to_string(rowno);
      if (c.size() != 3)
        throw std::runtime_error(rwhere + ": expected 3 fields, got " +
                                 std::to_string(c.size()));
      tr.theta.push_back(parse_double(c[1], rwhere + " theta_deg"));
      tr.force.push_back(parse_double(c[2], rwhere + " force_lbf"));
    }
    if (tr.length() != expect_len) {
      std::ostringstream ss;
      ss << where << ": manifest says " << expect_len << " frames but "
         << trial_path.string() << " holds " << tr.length();
      throw std::runtime_error(ss.str());
    }
    check_trial_invariants(tr, where);
    corpus.trials.push_back(std::move(tr));
  }
  if (corpus.empty())
    throw std::runtime_error("load_corpus: " + manifest_path.string() +
                             " lists no trials");
  return corpus;
}

// ---------------------------------------------------------------------------
// Splits
// ---------------------------------------------------------------------------

std::vector<std::string> unseen_elements(int case_id, const UnseenIds& ids) {
  switch (case_id) {
    case 1: return {"cup:" + ids.cup_id};
    case 2: return {"container:" + ids.container_id};
    case 3: return {"material:" + ids.material_id};
    case 4: return {"cup:" + ids.cup_id, "container:" + ids.container_id};
    case 5:
      return {"container:" + ids.container_id, "material:" + ids.material_id};
    case 6: return {"cup:" + ids.cup_id, "material:" + ids.material_id};
    case 7:
      return {"cup:" + ids.cup_id, "container:" + ids.container_id,
              "material:" + ids.material_id};
    default:
      throw std::invalid_argument("holdout case must be 1..7, got " +
                                  std::to_string(case_id));
  }
}

Split holdout_split(const Corpus& corpus, int case_id, const UnseenIds& ids) {
  const bool use_cup = case_id == 1 || case_id == 4 || case_id == 6 ||
                       case_id == 7;
  const bool use_ctn = case_id == 2 || case_id == 4 || case_id == 5 ||
                       case_id == 7;
  const bool use_mat = case_id == 3 || case_id == 5 || case_id == 6 ||
                       case_id == 7;
  if (case_id < 1 || case_id > 7)
    throw std::invalid_argument("holdout case must be 1..7, got " +
                                std::to_string(case_id));

  Split split;
  for (std::size_t idx = 0; idx < corpus.trials.size(); ++idx) {
    const TrialRecord& tr = corpus.trials[idx];
    int hits = 0, active = 0;
    if (use_cup) {
      ++active;
      if (tr.cup_id == ids.cup_id) ++hits;
    }
    if (use_ctn) {
      ++active;
      if (tr.container_id == ids.container_id) ++hits;
    }
    if (use_mat) {
      ++active;
      if (tr.material_id == ids.material_id) ++hits;
    }
    if (hits == active)
      split.test.push_back(idx);
    else if (hits == 0)
      split.train.push_back(idx);
    // trials mixing seen and unseen designated elements are dropped
  }
  if (split.train.empty() || split.test.empty()) {
    std::ostringstream ss;
    ss << "holdout case " << case_id << ": split has " << split.train.size()
       << " train / " << split.test.size() << " test trials";
    throw std::runtime_error(ss.str());
  }
  return split;
}

}  // namespace pourgen
