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

#include "pourgen/generate.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pourgen/textio.hpp"

namespace pourgen {

const char* to_string(Termination t) {
  return t == Termination::StoppedByStp ? "stopped_by_stp" : "hit_max_steps";
}

FrcForceSource::FrcForceSource(const NetworkBundle& frc,
                               const StaticContext& z)
    : runner_(frc), z_(z) {
  if (frc.kind != NetKind::Frc)
    throw std::invalid_argument("FrcForceSource: network is not frc");
}

double FrcForceSource::force(double theta_deg) {
  if (queries_ == 0) {
    // First query doubles as the learned-initial-state computation.
    Vec a{theta_deg, 0.0};
    const Vec zs = z_.as_vector();
    a.insert(a.end(), zs.begin(), zs.end());
    runner_.start(input_from_frame(NetKind::Frc, a));
  }
  ++queries_;
  const double f = frc_step(runner_, theta_deg, z_);
  if (!std::isfinite(f))
    throw std::runtime_error("frc force source produced a non-finite value");
  return std::max(0.0, f);
}

namespace {

double checked_force(ForceSource& fsrc, double theta, std::size_t step) {
  double f;
  try {
    f = fsrc.force(theta);
  } catch (const std::exception& e) {
    std::ostringstream ss;
    ss << "force source failed at step " << step << ": " << e.what();
    throw std::runtime_error(ss.str());
  }
  if (!std::isfinite(f) || f < 0.0) {
    std::ostringstream ss;
    ss << "force source returned invalid value " << f << " at step " << step;
    throw std::runtime_error(ss.str());
  }
  return f;
}

GeneratedTrajectory run_closed_loop(const NetworkBundle& vel,
                                    const NetworkBundle& stp,
                                    ForceSource& fsrc, double theta1,
                                    const StaticContext& z,
                                    std::size_t t_max) {
  if (vel.kind != NetKind::Vel)
    throw std::invalid_argument("generate: vel checkpoint is not vel");
  if (stp.kind != NetKind::Stp)
    throw std::invalid_argument("generate: stp checkpoint is not stp");
  if (t_max < 1)
    throw std::invalid_argument("generate: t_max must be at least 1");

  GeneratedTrajectory traj;
  double theta = theta1;
  double f = checked_force(fsrc, theta1, 1);
  traj.theta.push_back(theta);
  traj.force.push_back(f);

  NetRunner vel_runner(vel), stp_runner(stp);
  {
    Vec a{theta1, f};
    const Vec zs = z.as_vector();
    a.insert(a.end(), zs.begin(), zs.end());
    vel_runner.start(a);
    stp_runner.start(a);
  }

  traj.termination = Termination::HitMaxSteps;
  std::size_t t = 1;
  while (t < t_max) {
    const double omega = vel_step(vel_runner, theta, f, z);
    const double theta_next = theta + omega;
    const Vec s = stp_step(stp_runner, theta, f, z);
    const double f_next = checked_force(fsrc, theta_next, t + 1);
    ++t;

    traj.omega.push_back(omega);
    traj.theta.push_back(theta_next);
    traj.p_stop.push_back(s[1]);
    if (s[1] > s[0]) {
      // Printed order: f_{t+1} is produced before the stop check fires, so
      // on a stop it simply goes unused.
      traj.termination = Termination::StoppedByStp;
      break;
    }
    traj.force.push_back(f_next);
    theta = theta_next;
    f = f_next;
  }
  return traj;
}

}  // namespace

GeneratedTrajectory generate_live(const NetworkBundle& vel,
                                  const NetworkBundle& stp, ForceSource& fsrc,
                                  double theta1, const StaticContext& z,
                                  std::size_t t_max) {
  return run_closed_loop(vel, stp, fsrc, theta1, z, t_max);
}

GeneratedTrajectory generate_simulated(const NetworkBundle& frc,
                                       const NetworkBundle& vel,
                                       const NetworkBundle& stp, double theta1,
                                       const StaticContext& z,
                                       std::size_t t_max) {
  FrcForceSource fsrc(frc, z);
  return run_closed_loop(vel, stp, fsrc, theta1, z, t_max);
}

void save_trajectory_csv(const GeneratedTrajectory& traj,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("save_trajectory_csv: cannot write " + path);
  out << "t,theta_deg,omega,force_lbf,p_stop\n";
  for (std::size_t t = 0; t < traj.theta.size(); ++t) {
    out << (t + 1) << ',' << fmt_g17(traj.theta[t]) << ',';
    if (t < traj.omega.size()) out << fmt_g17(traj.omega[t]);
    out << ',';
    if (t < traj.force.size()) out << fmt_g17(traj.force[t]);
    out << ',';
    if (t < traj.p_stop.size()) out << fmt_g17(traj.p_stop[t]);
    out << "\n";
  }
  out << "# termination=" << to_string(traj.termination)
      << ",steps=" << traj.steps() << "\n";
}

}  // namespace pourgen
