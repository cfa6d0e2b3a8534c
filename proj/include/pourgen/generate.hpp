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

#include <memory>
#include <string>

#include "pourgen/dataset.hpp"
#include "pourgen/network.hpp"

namespace pourgen {

enum class Termination { StoppedByStp, HitMaxSteps };

const char* to_string(Termination t);

/// Closed-loop rollout. theta has one more entry than omega and satisfies
/// theta[t+1] = theta[t] + omega[t] exactly. force holds the feedback that
/// was consumed per frame; when stp fires, the force computed for the final
/// angle is discarded (it is produced after the stop check and never used),
/// so force is then one entry shorter than theta.
struct GeneratedTrajectory {
  Vec theta;   // degrees
  Vec omega;   // degrees per step
  Vec force;   // lbf
  Vec p_stop;  // class-1 probability at each executed step
  Termination termination = Termination::HitMaxSteps;

  std::size_t steps() const { return omega.size(); }
};

/// Feedback contract (theta, z) -> f. z is bound at construction;
/// realizations may keep deterministic internal state (a spill ratchet or a
/// recurrent network), which is reset by constructing a fresh source.
class ForceSource {
 public:
  virtual ~ForceSource() = default;
  /// Finite, non-negative sensed force after moving to theta.
  virtual double force(double theta_deg) = 0;
};

/// Ground-truth simulator: the tilted-cylinder fill oracle.
class OracleForceSource : public ForceSource {
 public:
  explicit OracleForceSource(const StaticContext& z) : state_(z) {}
  double force(double theta_deg) override { return state_.force_at(theta_deg); }

 private:
  FillState state_;
};

/// The frc network as a feedback source; the first query initializes the
/// network from [theta_1, z] and produces f_1.
class FrcForceSource : public ForceSource {
 public:
  FrcForceSource(const NetworkBundle& frc, const StaticContext& z);
  double force(double theta_deg) override;

 private:
  NetRunner runner_;
  StaticContext z_;
  std::size_t queries_ = 0;
};

class ConstantForceSource : public ForceSource {
 public:
  explicit ConstantForceSource(double f) : f_(f) {}
  double force(double) override { return f_; }

 private:
  double f_;
};

/// Closed-loop generation with environment-supplied force: initialize vel
/// and stp from [theta_1, f_1, z], then per step emit a velocity, integrate
/// the angle, query the stop classifier on the pre-integration state, and
/// fetch the next force. Stops when stp picks class 1; the t_max guard
/// (absent from the live formulation, present in the simulated one) bounds
/// runaway rollouts.
GeneratedTrajectory generate_live(const NetworkBundle& vel,
                                  const NetworkBundle& stp, ForceSource& fsrc,
                                  double theta1, const StaticContext& z,
                                  std::size_t t_max);

/// Same loop with the frc network supplying the feedback (simulation).
GeneratedTrajectory generate_simulated(const NetworkBundle& frc,
                                       const NetworkBundle& vel,
                                       const NetworkBundle& stp, double theta1,
                                       const StaticContext& z,
                                       std::size_t t_max);

/// CSV (t, theta_deg, omega, force_lbf, p_stop). The terminal row leaves
/// omega/p_stop (and force, when it was discarded) empty; a trailing
/// "# termination=...,steps=N" line summarizes the run.
void save_trajectory_csv(const GeneratedTrajectory& traj,
                         const std::string& path);

}  // namespace pourgen
