#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "numkit/rng.hpp"

namespace pusherenv {

enum class Mode { Deterministic, Stochastic, Ood };

std::string mode_name(Mode m);
Mode mode_from_name(const std::string& name);

/// Planar 2-link arm with a pushable ball. D_s = 8, D_a = 2.
struct EnvState {
    double q1 = 0.0, q2 = 0.0;          // joint angles, wrapped to (-pi, pi]
    double ball_x = 0.0, ball_y = 0.0;  // meters, inside [-2, 2]^2
    double ball_vx = 0.0, ball_vy = 0.0;
    double target_x = 0.0, target_y = 0.0;

    std::vector<double> to_vector() const;
    static EnvState from_vector(const std::vector<double>& v);
};

constexpr std::size_t kStateDim = 8;
constexpr std::size_t kActionDim = 2;

/// Per-dimension report labels, aligned with EnvState order.
const std::vector<std::string>& state_labels();
/// The six non-constant dimensions (targets never move).
const std::vector<std::string>& moving_labels();
/// State dims living on the circle (the two joint angles).
const std::vector<std::size_t>& angular_dims();

struct EnvConfig {
    double dt = 0.5;               // seconds per step
    double l1 = 0.5, l2 = 0.5;     // link lengths, meters
    double fingertip_radius = 0.05;
    double ball_radius = 0.08;
    double drag = 0.9;             // ball velocity retention per step
    double sigma_a = 0.0;          // action noise scale (stochastic mode)
    Mode mode = Mode::Deterministic;

    void validate() const;
};

/// Config for a mode with its default noise level (0.3 for stochastic).
EnvConfig make_config(Mode mode);

std::array<double, 2> forward_kinematics(double q1, double q2, const EnvConfig& cfg);

/// Kinematic push: if the circles overlap, the ball is projected out of
/// penetration and its velocity along the contact normal is raised to the
/// fingertip's (push only, no pull, no restitution).
void resolve_contact(const std::array<double, 2>& tip, const std::array<double, 2>& tip_vel,
                     std::array<double, 2>& ball, std::array<double, 2>& ball_vel, const EnvConfig& cfg);

/// One environment step. Consumes rng only when sigma_a > 0, so the
/// deterministic mode is a pure function of (state, action).
EnvState step(const EnvState& state, const std::array<double, 2>& action, const EnvConfig& cfg,
              numkit::Rng& rng);

/// Deterministic two-phase pushing controller: move the fingertip to a
/// stand-off point behind the ball on the ball->target line, then drive
/// through the ball toward the target. Ball at target -> zero action.
std::array<double, 2> scripted_policy(const EnvState& state, const EnvConfig& cfg);

/// Initial-state law per mode. Training modes place the ball at radius
/// 0.3-0.9 (reachable); ood places it at 1.1-1.4, outside every training
/// sample and beyond the arm's reach of 1.0.
EnvState sample_initial(Mode mode, numkit::Rng& rng);

/// Fixed, reachable start used by the canonical reporting task: the state one
/// deterministic scripted step after the fingertip launches the ball toward
/// the target, i.e. a rolling ball mid-carry with ~0.6 m left to cover.
EnvState canonical_start();

/// The canonical task with the ball instead at rest at radius 1.25: outside
/// the training distribution and beyond contact reach, so p(success) = 0.
EnvState canonical_ood_start();

} // namespace pusherenv
