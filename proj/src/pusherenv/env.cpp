#include "pusherenv/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "seqvae/model.hpp" // wrap_angle

namespace pusherenv {

namespace {
constexpr double kPi = 3.14159265358979323846;

double clip(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }
} // namespace

std::string mode_name(Mode m) {
    switch (m) {
        case Mode::Deterministic: return "deterministic";
        case Mode::Stochastic: return "stochastic";
        case Mode::Ood: return "ood";
    }
    return "?";
}

Mode mode_from_name(const std::string& name) {
    if (name == "deterministic") return Mode::Deterministic;
    if (name == "stochastic") return Mode::Stochastic;
    if (name == "ood") return Mode::Ood;
    throw std::invalid_argument("unknown environment mode: '" + name + "'");
}

std::vector<double> EnvState::to_vector() const {
    return {q1, q2, ball_x, ball_y, ball_vx, ball_vy, target_x, target_y};
}

EnvState EnvState::from_vector(const std::vector<double>& v) {
    if (v.size() != kStateDim) throw std::invalid_argument("EnvState: need 8 values");
    EnvState s;
    s.q1 = v[0];
    s.q2 = v[1];
    s.ball_x = v[2];
    s.ball_y = v[3];
    s.ball_vx = v[4];
    s.ball_vy = v[5];
    s.target_x = v[6];
    s.target_y = v[7];
    return s;
}

const std::vector<std::string>& state_labels() {
    static const std::vector<std::string> labels{"shoulder_angle", "elbow_angle", "ball_x", "ball_y",
                                                 "ball_vx",        "ball_vy",     "target_x", "target_y"};
    return labels;
}

const std::vector<std::string>& moving_labels() {
    static const std::vector<std::string> labels{"shoulder_angle", "elbow_angle", "ball_x",
                                                 "ball_y",         "ball_vx",     "ball_vy"};
    return labels;
}

const std::vector<std::size_t>& angular_dims() {
    static const std::vector<std::size_t> dims{0, 1};
    return dims;
}

void EnvConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("env config: dt must be positive");
    if (!(sigma_a >= 0.0)) throw std::invalid_argument("env config: sigma_a must be nonnegative");
    if (!(l1 > 0.0 && l2 > 0.0 && fingertip_radius > 0.0 && ball_radius > 0.0))
        throw std::invalid_argument("env config: geometry must be positive");
    if (!(drag > 0.0 && drag <= 1.0)) throw std::invalid_argument("env config: drag must lie in (0, 1]");
}

EnvConfig make_config(Mode mode) {
    EnvConfig cfg;
    cfg.mode = mode;
    cfg.sigma_a = mode == Mode::Stochastic ? 0.3 : 0.0;
    return cfg;
}

std::array<double, 2> forward_kinematics(double q1, double q2, const EnvConfig& cfg) {
    return {cfg.l1 * std::cos(q1) + cfg.l2 * std::cos(q1 + q2),
            cfg.l1 * std::sin(q1) + cfg.l2 * std::sin(q1 + q2)};
}

void resolve_contact(const std::array<double, 2>& tip, const std::array<double, 2>& tip_vel,
                     std::array<double, 2>& ball, std::array<double, 2>& ball_vel, const EnvConfig& cfg) {
    const double reach = cfg.fingertip_radius + cfg.ball_radius;
    const double dx = ball[0] - tip[0];
    const double dy = ball[1] - tip[1];
    const double dist = std::sqrt(dx * dx + dy * dy);
    if (dist >= reach) return;

    double nx, ny;
    if (dist > 1e-9) {
        nx = dx / dist;
        ny = dy / dist;
    } else { // concentric circles: push along +x by convention
        nx = 1.0;
        ny = 0.0;
    }
    // project the ball out of penetration
    ball[0] += (reach - dist) * nx;
    ball[1] += (reach - dist) * ny;
    // push only: raise the ball's normal velocity to the fingertip's
    const double vn_tip = tip_vel[0] * nx + tip_vel[1] * ny;
    const double vn_ball = ball_vel[0] * nx + ball_vel[1] * ny;
    if (vn_tip > vn_ball) {
        ball_vel[0] += (vn_tip - vn_ball) * nx;
        ball_vel[1] += (vn_tip - vn_ball) * ny;
    }
}

EnvState step(const EnvState& state, const std::array<double, 2>& action, const EnvConfig& cfg,
              numkit::Rng& rng) {
    cfg.validate();
    std::array<double, 2> eff{action[0], action[1]};
    if (cfg.sigma_a > 0.0) {
        eff[0] += cfg.sigma_a * rng.normal();
        eff[1] += cfg.sigma_a * rng.normal();
    }
    eff[0] = clip(eff[0], -1.0, 1.0);
    eff[1] = clip(eff[1], -1.0, 1.0);

    EnvState next = state;
    next.q1 = seqvae::wrap_angle(state.q1 + cfg.dt * eff[0]);
    next.q2 = seqvae::wrap_angle(state.q2 + cfg.dt * eff[1]);

    const std::array<double, 2> tip_before = forward_kinematics(state.q1, state.q2, cfg);
    const std::array<double, 2> tip_after = forward_kinematics(next.q1, next.q2, cfg);
    const std::array<double, 2> tip_vel{(tip_after[0] - tip_before[0]) / cfg.dt,
                                        (tip_after[1] - tip_before[1]) / cfg.dt};

    std::array<double, 2> ball{state.ball_x, state.ball_y};
    std::array<double, 2> ball_vel{cfg.drag * state.ball_vx, cfg.drag * state.ball_vy};
    resolve_contact(tip_after, tip_vel, ball, ball_vel, cfg);

    ball[0] += cfg.dt * ball_vel[0];
    ball[1] += cfg.dt * ball_vel[1];
    // arena walls: clamp and kill velocity on the clamped axis
    for (int axis = 0; axis < 2; ++axis) {
        if (ball[axis] < -2.0 || ball[axis] > 2.0) {
            ball[axis] = clip(ball[axis], -2.0, 2.0);
            ball_vel[axis] = 0.0;
        }
    }
    next.ball_x = ball[0];
    next.ball_y = ball[1];
    next.ball_vx = ball_vel[0];
    next.ball_vy = ball_vel[1];
    return next;
}

std::array<double, 2> scripted_policy(const EnvState& state, const EnvConfig& cfg) {
    const double bx = state.ball_x, by = state.ball_y;
    const double dx = state.target_x - bx, dy = state.target_y - by;
    const double dist_bt = std::sqrt(dx * dx + dy * dy);
    if (dist_bt < 0.03) return {0.0, 0.0}; // ball at target: dead zone

    const double ux = dx / dist_bt, uy = dy / dist_bt; // push direction
    const double standoff = cfg.fingertip_radius + cfg.ball_radius + 0.04;
    std::array<double, 2> behind{bx - standoff * ux, by - standoff * uy};
    // if the behind-point escapes the workspace, settle for its reachable shadow
    const double reach_lim = 0.97 * (cfg.l1 + cfg.l2);
    const double behind_r = std::sqrt(behind[0] * behind[0] + behind[1] * behind[1]);
    if (behind_r > reach_lim) {
        behind[0] *= reach_lim / behind_r;
        behind[1] *= reach_lim / behind_r;
    }

    const std::array<double, 2> tip = forward_kinematics(state.q1, state.q2, cfg);
    const double rbx = tip[0] - bx, rby = tip[1] - by; // ball -> tip
    const double rd = std::sqrt(rbx * rbx + rby * rby);
    const double nx = rd > 1e-9 ? rbx / rd : 1.0;
    const double ny = rd > 1e-9 ? rby / rd : 0.0;
    const double align = -(nx * ux + ny * uy);                     // 1 when exactly behind
    const double e_ang = std::acos(clip(align, -1.0, 1.0));       // angle off the push axis
    const double axial = -(rbx * ux + rby * uy);                  // > 0 when behind the ball
    const double latx = rbx + axial * ux, laty = rby + axial * uy; // offset from the push line
    const double lat = std::sqrt(latx * latx + laty * laty);

    // the ball coasts ~4.5x its speed under drag 0.9, so a push launched off
    // the ball->target line misses by a lot; contact is allowed only once the
    // fingertip sits on that line, and everything else steers around the ball.
    // Under actuation noise exact alignment is unreachable, so the engagement
    // gates widen with sigma_a: better to push imperfectly than to dither.
    const double ang_gate = 0.15 + 0.6 * cfg.sigma_a;
    const double lat_gate = 0.025 + 0.15 * cfg.sigma_a;
    std::array<double, 2> v_des{0.0, 0.0};
    if (e_ang <= ang_gate && lat <= lat_gate && rd <= 0.26) {
        // push: drive through the ball at a firm gap-proportional speed (a
        // ball bumped to v rolls 4.5 v before drag parks it). The floor keeps
        // every push emphatic — the success boundary scores the closest
        // approach, so overshooting a near target is harmless, while a graze
        // barely moves the ball.
        const double speed = clip(dist_bt / 4.5, 0.15, 0.30);
        v_des = {speed * ux - 2.0 * latx, speed * uy - 2.0 * laty};
        const double sp = std::sqrt(v_des[0] * v_des[0] + v_des[1] * v_des[1]);
        if (sp > 0.32) {
            v_des[0] *= 0.32 / sp;
            v_des[1] *= 0.32 / sp;
        }
    } else if (e_ang <= 0.35 && rd <= 0.30) {
        // settle onto the stand-off point behind the ball
        v_des = {2.0 * (behind[0] - tip[0]), 2.0 * (behind[1] - tip[1])};
        const double sp = std::sqrt(v_des[0] * v_des[0] + v_des[1] * v_des[1]);
        if (sp > 0.22) {
            v_des[0] *= 0.22 / sp;
            v_des[1] *= 0.22 / sp;
        }
        if (rd < 0.165) { // grazing distance: back off radially
            v_des[0] += 2.5 * (0.165 - rd) * nx;
            v_des[1] += 2.5 * (0.165 - rd) * ny;
        }
    } else if (rd > 0.45) {
        // far away: head for a point well behind the ball
        std::array<double, 2> goal{bx - 0.30 * ux, by - 0.30 * uy};
        v_des = {1.6 * (goal[0] - tip[0]), 1.6 * (goal[1] - tip[1])};
        const double sp = std::sqrt(v_des[0] * v_des[0] + v_des[1] * v_des[1]);
        if (sp > 0.45) {
            v_des[0] *= 0.45 / sp;
            v_des[1] *= 0.45 / sp;
        }
    } else {
        // orbit around the ball toward the behind sector; the side of the
        // push line picks the turn direction and cannot flip mid-orbit
        const double side = (ux * ny - uy * nx) >= 0.0 ? 1.0 : -1.0;
        const double vt = clip(0.9 * e_ang * rd, 0.07, 0.20);
        v_des = {vt * side * -ny + 1.5 * (0.20 - rd) * nx,
                 vt * side * nx + 1.5 * (0.20 - rd) * ny};
        const double sp = std::sqrt(v_des[0] * v_des[0] + v_des[1] * v_des[1]);
        if (sp > 0.24) {
            v_des[0] *= 0.24 / sp;
            v_des[1] *= 0.24 / sp;
        }
        if (rd < 0.165) {
            v_des[0] += 2.5 * (0.165 - rd) * nx;
            v_des[1] += 2.5 * (0.165 - rd) * ny;
        }
    }
    if (rd < 0.40 && e_ang > 0.35) {
        // misaligned near the ball: strip any inward component
        const double v_in = v_des[0] * nx + v_des[1] * ny;
        if (v_in < 0.0) {
            v_des[0] -= v_in * nx;
            v_des[1] -= v_in * ny;
        }
    }

    // damped-least-squares inverse kinematics: qdot = J^T (J J^T + s^2 I)^-1 v
    const double s1 = std::sin(state.q1), c1 = std::cos(state.q1);
    const double s12 = std::sin(state.q1 + state.q2), c12 = std::cos(state.q1 + state.q2);
    const double j11 = -cfg.l1 * s1 - cfg.l2 * s12, j12 = -cfg.l2 * s12;
    const double j21 = cfg.l1 * c1 + cfg.l2 * c12, j22 = cfg.l2 * c12;
    const double damp = 0.05 * 0.05;
    const double m11 = j11 * j11 + j12 * j12 + damp;
    const double m12 = j11 * j21 + j12 * j22;
    const double m22 = j21 * j21 + j22 * j22 + damp;
    const double det = m11 * m22 - m12 * m12;
    const double w1 = (m22 * v_des[0] - m12 * v_des[1]) / det;
    const double w2 = (-m12 * v_des[0] + m11 * v_des[1]) / det;
    double qd1 = j11 * w1 + j21 * w2;
    double qd2 = j12 * w1 + j22 * w2;
    // saturate without bending the commanded tip direction
    const double mag = std::max(std::abs(qd1), std::abs(qd2));
    if (mag > 1.0) {
        qd1 /= mag;
        qd2 /= mag;
    }
    return {qd1, qd2};
}

EnvState sample_initial(Mode mode, numkit::Rng& rng) {
    EnvState s;
    s.q1 = rng.uniform(-kPi / 2.0, kPi / 2.0);
    s.q2 = rng.uniform(-kPi / 2.0, kPi / 2.0);
    const double r_lo = mode == Mode::Ood ? 1.1 : 0.3;
    const double r_hi = mode == Mode::Ood ? 1.4 : 0.9;
    for (;;) {
        // area-uniform over the annulus
        const double br = std::sqrt(rng.uniform(r_lo * r_lo, r_hi * r_hi));
        const double ba = rng.uniform(-kPi, kPi);
        const double tr = rng.uniform(0.4, 0.9);
        const double ta = rng.uniform(-kPi, kPi);
        s.ball_x = br * std::cos(ba);
        s.ball_y = br * std::sin(ba);
        s.target_x = tr * std::cos(ta);
        s.target_y = tr * std::sin(ta);
        const double dx = s.ball_x - s.target_x, dy = s.ball_y - s.target_y;
        if (dx * dx + dy * dy >= 0.2 * 0.2) break; // keep the task nontrivial
    }
    s.ball_vx = s.ball_vy = 0.0;
    return s;
}

EnvState canonical_start() {
    // Mid-push snapshot, one deterministic step after first contact. Rest
    // geometry: ball at radius 0.75 (angle 0.4), target at radius 0.45
    // (angle 1.6, a 0.72 m push), fingertip at the stand-off point behind
    // the ball — radius 0.894, joints inside the sampled (-pi/2, pi/2)
    // band. The controller's launch speed is calibrated (gap/4.5, the
    // coast-out distance under drag 0.9), so from the snapshot onward the
    // rolling ball reaches the target even without further contact, and the
    // scripted follow-through only adds margin.
    EnvState s;
    s.q1 = 0.7539;
    s.q2 = -0.9289;
    s.ball_x = 0.75 * std::cos(0.4);
    s.ball_y = 0.75 * std::sin(0.4);
    s.target_x = 0.45 * std::cos(1.6);
    s.target_y = 0.45 * std::sin(1.6);
    const EnvConfig cfg = make_config(Mode::Deterministic);
    numkit::Rng rng(0); // deterministic step consumes no randomness
    return step(s, scripted_policy(s, cfg), cfg, rng);
}

EnvState canonical_ood_start() {
    // The canonical task with the ball instead seen at rest out at radius
    // 1.25: outside the training annulus and past the arm's maximum contact
    // reach of 1.13, so no policy can move it and the true success
    // probability is exactly 0.
    EnvState s = canonical_start();
    s.ball_x = 1.25 * std::cos(0.4);
    s.ball_y = 1.25 * std::sin(0.4);
    s.ball_vx = 0.0;
    s.ball_vy = 0.0;
    return s;
}

} // namespace pusherenv
