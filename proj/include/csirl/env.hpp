#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "csirl/errors.hpp"
#include "csirl/rng.hpp"

// Two desk-scale multi-stage continuous-control tasks plus scripted expert
// controllers. Both are double-integrator point masses under semi-implicit
// Euler:  v <- clamp(v + a * a_scale * dt, +-v_max);  pos <- pos + v * dt.
// step() is a pure function of (state, action): there is no hidden simulator
// state, and the scripted traffic in lane_merge moves at constant velocity so
// its future is fully determined by the relative coordinates already in the
// state vector.
//
// point_umaze -- navigate a U-shaped corridor.
//   bounds [0,10]x[0,10], inner block [2,8]x[0,8] (so the corridor runs up the
//   left leg, across the top, down the right leg). Walls are non-fatal: the
//   normal velocity component is zeroed on contact. Route centerline
//   (1,0.8) -> (1,9) -> (9,9) -> (9,0.8), goal = disc of radius 0.5 around
//   (9,0.8). State (x, y, vx, vy), action (ax, ay), v_max 2, a_scale 1.
//
// lane_merge -- merge from a ramp into moving traffic, cruise, reach the exit.
//   Ego route (0,-4) -> (18,0) -> (48,0); three scripted cars drive the main
//   lane y=0 at constant seeded speeds in [2.4, 3.2] from seeded offsets
//   {4,12,20}+-2. Car overlap (|dx|<1.2 and |dy|<0.9) terminates with a
//   collision; reaching x>=44 with |y|<=1 is success. State = ego
//   (x, y, vx, vy) followed by each car's relative (dx, dy, dvx, dvy),
//   action (accel, steer) as longitudinal/lateral acceleration, v_max 4,
//   a_scale 2.

namespace csirl::env {

using Vec2 = std::array<double, 2>;

enum class EnvName { point_umaze, lane_merge };

struct EnvSpec {
    EnvName name = EnvName::point_umaze;
    int state_dim = 4;
    int action_dim = 2;
    int max_steps = 300;
    double dt = 0.1;

    static EnvSpec point_umaze() { return {EnvName::point_umaze, 4, 2, 300, 0.1}; }
    static EnvSpec lane_merge() { return {EnvName::lane_merge, 16, 2, 200, 0.1}; }

    static EnvSpec by_name(const std::string& name) {
        if (name == "point_umaze") return point_umaze();
        if (name == "lane_merge") return lane_merge();
        throw InvalidInputError("unknown environment: " + name);
    }

    std::string name_str() const { return name == EnvName::point_umaze ? "point_umaze" : "lane_merge"; }
};

struct StepResult {
    std::vector<double> next_state;
    bool done = false;
    bool success = false;
    bool collision = false;
    double progress = 0.0;
};

// State representation used by potentials and matching rewards: the ego
// position coordinates.
struct PosProj {
    int ix = 0;
    int iy = 1;
    Vec2 operator()(std::span<const double> s) const { return {s[ix], s[iy]}; }
};

inline PosProj pos_projection(const EnvSpec&) { return PosProj{0, 1}; }

namespace detail {

struct Route {
    std::vector<Vec2> pts;
    std::vector<double> cum;  // arc length before each point
    double total = 0.0;

    explicit Route(std::vector<Vec2> p) : pts(std::move(p)) {
        cum.resize(pts.size(), 0.0);
        for (size_t i = 1; i < pts.size(); ++i) {
            const double dx = pts[i][0] - pts[i - 1][0];
            const double dy = pts[i][1] - pts[i - 1][1];
            cum[i] = cum[i - 1] + std::sqrt(dx * dx + dy * dy);
        }
        total = cum.back();
    }

    // Arc length of the closest centerline point.
    double project(const Vec2& p) const {
        double best_d2 = 1e300, best_arc = 0.0;
        for (size_t i = 1; i < pts.size(); ++i) {
            const double ax = pts[i - 1][0], ay = pts[i - 1][1];
            const double bx = pts[i][0], by = pts[i][1];
            const double vx = bx - ax, vy = by - ay;
            const double len2 = vx * vx + vy * vy;
            double t = ((p[0] - ax) * vx + (p[1] - ay) * vy) / len2;
            t = std::clamp(t, 0.0, 1.0);
            const double qx = ax + t * vx, qy = ay + t * vy;
            const double d2 = (p[0] - qx) * (p[0] - qx) + (p[1] - qy) * (p[1] - qy);
            if (d2 < best_d2) {
                best_d2 = d2;
                best_arc = cum[i - 1] + t * std::sqrt(len2);
            }
        }
        return best_arc;
    }

    Vec2 point_at(double arc) const {
        arc = std::clamp(arc, 0.0, total);
        for (size_t i = 1; i < pts.size(); ++i) {
            if (arc <= cum[i] || i + 1 == pts.size()) {
                const double seg = cum[i] - cum[i - 1];
                const double t = seg > 0.0 ? (arc - cum[i - 1]) / seg : 0.0;
                return {pts[i - 1][0] + t * (pts[i][0] - pts[i - 1][0]),
                        pts[i - 1][1] + t * (pts[i][1] - pts[i - 1][1])};
            }
        }
        return pts.back();
    }
};

inline const Route& umaze_route() {
    static const Route r({{1.0, 0.8}, {1.0, 9.0}, {9.0, 9.0}, {9.0, 0.8}});
    return r;
}

inline const Route& merge_route() {
    static const Route r({{0.0, -4.0}, {18.0, 0.0}, {48.0, 0.0}});
    return r;
}

constexpr double kUmazeVmax = 2.0, kUmazeAccel = 1.0;
constexpr Vec2 kUmazeGoal = {9.0, 0.8};
constexpr double kUmazeGoalRadius = 0.5;

constexpr double kMergeVmax = 4.0, kMergeAccel = 2.0;
constexpr double kMergeGoalX = 44.0, kMergeGoalY = 1.0;
constexpr double kCarHalfLen = 1.2, kCarHalfWidth = 0.9;
constexpr int kNumCars = 3;

// Allowed x-interval of the U-maze corridor at height y (the point cannot
// tunnel: per-step motion is at most v_max*dt = 0.2, far below any wall span).
inline void umaze_clamp_axis(double& pos, double& vel, double lo, double hi) {
    if (pos < lo) {
        pos = lo;
        if (vel < 0.0) vel = 0.0;
    } else if (pos > hi) {
        pos = hi;
        if (vel > 0.0) vel = 0.0;
    }
}

inline bool check_finite(std::span<const double> xs) {
    for (const double x : xs)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace detail

inline double progress(const EnvSpec& spec, std::span<const double> state) {
    const detail::Route& route =
        spec.name == EnvName::point_umaze ? detail::umaze_route() : detail::merge_route();
    const double arc = route.project({state[0], state[1]});
    return std::clamp(arc / route.total, 0.0, 1.0);
}

inline bool is_success(const EnvSpec& spec, std::span<const double> state) {
    if (spec.name == EnvName::point_umaze) {
        const double dx = state[0] - detail::kUmazeGoal[0];
        const double dy = state[1] - detail::kUmazeGoal[1];
        return dx * dx + dy * dy <= detail::kUmazeGoalRadius * detail::kUmazeGoalRadius;
    }
    return state[0] >= detail::kMergeGoalX && std::fabs(state[1]) <= detail::kMergeGoalY;
}

inline bool is_collision(const EnvSpec& spec, std::span<const double> state) {
    if (spec.name == EnvName::point_umaze) return false;  // walls are non-fatal there
    for (int j = 0; j < detail::kNumCars; ++j) {
        const double dx = state[4 + 4 * j];
        const double dy = state[4 + 4 * j + 1];
        if (std::fabs(dx) < detail::kCarHalfLen && std::fabs(dy) < detail::kCarHalfWidth) return true;
    }
    return false;
}

inline std::vector<double> reset(const EnvSpec& spec, uint64_t seed) {
    Rng rng(seed * 0x9e3779b97f4a7c15ull + 0x853c49e6748fea9bull);
    if (spec.name == EnvName::point_umaze) {
        // entrance of the maze, exactly zero velocity
        const double x = 1.0 + rng.uniform(-0.25, 0.25);
        const double y = 0.8 + rng.uniform(-0.25, 0.25);
        return {x, y, 0.0, 0.0};
    }
    std::vector<double> s(16, 0.0);
    const detail::Route& route = detail::merge_route();
    const Vec2 p0 = route.pts[0];
    const Vec2 p1 = route.pts[1];
    const double seg = std::sqrt((p1[0] - p0[0]) * (p1[0] - p0[0]) + (p1[1] - p0[1]) * (p1[1] - p0[1]));
    const Vec2 dir = {(p1[0] - p0[0]) / seg, (p1[1] - p0[1]) / seg};
    const double along = rng.uniform(0.0, 1.0);
    s[0] = p0[0] + dir[0] * along;
    s[1] = p0[1] + dir[1] * along;
    s[2] = dir[0] * 2.5;
    s[3] = dir[1] * 2.5;
    const double base[detail::kNumCars] = {4.0, 12.0, 20.0};
    for (int j = 0; j < detail::kNumCars; ++j) {
        const double cx = base[j] + rng.uniform(-2.0, 2.0);
        const double speed = rng.uniform(2.4, 3.2);
        s[4 + 4 * j + 0] = cx - s[0];
        s[4 + 4 * j + 1] = 0.0 - s[1];
        s[4 + 4 * j + 2] = speed - s[2];
        s[4 + 4 * j + 3] = 0.0 - s[3];
    }
    return s;
}

inline StepResult step(const EnvSpec& spec, std::span<const double> state, std::span<const double> action) {
    if (static_cast<int>(state.size()) != spec.state_dim)
        throw InvalidInputError("env::step: state dim mismatch");
    if (static_cast<int>(action.size()) != spec.action_dim)
        throw InvalidInputError("env::step: action dim mismatch");
    if (!detail::check_finite(state)) throw NumericError("env::step: non-finite state");

    const double ax = std::isfinite(action[0]) ? std::clamp(action[0], -1.0, 1.0) : 0.0;
    const double ay = std::isfinite(action[1]) ? std::clamp(action[1], -1.0, 1.0) : 0.0;

    StepResult res;
    if (spec.name == EnvName::point_umaze) {
        double x = state[0], y = state[1];
        double vx = state[2], vy = state[3];
        vx = std::clamp(vx + ax * detail::kUmazeAccel * spec.dt, -detail::kUmazeVmax, detail::kUmazeVmax);
        vy = std::clamp(vy + ay * detail::kUmazeAccel * spec.dt, -detail::kUmazeVmax, detail::kUmazeVmax);

        // axis-by-axis move with wall clamping; contacts zero the normal
        // velocity component and are not fatal. Below the inner block
        // (y < 8) the free x-set is the leg the point is already in;
        // per-step motion (<= 0.2) cannot tunnel across the block.
        x += vx * spec.dt;
        if (y < 8.0) {
            const bool left_leg = state[0] <= 2.0 || (state[0] < 8.0 && state[0] - 2.0 < 8.0 - state[0]);
            if (left_leg)
                detail::umaze_clamp_axis(x, vx, 0.0, 2.0);
            else
                detail::umaze_clamp_axis(x, vx, 8.0, 10.0);
        } else {
            detail::umaze_clamp_axis(x, vx, 0.0, 10.0);
        }
        y += vy * spec.dt;
        if (x > 2.0 && x < 8.0)
            detail::umaze_clamp_axis(y, vy, 8.0, 10.0);
        else
            detail::umaze_clamp_axis(y, vy, 0.0, 10.0);

        res.next_state = {x, y, vx, vy};
        res.success = is_success(spec, res.next_state);
        res.collision = false;
        res.done = res.success;
        res.progress = progress(spec, res.next_state);
        return res;
    }

    // lane_merge
    std::vector<double> next(16, 0.0);
    const double evx = std::clamp(state[2] + ax * detail::kMergeAccel * spec.dt, -detail::kMergeVmax,
                                  detail::kMergeVmax);
    const double evy = std::clamp(state[3] + ay * detail::kMergeAccel * spec.dt, -detail::kMergeVmax,
                                  detail::kMergeVmax);
    const double ex = state[0] + evx * spec.dt;
    const double ey = state[1] + evy * spec.dt;
    next[0] = ex;
    next[1] = ey;
    next[2] = evx;
    next[3] = evy;
    for (int j = 0; j < detail::kNumCars; ++j) {
        const int b = 4 + 4 * j;
        const double cx = state[0] + state[b + 0];
        const double cy = state[1] + state[b + 1];
        const double cvx = state[2] + state[b + 2];
        const double cvy = state[3] + state[b + 3];
        next[b + 0] = (cx + cvx * spec.dt) - ex;
        next[b + 1] = (cy + cvy * spec.dt) - ey;
        next[b + 2] = cvx - evx;
        next[b + 3] = cvy - evy;
    }
    res.next_state = std::move(next);
    res.collision = is_collision(spec, res.next_state);
    res.success = !res.collision && is_success(spec, res.next_state);
    res.done = res.collision || res.success;
    res.progress = progress(spec, res.next_state);
    return res;
}

// Scripted demonstrator: a proportional waypoint follower with privileged
// knowledge of the route centerline (and, for lane_merge, simple gap keeping
// against the scripted traffic). Pure function of the state.
inline std::vector<double> expert_action(const EnvSpec& spec, std::span<const double> state) {
    const detail::Route& route =
        spec.name == EnvName::point_umaze ? detail::umaze_route() : detail::merge_route();
    const Vec2 pos = {state[0], state[1]};
    const double arc = route.project(pos);

    double v_cruise, lookahead, gain;
    if (spec.name == EnvName::point_umaze) {
        v_cruise = 1.6;
        lookahead = 1.2;
        gain = 2.0;
    } else {
        v_cruise = 3.4;
        lookahead = 2.5;
        gain = 2.0;
    }

    double speed_des = v_cruise;
    if (spec.name == EnvName::lane_merge) {
        const double merge_arc = route.cum[1];
        if (state[1] > -1.2) {
            // on (or nearly on) the main lane: keep a gap to the car ahead
            for (int j = 0; j < detail::kNumCars; ++j) {
                const double dx = state[4 + 4 * j];
                const double car_vx = state[2] + state[4 + 4 * j + 2];
                if (dx > -1.0 && dx <= 4.5) speed_des = std::min(speed_des, std::max(car_vx - 0.3, 0.8));
                if (dx > -1.0 && dx <= 2.0) speed_des = std::min(speed_des, std::max(car_vx - 1.0, 0.8));
            }
        } else {
            // still on the ramp: time the merge to slot in behind any car that
            // would occupy the merge point on arrival
            const double cur_speed = std::max(std::hypot(state[2], state[3]), 0.5);
            const double ttm = (merge_arc - arc) / cur_speed;
            for (int j = 0; j < detail::kNumCars; ++j) {
                const double car_x = state[0] + state[4 + 4 * j];
                const double car_vx = state[2] + state[4 + 4 * j + 2];
                const double car_at_arrival = car_x + car_vx * ttm;
                if (std::fabs(car_at_arrival - 18.0) < 2.8) {
                    const double slot_time = (18.0 + 2.4 - car_x) / std::max(car_vx, 0.5);
                    const double slow = (merge_arc - arc) / std::max(slot_time, 0.1);
                    speed_des = std::clamp(slow, 0.8, v_cruise);
                }
            }
        }
    }

    const Vec2 target = route.point_at(std::min(arc + lookahead, route.total));
    double dx = target[0] - pos[0], dy = target[1] - pos[1];
    const double norm = std::hypot(dx, dy);
    if (norm > 1e-9) {
        dx /= norm;
        dy /= norm;
    } else {
        dx = 1.0;
        dy = 0.0;
    }
    const double ax = std::clamp(gain * (dx * speed_des - state[2]), -1.0, 1.0);
    const double ay = std::clamp(gain * (dy * speed_des - state[3]), -1.0, 1.0);
    return {ax, ay};
}

}  // namespace csirl::env
