#include "robochess/motion.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace robochess {

Segment plan_segment(const JointAngles& from, const JointAngles& to, const ArmGeometry& geom, double speed) {
    if (!(speed > 0) || !std::isfinite(speed))
        throw MotionError(MotionErrc::InvalidSpeed, fmt::format("speed factor {} must be positive", speed));
    Segment seg{from, to, 0.0};
    for (std::size_t j = 0; j < 3; ++j) {
        double t = std::abs(to[j] - from[j]) / (geom.joint_speed[j] * speed);
        seg.duration = std::max(seg.duration, t);
    }
    return seg;
}

JointAngles sample(const Segment& seg, double t) {
    if (!(t >= 0) || t > seg.duration)
        throw MotionError(MotionErrc::OutOfRange,
                          fmt::format("sample time {} outside [0, {}]", t, seg.duration));
    if (t == seg.duration) return seg.end;
    double u = t / seg.duration;
    JointAngles q;
    for (std::size_t j = 0; j < 3; ++j) q[j] = seg.start[j] + u * (seg.end[j] - seg.start[j]);
    return q;
}

double path_length(const ArmGeometry& geom, std::span<const Segment> segments, double dt) {
    if (!(dt > 0)) throw MotionError(MotionErrc::OutOfRange, "path sampling interval must be positive");
    double total = 0;
    for (const auto& seg : segments) {
        Point3 prev = forward_kinematics(geom, seg.start);
        if (seg.duration == 0) {
            total += distance(prev, forward_kinematics(geom, seg.end));
            continue;
        }
        const auto n = static_cast<long>(std::ceil(seg.duration / dt));
        for (long k = 1; k <= n; ++k) {
            double t = k == n ? seg.duration : std::min(static_cast<double>(k) * dt, seg.duration);
            Point3 p = forward_kinematics(geom, sample(seg, t));
            total += distance(prev, p);
            prev = p;
        }
    }
    return total;
}

std::string_view to_string(MotionPhase phase) {
    switch (phase) {
        case MotionPhase::ToSource: return "ToSource";
        case MotionPhase::Grasp: return "Grasp";
        case MotionPhase::ToTarget: return "ToTarget";
        case MotionPhase::Release: return "Release";
        case MotionPhase::Home: return "Home";
    }
    return "?";
}

JointAngles default_home_pose(const ArmGeometry& geom, const BoardLayout& layout) {
    Point3 d = layout.board_center() - geom.base;
    return JointAngles{wrap_angle(std::atan2(d.y, d.x) - geom.heading), std::numbers::pi / 4, -std::numbers::pi / 2};
}

PickPlaceMotion::PickPlaceMotion(const ArmGeometry& geom, const PickPlace& action, const JointAngles& start,
                                 const JointAngles& home, MotionSettings settings)
    : geom_(geom),
      action_(action),
      waypoints_{start, inverse_kinematics(geom, action.pick.position),
                 inverse_kinematics(geom, action.place.position), home},
      settings_(settings),
      pose_(start) {}

void PickPlaceMotion::begin_step(double speed, Workspace& workspace) {
    MotionStep step;
    step.phase = static_cast<MotionPhase>(step_);
    step.speed = speed;
    switch (step.phase) {
        case MotionPhase::ToSource:
        case MotionPhase::ToTarget:
        case MotionPhase::Home: {
            int from = step_ / 2;  // 0, 1, 2
            step.segment = plan_segment(waypoints_[from], waypoints_[from + 1], geom_, speed);
            // Sample at fixed fractions of the unit-speed timeline so the
            // measured path does not depend on the speed factor.
            step.path_length = robochess::path_length(geom_, std::span(&step.segment, 1), settings_.metrics_dt / speed);
            break;
        }
        case MotionPhase::Grasp:
            step.segment = Segment{pose_, pose_, settings_.dwell};
            workspace.grasp(action_);
            workspace.carry(action_.piece_id, forward_kinematics(geom_, pose_));
            holding_ = true;
            break;
        case MotionPhase::Release:
            step.segment = Segment{pose_, pose_, settings_.dwell};
            workspace.release(action_);
            holding_ = false;
            break;
    }
    duration_ += step.segment.duration;
    path_length_ += step.path_length;
    steps_.push_back(step);
    step_open_ = true;
    local_t_ = 0;
}

void PickPlaceMotion::finish_step(Workspace& workspace) {
    pose_ = steps_.back().segment.end;
    if (holding_) workspace.carry(action_.piece_id, forward_kinematics(geom_, pose_));
    ++step_;
    step_open_ = false;
    local_t_ = 0;
}

double PickPlaceMotion::advance(double dt, double speed, Workspace& workspace) {
    while (!done()) {
        if (!step_open_) begin_step(speed, workspace);
        const Segment& seg = steps_.back().segment;
        double left = seg.duration - local_t_;
        if (dt >= left) {
            dt -= left;
            finish_step(workspace);
            continue;
        }
        local_t_ += dt;
        pose_ = sample(seg, local_t_);
        if (holding_) workspace.carry(action_.piece_id, forward_kinematics(geom_, pose_));
        return 0;
    }
    return dt;
}

PickPlaceOutcome execute_pickplace(const JointAngles& start, const PickPlace& action, const ArmGeometry& geom,
                                   const JointAngles& home, double speed, MotionSettings settings,
                                   Workspace& workspace) {
    PickPlaceMotion motion(geom, action, start, home, settings);
    motion.advance(std::numeric_limits<double>::infinity(), speed, workspace);
    return PickPlaceOutcome{motion.duration(), motion.path_length(), motion.steps(), motion.pose()};
}

}  // namespace robochess
