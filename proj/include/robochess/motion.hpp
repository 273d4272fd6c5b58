#pragma once

// Joint-space motion of one arm: synchronized linear interpolation where the
// slowest joint sets the segment time, and the five-phase pick/place cycle.

#include "robochess/kinematics.hpp"
#include "robochess/scheduler.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace robochess {

enum class MotionErrc { OutOfRange, InvalidSpeed };

class MotionError : public std::runtime_error {
public:
    MotionError(MotionErrc code, std::string message) : std::runtime_error(std::move(message)), code_(code) {}
    MotionErrc code() const { return code_; }

private:
    MotionErrc code_;
};

struct SpeedBounds {
    double min = 0.25;
    double max = 4.0;
    bool contains(double s) const { return s > 0 && s >= min && s <= max; }
};

struct Segment {
    JointAngles start{};
    JointAngles end{};
    double duration = 0;  // s
};

// duration = max_j |dtheta_j| / (omega_j * s)
Segment plan_segment(const JointAngles& from, const JointAngles& to, const ArmGeometry& geom, double speed);
JointAngles sample(const Segment& seg, double t);

// Gripper polyline length sampled every dt of segment time; both endpoints
// of every segment are always included.
double path_length(const ArmGeometry& geom, std::span<const Segment> segments, double dt);

enum class MotionPhase { ToSource, Grasp, ToTarget, Release, Home };
std::string_view to_string(MotionPhase phase);

// Yaw toward the board centre, shoulder pi/4, elbow -pi/2.
JointAngles default_home_pose(const ArmGeometry& geom, const BoardLayout& layout);

struct MotionStep {
    MotionPhase phase = MotionPhase::ToSource;
    Segment segment{};  // dwell steps hold one pose
    double speed = 1;
    double path_length = 0;
};

struct MotionSettings {
    double dwell = 0.1;       // s, at grasp and at release
    double metrics_dt = 0.01; // s of unit-speed time between path samples
};

// Incremental executor for one pick/place item. Each segment is planned when
// it begins, with the speed factor current at that moment.
class PickPlaceMotion {
public:
    PickPlaceMotion(const ArmGeometry& geom, const PickPlace& action, const JointAngles& start,
                    const JointAngles& home, MotionSettings settings);

    bool done() const { return step_ >= 5; }
    MotionPhase phase() const { return static_cast<MotionPhase>(step_ < 5 ? step_ : 4); }
    const JointAngles& pose() const { return pose_; }
    int piece_id() const { return action_.piece_id; }
    bool holding() const { return holding_; }

    // Consumes up to dt seconds; returns the time left over once done.
    double advance(double dt, double speed, Workspace& workspace);

    double duration() const { return duration_; }
    double path_length() const { return path_length_; }
    const std::vector<MotionStep>& steps() const { return steps_; }

private:
    void begin_step(double speed, Workspace& workspace);
    void finish_step(Workspace& workspace);

    const ArmGeometry& geom_;
    PickPlace action_;
    JointAngles waypoints_[4];  // start, pick, place, home
    MotionSettings settings_;
    int step_ = 0;
    bool step_open_ = false;
    double local_t_ = 0;
    JointAngles pose_{};
    bool holding_ = false;
    double duration_ = 0;
    double path_length_ = 0;
    std::vector<MotionStep> steps_;
};

struct PickPlaceOutcome {
    double duration = 0;
    double path_length = 0;
    std::vector<MotionStep> trace;
    JointAngles final_pose{};
};

// Runs one pick/place item to completion at a fixed speed.
PickPlaceOutcome execute_pickplace(const JointAngles& start, const PickPlace& action, const ArmGeometry& geom,
                                   const JointAngles& home, double speed, MotionSettings settings,
                                   Workspace& workspace);

}  // namespace robochess
