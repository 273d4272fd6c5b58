#pragma once

// Geometry of one three-tier arm (yaw base, shoulder link, elbow link) and
// of the shared board workspace.

#include "robochess/notation.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace robochess {

struct Point3 {
    double x = 0, y = 0, z = 0;

    Point3 operator+(const Point3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Point3 operator-(const Point3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Point3 operator*(double k) const { return {x * k, y * k, z * k}; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
    friend bool operator==(const Point3&, const Point3&) = default;
};

inline double distance(const Point3& a, const Point3& b) { return (a - b).norm(); }

struct JointAngles {
    double yaw = 0, shoulder = 0, elbow = 0;

    double operator[](std::size_t i) const { return i == 0 ? yaw : i == 1 ? shoulder : elbow; }
    double& operator[](std::size_t i) { return i == 0 ? yaw : i == 1 ? shoulder : elbow; }
    friend bool operator==(const JointAngles&, const JointAngles&) = default;
};

struct JointRange {
    double min = 0, max = 0;
    bool contains(double v, double tol = 0) const { return v >= min - tol && v <= max + tol; }
    friend bool operator==(const JointRange&, const JointRange&) = default;
};

struct ArmGeometry {
    Point3 base{};
    // Mounting yaw in the world frame; the yaw joint is measured from it.
    double heading = 0;
    double mount_height = 0.10;
    double l1 = 0.35;
    double l2 = 0.35;
    std::array<double, 3> joint_speed{std::numbers::pi / 2, std::numbers::pi / 2, std::numbers::pi / 2};
    std::array<JointRange, 3> joint_limits{
        JointRange{-std::numbers::pi, std::numbers::pi},
        JointRange{0.0, std::numbers::pi},
        JointRange{-std::numbers::pi, 0.0},
    };

    Point3 shoulder_point() const { return base + Point3{0, 0, mount_height}; }
    bool within_limits(const JointAngles& q, double tol = 1e-12) const;
    // Throws std::invalid_argument naming the broken invariant.
    void validate() const;

    friend bool operator==(const ArmGeometry&, const ArmGeometry&) = default;
};

inline constexpr int kDiscardSlots = 16;

struct BoardLayout {
    Point3 origin{};  // centre of a1 at board surface height
    double square_size = 0.05;
    double grip_height = 0.04;
    // [0] receives pieces captured by white, [1] by black.
    std::array<std::array<Point3, kDiscardSlots>, 2> discard{};

    // Two rows of eight slots beyond each side's back-rank edge.
    void rebuild_discard_zones();
    Point3 board_center() const;
    void validate() const;

    friend bool operator==(const BoardLayout&, const BoardLayout&) = default;
};

BoardLayout default_layout();
ArmGeometry default_white_arm();
ArmGeometry default_black_arm();

enum class KinematicsErrc { Unreachable, LimitViolation, Singular };

class KinematicsError : public std::runtime_error {
public:
    KinematicsError(KinematicsErrc code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}
    KinematicsErrc code() const { return code_; }

private:
    KinematicsErrc code_;
};

std::string_view to_string(KinematicsErrc code);

Point3 square_center(const BoardLayout& layout, Square sq);
Point3 forward_kinematics(const ArmGeometry& geom, const JointAngles& q);

// Closed-form elbow-up solution (elbow in [-pi, 0]).
JointAngles inverse_kinematics(const ArmGeometry& geom, const Point3& target);
bool reachable(const ArmGeometry& geom, const Point3& target);

// Wraps into (-pi, pi].
double wrap_angle(double a);

}  // namespace robochess
