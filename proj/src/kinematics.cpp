#include "robochess/kinematics.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace robochess {

namespace {

constexpr double kPi = std::numbers::pi;
// Relative slack on the reach annulus so boundary points (full extension)
// stay reachable despite rounding.
constexpr double kReachSlack = 1e-12;

}  // namespace

double wrap_angle(double a) {
    a = std::remainder(a, 2 * kPi);
    if (a <= -kPi) a += 2 * kPi;
    return a;
}

std::string_view to_string(KinematicsErrc code) {
    switch (code) {
        case KinematicsErrc::Unreachable: return "unreachable";
        case KinematicsErrc::LimitViolation: return "limit_violation";
        case KinematicsErrc::Singular: return "singular";
    }
    return "unknown";
}

bool ArmGeometry::within_limits(const JointAngles& q, double tol) const {
    for (std::size_t j = 0; j < 3; ++j)
        if (!joint_limits[j].contains(q[j], tol)) return false;
    return true;
}

void ArmGeometry::validate() const {
    if (!(l1 > 0) || !(l2 > 0)) throw std::invalid_argument("link lengths must be positive");
    for (double w : joint_speed)
        if (!(w > 0)) throw std::invalid_argument("joint speeds must be positive");
    for (const auto& r : joint_limits)
        if (!(r.min < r.max)) throw std::invalid_argument("joint limit min must be below max");
    if (!base.finite() || !std::isfinite(heading) || !std::isfinite(mount_height))
        throw std::invalid_argument("arm base must be finite");
}

void BoardLayout::rebuild_discard_zones() {
    // White's edge is below rank 1, black's above rank 8.
    for (int side = 0; side < 2; ++side) {
        for (int slot = 0; slot < kDiscardSlots; ++slot) {
            double row_offset = 1.25 + (slot / 8);
            double rank = side == 0 ? -row_offset : 7 + row_offset;
            discard[side][slot] =
                origin + Point3{(slot % 8) * square_size, rank * square_size, grip_height};
        }
    }
}

Point3 BoardLayout::board_center() const {
    return origin + Point3{3.5 * square_size, 3.5 * square_size, grip_height};
}

void BoardLayout::validate() const {
    if (!(square_size > 0)) throw std::invalid_argument("square_size must be positive");
    if (!(grip_height >= 0)) throw std::invalid_argument("grip_height must be non-negative");
    if (!origin.finite()) throw std::invalid_argument("board origin must be finite");
}

BoardLayout default_layout() {
    BoardLayout layout;
    layout.rebuild_discard_zones();
    return layout;
}

ArmGeometry default_white_arm() {
    ArmGeometry g;
    g.base = {0.60, 0.175, 0.0};
    g.heading = kPi;
    return g;
}

ArmGeometry default_black_arm() {
    ArmGeometry g;
    g.base = {-0.25, 0.175, 0.0};
    g.heading = 0.0;
    return g;
}

Point3 square_center(const BoardLayout& layout, Square sq) {
    return layout.origin + Point3{sq.file * layout.square_size, sq.rank * layout.square_size, layout.grip_height};
}

Point3 forward_kinematics(const ArmGeometry& geom, const JointAngles& q) {
    double reach = geom.l1 * std::cos(q.shoulder) + geom.l2 * std::cos(q.shoulder + q.elbow);
    double lift = geom.l1 * std::sin(q.shoulder) + geom.l2 * std::sin(q.shoulder + q.elbow);
    double heading = geom.heading + q.yaw;
    return geom.shoulder_point() + Point3{reach * std::cos(heading), reach * std::sin(heading), lift};
}

JointAngles inverse_kinematics(const ArmGeometry& geom, const Point3& target) {
    if (!target.finite()) throw KinematicsError(KinematicsErrc::Unreachable, "target is not finite");
    const Point3 d = target - geom.shoulder_point();
    const double radial = std::hypot(d.x, d.y);
    const double dist = std::hypot(radial, d.z);
    const double outer = geom.l1 + geom.l2;
    const double inner = std::abs(geom.l1 - geom.l2);

    if (dist > outer * (1 + kReachSlack) || dist < inner * (1 - kReachSlack)) {
        throw KinematicsError(KinematicsErrc::Unreachable,
                              fmt::format("target ({:.4f}, {:.4f}, {:.4f}) is {:.4f} m from the shoulder, "
                                          "outside [{:.4f}, {:.4f}]",
                                          target.x, target.y, target.z, dist, inner, outer));
    }
    if (radial <= 1e-12 * outer) {
        throw KinematicsError(KinematicsErrc::Singular,
                              fmt::format("target ({:.4f}, {:.4f}, {:.4f}) lies on the yaw axis", target.x,
                                          target.y, target.z));
    }

    JointAngles q;
    q.yaw = wrap_angle(std::atan2(d.y, d.x) - geom.heading);
    double c = (dist * dist - geom.l1 * geom.l1 - geom.l2 * geom.l2) / (2 * geom.l1 * geom.l2);
    c = std::clamp(c, -1.0, 1.0);
    q.elbow = c >= 1.0 ? 0.0 : -std::acos(c);
    q.shoulder = std::atan2(d.z, radial) -
                 std::atan2(geom.l2 * std::sin(q.elbow), geom.l1 + geom.l2 * std::cos(q.elbow));

    if (!geom.within_limits(q)) {
        throw KinematicsError(KinematicsErrc::LimitViolation,
                              fmt::format("solution (yaw {:.4f}, shoulder {:.4f}, elbow {:.4f}) for target "
                                          "({:.4f}, {:.4f}, {:.4f}) violates joint limits",
                                          q.yaw, q.shoulder, q.elbow, target.x, target.y, target.z));
    }
    return q;
}

bool reachable(const ArmGeometry& geom, const Point3& target) {
    try {
        inverse_kinematics(geom, target);
        return true;
    } catch (const KinematicsError&) {
        return false;
    }
}

}  // namespace robochess
