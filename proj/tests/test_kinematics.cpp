#include "robochess/kinematics.hpp"
#include "robochess/motion.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace robochess;
using std::numbers::pi;

namespace {

ArmGeometry example_arm() {
    ArmGeometry g;
    g.base = {0, 0, 0};
    g.mount_height = 0.1;
    g.l1 = g.l2 = 0.3;
    return g;
}

void check_close(const Point3& a, const Point3& b, double tol) {
    CHECK(distance(a, b) < tol);
}

ArmGeometry random_geometry(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> len(0.1, 0.6), pos(-1, 1), mount(0, 0.3), head(-pi, pi);
    ArmGeometry g;
    g.base = {pos(rng), pos(rng), pos(rng) * 0.1};
    g.mount_height = mount(rng);
    g.l1 = len(rng);
    g.l2 = len(rng);
    g.heading = head(rng);
    return g;
}

// Joint angles whose wrist stays in front of the yaw axis, so the target is
// reachable and the elbow-up solution is within the default limits.
JointAngles random_pose(std::mt19937_64& rng, const ArmGeometry& g) {
    std::uniform_real_distribution<double> yaw(-pi + 1e-6, pi), sh(0.02, pi / 2 - 0.02), el(-pi + 0.05, -0.02);
    for (;;) {
        JointAngles q{yaw(rng), sh(rng), el(rng)};
        double r = g.l1 * std::cos(q.shoulder) + g.l2 * std::cos(q.shoulder + q.elbow);
        if (r > 1e-3 * (g.l1 + g.l2)) return q;
    }
}

Point3 rotate_about(const Point3& p, const Point3& centre, double a) {
    Point3 d = p - centre;
    return centre + Point3{d.x * std::cos(a) - d.y * std::sin(a), d.x * std::sin(a) + d.y * std::cos(a), d.z};
}

double angle_diff(double a, double b) { return std::abs(wrap_angle(a - b)); }

}  // namespace

TEST_CASE("square centres") {
    BoardLayout layout;
    layout.origin = {0, 0, 0};
    layout.square_size = 0.05;
    layout.grip_height = 0.04;
    check_close(square_center(layout, *Square::parse("a1")), {0, 0, 0.04}, 1e-15);
    check_close(square_center(layout, *Square::parse("h8")), {0.35, 0.35, 0.04}, 1e-15);
    check_close(square_center(layout, *Square::parse("e4")), {0.20, 0.15, 0.04}, 1e-15);
}

TEST_CASE("forward kinematics examples") {
    auto g = example_arm();
    check_close(forward_kinematics(g, {0, 0, 0}), {0.6, 0, 0.1}, 1e-15);
    check_close(forward_kinematics(g, {pi / 2, 0, 0}), {0, 0.6, 0.1}, 1e-15);
    check_close(forward_kinematics(g, {0, pi / 2, -pi / 2}), {0.3, 0, 0.4}, 1e-15);
}

TEST_CASE("inverse kinematics examples and errors") {
    auto g = example_arm();
    auto q = inverse_kinematics(g, {0.6, 0, 0.1});
    CHECK(std::abs(q.yaw) < 1e-15);
    CHECK(std::abs(q.shoulder) < 1e-12);
    CHECK(q.elbow == 0.0);
    CHECK(reachable(g, {0.6, 0, 0.1}));

    auto code = [&](Point3 t) {
        try {
            inverse_kinematics(g, t);
        } catch (const KinematicsError& e) {
            return std::optional(e.code());
        }
        return std::optional<KinematicsErrc>{};
    };
    CHECK(code({0.7, 0, 0.1}) == KinematicsErrc::Unreachable);
    CHECK_FALSE(reachable(g, {0.7, 0, 0.1}));
    CHECK(code({0, 0, 0.5}) == KinematicsErrc::Singular);
    CHECK(code({0, 0, std::nan("")}) == KinematicsErrc::Unreachable);
    // Below the mount and close in: the elbow-up solution needs a negative shoulder.
    CHECK(code({0.2, 0, -0.2}) == KinematicsErrc::LimitViolation);

    ArmGeometry unequal = g;
    unequal.l1 = 0.4;
    unequal.l2 = 0.2;
    try {
        inverse_kinematics(unequal, {0.1, 0, 0.1});  // inside the inner radius 0.2
        FAIL("reached a point inside the inner radius");
    } catch (const KinematicsError& e) {
        CHECK(e.code() == KinematicsErrc::Unreachable);
    }
}

TEST_CASE("round trip over random geometries") {
    std::mt19937_64 rng(7);
    double worst = 0;
    for (int gi = 0; gi < 10; ++gi) {
        auto g = random_geometry(rng);
        for (int i = 0; i < 1000; ++i) {
            auto target = forward_kinematics(g, random_pose(rng, g));
            auto q = inverse_kinematics(g, target);
            worst = std::max(worst, distance(forward_kinematics(g, q), target));
            CHECK(q.elbow <= 0);
            CHECK(g.within_limits(q));
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("reachable agrees with inverse_kinematics") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    auto g = random_geometry(rng);
    for (int i = 0; i < 2000; ++i) {
        Point3 t = g.shoulder_point() + Point3{u(rng), u(rng), u(rng)} * (g.l1 + g.l2);
        bool ok = true;
        try {
            inverse_kinematics(g, t);
        } catch (const KinematicsError&) {
            ok = false;
        }
        CHECK(reachable(g, t) == ok);
    }
}

TEST_CASE("yaw equivariance") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> alpha(-pi, pi);
    for (int gi = 0; gi < 10; ++gi) {
        auto g = random_geometry(rng);
        for (int i = 0; i < 100; ++i) {
            auto t = forward_kinematics(g, random_pose(rng, g));
            double a = alpha(rng);
            auto q0 = inverse_kinematics(g, t);
            auto q1 = inverse_kinematics(g, rotate_about(t, g.base, a));
            CHECK(angle_diff(q1.yaw, q0.yaw + a) < 1e-9);
            CHECK(std::abs(q1.shoulder - q0.shoulder) < 1e-9);
            CHECK(std::abs(q1.elbow - q0.elbow) < 1e-9);
        }
    }
}

TEST_CASE("scale covariance") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> scale(0.2, 5.0);
    for (int gi = 0; gi < 10; ++gi) {
        auto g = random_geometry(rng);
        for (int i = 0; i < 100; ++i) {
            auto t = forward_kinematics(g, random_pose(rng, g));
            double k = scale(rng);
            ArmGeometry gk = g;
            gk.l1 *= k;
            gk.l2 *= k;
            Point3 tk = g.shoulder_point() + (t - g.shoulder_point()) * k;
            gk.mount_height = g.mount_height;
            auto q0 = inverse_kinematics(g, t);
            auto q1 = inverse_kinematics(gk, tk);
            CHECK(angle_diff(q1.yaw, q0.yaw) < 1e-9);
            CHECK(std::abs(q1.shoulder - q0.shoulder) < 1e-9);
            CHECK(std::abs(q1.elbow - q0.elbow) < 1e-9);
        }
    }
}

TEST_CASE("default arms reach every square and discard slot") {
    auto layout = default_layout();
    for (const auto& arm : {default_white_arm(), default_black_arm()}) {
        for (int i = 0; i < 64; ++i) CHECK(reachable(arm, square_center(layout, Square::from_index(i))));
        for (const auto& zone : layout.discard)
            for (const auto& slot : zone) CHECK(reachable(arm, slot));
        CHECK(arm.within_limits(default_home_pose(arm, layout)));
    }
}

TEST_CASE("geometry validation") {
    ArmGeometry g;
    g.l1 = 0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = ArmGeometry{};
    g.joint_speed[1] = -1;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = ArmGeometry{};
    g.joint_limits[2] = {0.5, 0.1};
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    BoardLayout b;
    b.square_size = 0;
    CHECK_THROWS_AS(b.validate(), std::invalid_argument);
}

TEST_CASE("wrap_angle range") {
    CHECK(wrap_angle(pi) == doctest::Approx(pi));
    CHECK(wrap_angle(-pi) == doctest::Approx(pi));
    CHECK(wrap_angle(3 * pi / 2) == doctest::Approx(-pi / 2));
    CHECK(wrap_angle(0.25) == 0.25);
}
