// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

#include "oracle/ox88.hpp"
#include "support/corpus.hpp"
#include "support/wire_client.hpp"

#include "robochess/control_server.hpp"
#include "robochess/engine.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <thread>

using namespace robochess;
using std::numbers::pi;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Collects the first few failures of a criterion.
struct Checker {
    std::vector<std::string> failures;
    void expect(bool cond, const std::string& what) {
        if (!cond && failures.size() < 5) failures.push_back(what);
    }
    Outcome done(std::string summary) const {
        if (failures.empty()) return {true, std::move(summary)};
        std::string out;
        for (const auto& f : failures) out += (out.empty() ? "" : "; ") + f;
        return {false, out};
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SimConfig config_for(SimMode mode) {
    SimConfig c;
    c.mode = mode;
    return c;
}

std::vector<std::filesystem::path> corpus() { return testing_support::corpus_files(); }

// ---------------------------------------------------------------- criteria

Outcome reference_indicators() {
    // The reference geometry, game and per-move series are not published, so
    // only the three indicators themselves can be checked.
    auto rep = run(config_for(SimMode::Virtual), testing_support::corpus_game("morphy_opera_1858"));
    Checker c;
    c.expect(rep.mean_white.has_value(), "no white mean");
    c.expect(rep.mean_black.has_value(), "no black mean");
    c.expect(rep.r12.has_value() || rep.r12_reason.has_value(), "no r12 or reason");
    if (rep.r12) c.expect(*rep.r12 >= -1 && *rep.r12 <= 1, "r12 outside [-1, 1]");
    return c.done(fmt::format("mean_white={:.3f}s mean_black={:.3f}s r12={} (reference 1.07/1.76/-0.33 not reproducible)",
                              rep.mean_white.value_or(NAN), rep.mean_black.value_or(NAN),
                              rep.r12 ? fmt::format("{:.3f}", *rep.r12) : *rep.r12_reason));
}

Outcome san_decoding() {
    auto t0 = std::chrono::steady_clock::now();
    Checker c;
    auto files = corpus();
    c.expect(files.size() >= 20, fmt::format("only {} games", files.size()));
    bool castle = false, ep = false, promo = false, disamb = false;
    std::size_t moves = 0;
    for (const auto& path : files) {
        const auto name = path.filename().string();
        auto script = load_game_file(path);
        DecodedGame game;
        try {
            game = decode_game(script);
        } catch (const NotationError& e) {
            c.expect(false, fmt::format("{}: {}", name, e.what()));
            continue;
        }
        oracle::Position pos = oracle::Position::start();
        for (std::size_t i = 0; i < game.moves.size(); ++i) {
            const auto& m = game.moves[i];
            int p = m.promotion ? static_cast<int>(*m.promotion) + 1 : 0;
            oracle::Move om{oracle::sq88(m.from.file, m.from.rank), oracle::sq88(m.to.file, m.to.rank), p};
            auto legal = pos.legal();
            c.expect(std::find(legal.begin(), legal.end(), om) != legal.end(),
                     fmt::format("{} half-move {} not legal for the oracle", name, i));
            pos = pos.make(om);
            castle |= m.castle.has_value();
            ep |= m.is_en_passant();
            promo |= m.promotion.has_value();
            if (m.piece != PieceKind::Pawn && !m.castle) {
                std::string core;
                for (char ch : script.tokens[i].substr(1))
                    if (ch != 'x' && ch != '+' && ch != '#') core += ch;
                disamb |= core.size() > 2;
            }
        }
        auto fen = game.final_board.to_fen();
        c.expect(pos.placement() == fen.substr(0, fen.find(' ')), name + ": final position differs from the oracle");
        moves += game.moves.size();
    }
    c.expect(castle && ep && promo && disamb, "corpus lacks castling, en passant, promotion or disambiguation");
    const std::uint64_t expected[] = {20, 400, 8902};
    for (int d = 1; d <= 3; ++d) {
        c.expect(perft(BoardState::initial(), d) == expected[d - 1], fmt::format("perft({}) wrong", d));
        c.expect(oracle::perft(oracle::Position::start(), d) == expected[d - 1], fmt::format("oracle perft({}) wrong", d));
    }
    double t = seconds_since(t0);
    c.expect(t < 5.0, fmt::format("took {:.2f}s", t));
    return c.done(fmt::format("{} games, {} half-moves, perft 20/400/8902, {:.2f}s", files.size(), moves, t));
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

JointAngles random_pose(std::mt19937_64& rng, const ArmGeometry& g) {
    std::uniform_real_distribution<double> yaw(-pi + 1e-6, pi), sh(0.02, pi / 2 - 0.02), el(-pi + 0.05, -0.02);
    for (;;) {
        JointAngles q{yaw(rng), sh(rng), el(rng)};
        if (g.l1 * std::cos(q.shoulder) + g.l2 * std::cos(q.shoulder + q.elbow) > 1e-3 * (g.l1 + g.l2)) return q;
    }
}

Outcome kinematics() {
    auto t0 = std::chrono::steady_clock::now();
    Checker c;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> alpha(-pi, pi), scale(0.2, 5.0), dir(-1, 1);
    double worst = 0, worst_eq = 0;
    for (int gi = 0; gi < 10; ++gi) {
        auto g = random_geometry(rng);
        for (int i = 0; i < 1000; ++i) {
            auto t = forward_kinematics(g, random_pose(rng, g));
            auto q = inverse_kinematics(g, t);
            worst = std::max(worst, distance(forward_kinematics(g, q), t));

            if (i % 10 == 0) {
                double a = alpha(rng);
                Point3 d = t - g.base;
                Point3 rt = g.base + Point3{d.x * std::cos(a) - d.y * std::sin(a), d.x * std::sin(a) + d.y * std::cos(a), d.z};
                auto qr = inverse_kinematics(g, rt);
                worst_eq = std::max({worst_eq, std::abs(wrap_angle(qr.yaw - q.yaw - a)),
                                     std::abs(qr.shoulder - q.shoulder), std::abs(qr.elbow - q.elbow)});
                double k = scale(rng);
                ArmGeometry gk = g;
                gk.l1 *= k;
                gk.l2 *= k;
                auto qk = inverse_kinematics(gk, g.shoulder_point() + (t - g.shoulder_point()) * k);
                worst_eq = std::max({worst_eq, std::abs(wrap_angle(qk.yaw - q.yaw)), std::abs(qk.shoulder - q.shoulder),
                                     std::abs(qk.elbow - q.elbow)});
            }
        }
        // Beyond full extension in a random direction.
        for (int i = 0; i < 100; ++i) {
            Point3 v{dir(rng), dir(rng), dir(rng)};
            double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
            if (n < 1e-3) continue;
            Point3 far = g.shoulder_point() + v * ((g.l1 + g.l2) * 1.01 / n);
            bool threw = false;
            try {
                inverse_kinematics(g, far);
            } catch (const KinematicsError& e) {
                threw = e.code() == KinematicsErrc::Unreachable;
            }
            c.expect(threw, "unreachable target solved");
        }
    }
    c.expect(worst < 1e-9, fmt::format("round trip error {:.3g}", worst));
    c.expect(worst_eq < 1e-9, fmt::format("equivariance error {:.3g}", worst_eq));
    double t = seconds_since(t0);
    c.expect(t < 1.0, fmt::format("took {:.2f}s", t));
    return c.done(fmt::format("10x1000 targets, max |FK(IK(t))-t| {:.2g} m, symmetry {:.2g} rad, {:.3f}s", worst,
                              worst_eq, t));
}

Outcome motion_laws() {
    Checker c;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> yaw(-pi, pi), sh(0, pi), el(-pi, 0);
    ArmGeometry g;
    g.base = {0, 0, 0};
    g.mount_height = 0.1;
    g.l1 = g.l2 = 0.3;
    g.joint_speed = {1.1, 0.7, 1.9};
    double worst_dur = 0, worst_path = 0;
    for (int i = 0; i < 100; ++i) {
        JointAngles a{yaw(rng), sh(rng), el(rng)}, b{yaw(rng), sh(rng), el(rng)};
        auto unit = plan_segment(a, b, g, 1.0);
        double base_path = path_length(g, std::span(&unit, 1), 0.01);
        for (double s : {0.25, 0.5, 2.0, 3.0, 4.0}) {
            auto seg = plan_segment(a, b, g, s);
            worst_dur = std::max(worst_dur, std::abs(seg.duration * s - unit.duration));
            worst_path = std::max(worst_path, std::abs(path_length(g, std::span(&seg, 1), 0.01 / s) - base_path));
        }
    }
    g.joint_speed = {1, 1, 1};
    auto quarter = plan_segment({0, 0, 0}, {pi / 2, 0, 0}, g, 1.0);
    double arc_err = std::abs(path_length(g, std::span(&quarter, 1), 0.001) - 0.6 * pi / 2);
    c.expect(worst_dur < 1e-12, fmt::format("duration*s varies by {:.3g}", worst_dur));
    c.expect(worst_path < 1e-9, fmt::format("path length varies by {:.3g}", worst_path));
    c.expect(arc_err < 1e-3, fmt::format("arc error {:.3g}", arc_err));
    return c.done(fmt::format("duration*s {:.2g}, path {:.2g}, arc error at 1 ms {:.2g} m", worst_dur, worst_path, arc_err));
}

Outcome protocol_consistency() {
    Checker c;
    std::size_t games = 0;
    for (const auto& path : corpus()) {
        const auto name = path.filename().string();
        Simulation sim(config_for(SimMode::Virtual), load_game_file(path));
        sim.run_virtual();
        auto rep = sim.report();
        const auto& game = sim.game();
        const std::size_t n = game.moves.size();
        auto mr1 = std::count_if(rep.per_move.begin(), rep.per_move.end(), [](auto& m) { return m.arm_id == ArmId::MR1; });
        auto mr2 = static_cast<std::ptrdiff_t>(rep.per_move.size()) - mr1;
        c.expect(static_cast<std::size_t>(mr1) == (n + 1) / 2 && static_cast<std::size_t>(mr2) == n / 2,
                 name + ": arm move counts");
        c.expect(sim.workspace().board_occupancy() == game.final_board.cells, name + ": board differs");
        for (Color side : {Color::White, Color::Black}) {
            std::vector<Piece> captured;
            auto board = BoardState::initial();
            for (const auto& m : game.moves) {
                if (m.color == side && m.captured) captured.push_back(*board.at(m.captured->square));
                board = apply_move_unchecked(board, m);
            }
            c.expect(sim.workspace().discarded(side) == captured, name + ": discard zone differs");
        }
        for (const auto& t : sim.workspace().pieces())
            if (t.location == Workspace::Location::Board)
                c.expect(distance(t.position, square_center(sim.config().layout, t.square)) < 1e-12,
                         name + ": piece off its square centre");
        ++games;
    }
    return c.done(fmt::format("{} games: arm counts, final board and discard zones match", games));
}

Outcome determinism() {
    Checker c;
    std::size_t games = 0;
    for (const auto& path : corpus()) {
        const auto name = path.filename().string();
        auto script = load_game_file(path);
        auto a = run(config_for(SimMode::Virtual), script);
        auto b = run(config_for(SimMode::Virtual), script);
        c.expect(to_csv(a) == to_csv(b) && to_json(a).dump() == to_json(b).dump(), name + ": virtual runs differ");
        c.expect(run(config_for(SimMode::Autoplay), script) == a, name + ": autoplay differs");
        c.expect(run(config_for(SimMode::StepByStep), script) == a, name + ": step-by-step differs");
        ++games;
    }
    return c.done(fmt::format("{} games: Virtual x2 byte-identical, Autoplay and StepByStep reports identical", games));
}

double pearson_formula(const std::vector<double>& a, const std::vector<double>& b) {
    long double n = static_cast<long double>(a.size()), sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        long double x = a[i], y = b[i];
        sa += x;
        sb += y;
        saa += x * x;
        sbb += y * y;
        sab += x * y;
    }
    return static_cast<double>((n * sab - sa * sb) / std::sqrt((n * saa - sa * sa) * (n * sbb - sb * sb)));
}

Outcome statistics() {
    Checker c;
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> len(2, 50);
    std::uniform_real_distribution<double> dur(0.2, 3.0);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> a(static_cast<std::size_t>(len(rng))), b(a.size());
        for (auto& x : a) x = dur(rng);
        for (auto& y : b) y = dur(rng);
        worst = std::max(worst, std::abs(pearson(a, b) - pearson_formula(a, b)));
        std::vector<double> neg(a.size());
        std::transform(a.begin(), a.end(), neg.begin(), [](double x) { return -x; });
        c.expect(pearson(a, a) == 1.0 && pearson(a, neg) == -1.0, "identity or reversal not exact");
    }
    c.expect(worst < 1e-12, fmt::format("oracle difference {:.3g}", worst));

    MetricsRecorder flat, single;
    for (int i = 0; i < 3; ++i) {
        flat.record({1.0, 0.1, ArmId::MR1, i, 2 * i});
        flat.record({2.0, 0.1, ArmId::MR2, i, 2 * i + 1});
    }
    single.record({1.0, 0.1, ArmId::MR1, 0, 0});
    single.record({1.5, 0.1, ArmId::MR2, 0, 1});
    auto rf = flat.finalize(), rs = single.finalize();
    c.expect(!rf.r12 && rf.r12_reason == std::string(kZeroVariance), "zero variance reason");
    c.expect(!rs.r12 && rs.r12_reason == std::string(kFewerThanTwoPairs), "short series reason");
    return c.done(fmt::format("1000 series, max oracle difference {:.2g}; undefined reasons '{}' and '{}'", worst,
                              kZeroVariance, kFewerThanTwoPairs));
}

Outcome sweep_criterion() {
    Checker c;
    auto script = testing_support::corpus_game("morphy_opera_1858");
    auto grid = parse_grid("arm.l1 = 0.33, 0.35, 0.38\narm.l2 = 0.33, 0.35, 0.38\n");
    auto base = config_for(SimMode::Virtual);
    base.dwell = 0;
    auto fast = base;
    for (auto* arm : {&fast.white_arm, &fast.black_arm})
        for (auto& w : arm->joint_speed) w *= 2;

    auto slow_rows = sweep(base, script, grid);
    auto fast_rows = sweep(fast, script, grid);
    c.expect(slow_rows.size() == 9 && fast_rows.size() == 9, "grid size");
    c.expect(slow_rows == sweep_serial(base, script, grid), "parallel and serial sweeps differ");
    for (std::size_t i = 0; i < slow_rows.size(); ++i) {
        c.expect(slow_rows[i].status == "ok", fmt::format("grid point {} failed", slow_rows[i].grid_index));
        if (i > 0 && slow_rows[i].mean_move && slow_rows[i - 1].mean_move)
            c.expect(*slow_rows[i - 1].mean_move <= *slow_rows[i].mean_move, "rows not ranked by mean move time");
    }
    std::map<std::size_t, const SweepRow*> by_index;
    for (const auto& r : fast_rows) by_index[r.grid_index] = &r;
    for (const auto& s : slow_rows) {
        const auto* f = by_index[s.grid_index];
        if (!f || !s.mean_move || !f->mean_move) continue;
        c.expect(*f->mean_white * 2 == *s.mean_white && *f->mean_black * 2 == *s.mean_black &&
                     *f->mean_move * 2 == *s.mean_move,
                 fmt::format("grid point {} not halved", s.grid_index));
    }
    return c.done(fmt::format("3x3 (l1, l2) ranked, best mean move {:.4f}s; doubled joint speeds halve all columns",
                              slow_rows.empty() ? NAN : slow_rows.front().mean_move.value_or(NAN)));
}

Outcome wire_session() {
    using testing_support::is_reply_to;
    Checker c;
    auto config = config_for(SimMode::StepByStep);
    auto script = testing_support::corpus_game("scholars_mate");
    LiveSimulation live(config, script);
    ControlServer server(live, config, "127.0.0.1:0");
    server.start();
    live.start();

    testing_support::WireClient ctrl(server.port());
    auto ack_then_event = [&](std::uint64_t ref, const std::string& what) {
        auto m = ctrl.next();
        c.expect(m && m->kind == WireKind::Ack && is_reply_to(*m, ref), what + ": no ack");
        m = ctrl.next();
        c.expect(m && m->kind == WireKind::Event, what + ": no event after the ack");
    };
    auto join = ctrl.join(true);
    auto m = ctrl.next();
    c.expect(m && is_reply_to(*m, join), "join not acknowledged");
    m = ctrl.next();
    c.expect(m && m->payload.value("snapshot", false), "no late-join snapshot");
    ack_then_event(ctrl.send(Command::start()), "Start");

    std::size_t metrics = 0;
    for (int i = 0; i < 7; ++i) {
        ack_then_event(ctrl.send(Command::step_one()), fmt::format("StepOne {}", i));
        m = ctrl.until([](const WireMessage& x) { return x.kind == WireKind::Event && !x.payload["metrics"].is_null(); });
        c.expect(m && m->payload["metrics"]["half_move"] == i, fmt::format("half-move {} metrics missing", i));
        metrics += m ? 1 : 0;
    }
    live.wait();
    auto report = live.report();
    std::thread closer([&] { server.shutdown(report); });
    m = ctrl.until([](const WireMessage& x) { return x.payload.contains("final_report"); });
    closer.join();
    c.expect(m && report_from_json(m->payload["final_report"]) == report, "final report missing or different");
    c.expect(report == run(config_for(SimMode::Virtual), script), "stepped report differs from virtual run");
    c.expect(!ctrl.seq_gap(), "server seq not contiguous");
    return c.done(fmt::format("Join, Start, 7x StepOne over TCP: acks precede events, {} metric events, final report",
                              metrics));
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"reference-indicators", reference_indicators},
        {"san-decoding", san_decoding},
        {"kinematics", kinematics},
        {"motion-laws", motion_laws},
        {"protocol-consistency", protocol_consistency},
        {"determinism-modes", determinism},
        {"statistics", statistics},
        {"sweep", sweep_criterion},
        {"wire-session", wire_session},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome out;
        try {
            out = check();
        } catch (const std::exception& e) {
            out = {false, fmt::format("exception: {}", e.what())};
        }
        failed += out.ok ? 0 : 1;
        fmt::print("{} {:<22} {}\n", out.ok ? "PASS" : "FAIL", name, out.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
