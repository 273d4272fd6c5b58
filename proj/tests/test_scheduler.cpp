#include "support/corpus.hpp"

#include "robochess/scheduler.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>

using namespace robochess;
using testing_support::corpus_files;

namespace {

std::vector<DecodedMove> decode(const std::string& text) { return decode_game(parse_game_text(text)).moves; }

SchedulerErrc error_of(auto&& fn) {
    try {
        fn();
    } catch (const SchedulerError& e) {
        return e.code();
    }
    FAIL("expected SchedulerError");
    return SchedulerErrc::ProtocolViolation;
}

MoveMetrics metrics_for(const MoveRequest& r) { return {1.0, 0.5, r.arm, r.arm_move_index, r.half_move}; }

struct Replay {
    Scheduler scheduler;
    Workspace workspace;
    std::vector<ArmId> arms;
};

Replay replay(const std::vector<DecodedMove>& moves, const BoardLayout& layout) {
    Replay out{Scheduler(split_moves(moves)), Workspace::initial(layout), {}};
    out.scheduler.start();
    while (auto req = out.scheduler.next_turn(out.workspace, layout)) {
        for (const auto& action : req->plan.actions) out.workspace.apply(action);
        out.arms.push_back(req->arm);
        out.scheduler.on_move_complete(metrics_for(*req));
        if (out.scheduler.state().phase == TurnPhase::Finished) break;
    }
    return out;
}

}  // namespace

TEST_CASE("split and interleave") {
    auto moves = decode("1. e4 e5 2. Nf3 Nc6 3. Bb5");
    auto s = split_moves(moves);
    REQUIRE(s.white.size() == 3);
    REQUIRE(s.black.size() == 2);
    CHECK(s.white[0] == moves[0]);
    CHECK(s.white[1] == moves[2]);
    CHECK(s.white[2] == moves[4]);
    CHECK(s.black[0] == moves[1]);
    CHECK(s.black[1] == moves[3]);
    CHECK(interleave(s) == moves);

    auto empty = split_moves({});
    CHECK(empty.white.empty());
    CHECK(empty.black.empty());
    auto one = split_moves({moves[0]});
    CHECK(one.white.size() == 1);
    CHECK(one.black.empty());

    std::vector<DecodedMove> bad{moves[1], moves[0]};
    CHECK(error_of([&] { split_moves(bad); }) == SchedulerErrc::ColorOrderViolation);
}

TEST_CASE("action plans") {
    auto layout = default_layout();
    auto ws = Workspace::initial(layout);
    auto board = BoardState::initial();

    auto nf3 = plan_actions(decode_move(board, "Nf3"), layout, ws);
    REQUIRE(nf3.actions.size() == 1);
    CHECK(nf3.actions[0].pick == board_point(layout, *Square::parse("g1")));
    CHECK(nf3.actions[0].place == board_point(layout, *Square::parse("f3")));
    CHECK(nf3.actions[0].piece_id == *ws.piece_at(*Square::parse("g1")));

    // exd5 after 1. e4 d5
    auto moves = decode("1. e4 d5 2. exd5");
    for (int i = 0; i < 2; ++i)
        for (const auto& a : plan_actions(moves[static_cast<std::size_t>(i)], layout, ws).actions) ws.apply(a);
    auto cap = plan_actions(moves[2], layout, ws);
    REQUIRE(cap.actions.size() == 2);
    CHECK(cap.actions[0].pick == board_point(layout, *Square::parse("d5")));
    CHECK(cap.actions[0].place == discard_point(layout, Color::White, 0));
    CHECK(cap.actions[1].pick == board_point(layout, *Square::parse("e4")));
    CHECK(cap.actions[1].place == board_point(layout, *Square::parse("d5")));
    for (const auto& a : cap.actions) ws.apply(a);
    auto after = decode_game(parse_game_text("1. e4 d5 2. exd5")).final_board;
    CHECK(ws.board_occupancy() == after.cells);
    CHECK(ws.discarded(Color::White) == std::vector<Piece>{{PieceKind::Pawn, Color::Black}});

    auto castle = decode("1. e4 e5 2. Nf3 Nc6 3. Bc4 Bc5 4. O-O");
    auto ws2 = Workspace::initial(layout);
    for (std::size_t i = 0; i + 1 < castle.size(); ++i)
        for (const auto& a : plan_actions(castle[i], layout, ws2).actions) ws2.apply(a);
    auto oo = plan_actions(castle.back(), layout, ws2);
    REQUIRE(oo.actions.size() == 2);
    CHECK(oo.actions[0].pick.square == *Square::parse("e1"));
    CHECK(oo.actions[0].place.square == *Square::parse("g1"));
    CHECK(oo.actions[1].pick.square == *Square::parse("h1"));
    CHECK(oo.actions[1].place.square == *Square::parse("f1"));

    // A move whose source square is empty in the tracked workspace.
    auto ws3 = Workspace::initial(layout);
    auto e4 = decode_move(board, "e4");
    ws3.apply(plan_actions(e4, layout, ws3).actions[0]);
    CHECK(error_of([&] { plan_actions(e4, layout, ws3); }) == SchedulerErrc::NoPieceAtSource);
}

TEST_CASE("turn protocol") {
    auto layout = default_layout();
    auto ws = Workspace::initial(layout);
    Scheduler s(split_moves(decode("1. e4 e5 2. Nf3")));
    CHECK(s.state().phase == TurnPhase::AwaitStart);
    CHECK(error_of([&] { s.next_turn(ws, layout); }) == SchedulerErrc::ProtocolViolation);
    s.start();
    CHECK(error_of([&] { s.start(); }) == SchedulerErrc::ProtocolViolation);
    CHECK(s.state().phase == TurnPhase::WhiteToMove);
    CHECK(error_of([&] { s.on_move_complete({1, 1, ArmId::MR1, 0, 0}); }) == SchedulerErrc::ProtocolViolation);

    auto r = s.next_turn(ws, layout);
    REQUIRE(r);
    CHECK(r->arm == ArmId::MR1);
    CHECK(r->half_move == 0);
    CHECK(r->arm_move_index == 0);
    CHECK(s.state().phase == TurnPhase::WhiteMoving);
    CHECK(error_of([&] { s.next_turn(ws, layout); }) == SchedulerErrc::ProtocolViolation);
    for (const auto& a : r->plan.actions) ws.apply(a);
    s.on_move_complete(metrics_for(*r));
    CHECK(s.state().phase == TurnPhase::BlackToMove);

    r = s.next_turn(ws, layout);
    REQUIRE(r);
    CHECK(r->arm == ArmId::MR2);
    for (const auto& a : r->plan.actions) ws.apply(a);
    s.on_move_complete(metrics_for(*r));
    CHECK(s.state().phase == TurnPhase::WhiteToMove);
    CHECK(s.state().move_index == 1);

    r = s.next_turn(ws, layout);
    REQUIRE(r);
    s.on_move_complete(metrics_for(*r));
    CHECK(s.state().phase == TurnPhase::Finished);
    CHECK(s.completed().size() == 3);
}

TEST_CASE("exhausted stream finishes without a request") {
    auto layout = default_layout();
    auto ws = Workspace::initial(layout);
    Scheduler s(split_moves({}));
    s.start();
    CHECK_FALSE(s.next_turn(ws, layout));
    CHECK(s.state().phase == TurnPhase::Finished);
}

TEST_CASE("corpus: protocol trace, arm counts and physical consistency") {
    auto layout = default_layout();
    const TurnPhase cycle[] = {TurnPhase::WhiteToMove, TurnPhase::WhiteMoving, TurnPhase::BlackToMove,
                               TurnPhase::BlackMoving};
    for (const auto& path : corpus_files()) {
        CAPTURE(path.filename().string());
        auto game = decode_game(load_game_file(path));
        const std::size_t n = game.moves.size();
        auto rep = replay(game.moves, layout);

        const auto& trace = rep.scheduler.trace();
        REQUIRE(trace.size() == 2 * n + 2);
        CHECK(trace.front() == TurnPhase::AwaitStart);
        CHECK(trace.back() == TurnPhase::Finished);
        for (std::size_t i = 0; i < 2 * n; ++i) CHECK(trace[i + 1] == cycle[i % 4]);
        CHECK(std::count(trace.begin(), trace.end(), TurnPhase::Finished) == 1);

        auto mr1 = std::count(rep.arms.begin(), rep.arms.end(), ArmId::MR1);
        auto mr2 = std::count(rep.arms.begin(), rep.arms.end(), ArmId::MR2);
        CHECK(static_cast<std::size_t>(mr1) == (n + 1) / 2);
        CHECK(static_cast<std::size_t>(mr2) == n / 2);

        CHECK(rep.workspace.board_occupancy() == game.final_board.cells);
        for (Color side : {Color::White, Color::Black}) {
            std::vector<Piece> expected;
            auto board = BoardState::initial();
            for (const auto& m : game.moves) {
                if (m.color == side && m.captured) expected.push_back(*board.at(m.captured->square));
                board = apply_move_unchecked(board, m);
            }
            CHECK(rep.workspace.discarded(side) == expected);
            CHECK(rep.workspace.discard_count(side) == static_cast<int>(expected.size()));
        }
        // Every tracked piece sits at its square or slot position.
        for (const auto& t : rep.workspace.pieces()) {
            if (t.location == Workspace::Location::Board) CHECK(t.position == square_center(layout, t.square));
            else CHECK(t.location == Workspace::Location::Discard);
        }
    }
}
