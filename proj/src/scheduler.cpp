#include "robochess/scheduler.hpp"

#include <fmt/format.h>

namespace robochess {

namespace {

int zone_index(Color c) { return c == Color::White ? 0 : 1; }

}  // namespace

MoveStreams split_moves(const std::vector<DecodedMove>& moves) {
    MoveStreams out;
    for (std::size_t i = 0; i < moves.size(); ++i) {
        Color expected = i % 2 == 0 ? Color::White : Color::Black;
        if (moves[i].color != expected)
            throw SchedulerError(SchedulerErrc::ColorOrderViolation,
                                 fmt::format("half-move {} is {} but {} was expected", i,
                                             to_string(moves[i].color), to_string(expected)));
        (expected == Color::White ? out.white : out.black).push_back(moves[i]);
    }
    return out;
}

std::vector<DecodedMove> interleave(const MoveStreams& streams) {
    std::vector<DecodedMove> out;
    out.reserve(streams.white.size() + streams.black.size());
    for (std::size_t i = 0; i < streams.white.size() || i < streams.black.size(); ++i) {
        if (i < streams.white.size()) out.push_back(streams.white[i]);
        if (i < streams.black.size()) out.push_back(streams.black[i]);
    }
    return out;
}

WorkPoint board_point(const BoardLayout& layout, Square sq) {
    WorkPoint p;
    p.kind = WorkPoint::Kind::Board;
    p.square = sq;
    p.position = square_center(layout, sq);
    return p;
}

WorkPoint discard_point(const BoardLayout& layout, Color zone, int slot) {
    WorkPoint p;
    p.kind = WorkPoint::Kind::Discard;
    p.zone = zone;
    p.slot = slot;
    p.position = layout.discard[zone_index(zone)].at(static_cast<std::size_t>(slot));
    return p;
}

Workspace Workspace::initial(const BoardLayout& layout) {
    Workspace ws;
    const BoardState start = BoardState::initial();
    for (Color c : {Color::White, Color::Black}) {
        for (int i = 0; i < 64; ++i) {
            const auto& p = start.cells[i];
            if (!p || p->color != c) continue;
            Tracked t;
            t.id = static_cast<int>(ws.pieces_.size());
            t.piece = *p;
            t.square = Square::from_index(i);
            t.position = square_center(layout, t.square);
            ws.board_[i] = t.id;
            ws.pieces_.push_back(t);
        }
    }
    return ws;
}

std::optional<int> Workspace::piece_at(Square sq) const { return board_[sq.index()]; }

void Workspace::grasp(const PickPlace& action) {
    auto& t = pieces_.at(static_cast<std::size_t>(action.piece_id));
    if (action.pick.kind == WorkPoint::Kind::Board) {
        if (board_[action.pick.square.index()] != action.piece_id)
            throw SchedulerError(SchedulerErrc::NoPieceAtSource,
                                 fmt::format("piece {} is not on {}", action.piece_id, action.pick.square.name()));
        board_[action.pick.square.index()].reset();
    } else if (t.location != Location::Discard || t.slot != action.pick.slot || t.zone != action.pick.zone) {
        throw SchedulerError(SchedulerErrc::NoPieceAtSource,
                             fmt::format("piece {} is not in discard slot {}", action.piece_id, action.pick.slot));
    }
    t.location = Location::Held;
}

void Workspace::carry(int id, const Point3& position) { pieces_.at(static_cast<std::size_t>(id)).position = position; }

void Workspace::release(const PickPlace& action) {
    auto& t = pieces_.at(static_cast<std::size_t>(action.piece_id));
    t.position = action.place.position;
    if (action.promote_to) t.piece.kind = *action.promote_to;
    if (action.place.kind == WorkPoint::Kind::Board) {
        t.location = Location::Board;
        t.square = action.place.square;
        board_[action.place.square.index()] = action.piece_id;
    } else {
        t.location = Location::Discard;
        t.zone = action.place.zone;
        t.slot = action.place.slot;
        ++discard_count_[zone_index(action.place.zone)];
    }
}

std::array<std::optional<Piece>, 64> Workspace::board_occupancy() const {
    std::array<std::optional<Piece>, 64> out{};
    for (int i = 0; i < 64; ++i)
        if (board_[i]) out[i] = pieces_[static_cast<std::size_t>(*board_[i])].piece;
    return out;
}

std::vector<Piece> Workspace::discarded(Color zone) const {
    std::vector<std::optional<Piece>> slots(kDiscardSlots);
    for (const auto& t : pieces_)
        if (t.location == Location::Discard && t.zone == zone) slots[static_cast<std::size_t>(t.slot)] = t.piece;
    std::vector<Piece> out;
    for (const auto& s : slots)
        if (s) out.push_back(*s);
    return out;
}

ActionPlan plan_actions(const DecodedMove& move, const BoardLayout& layout, const Workspace& workspace) {
    auto require = [&](Square sq) {
        auto id = workspace.piece_at(sq);
        if (!id)
            throw SchedulerError(SchedulerErrc::NoPieceAtSource,
                                 fmt::format("no piece on {} for {}", sq.name(), describe(move)));
        return *id;
    };

    ActionPlan plan;
    if (move.castle) {
        int home = move.from.rank;
        bool king_side = *move.castle == Castle::KingSide;
        Square rook_from{king_side ? 7 : 0, home};
        Square rook_to{king_side ? 5 : 3, home};
        plan.actions.push_back({board_point(layout, move.from), board_point(layout, move.to), require(move.from), {}});
        plan.actions.push_back({board_point(layout, rook_from), board_point(layout, rook_to), require(rook_from), {}});
        return plan;
    }
    const int mover = require(move.from);
    if (move.captured) {
        int slot = workspace.discard_count(move.color);
        if (slot >= kDiscardSlots)
            throw SchedulerError(SchedulerErrc::NoPieceAtSource, "discard zone is full");
        plan.actions.push_back({board_point(layout, move.captured->square), discard_point(layout, move.color, slot),
                                require(move.captured->square), {}});
    }
    plan.actions.push_back({board_point(layout, move.from), board_point(layout, move.to), mover, move.promotion});
    return plan;
}

std::string_view to_string(TurnPhase phase) {
    switch (phase) {
        case TurnPhase::AwaitStart: return "AwaitStart";
        case TurnPhase::WhiteToMove: return "WhiteToMove";
        case TurnPhase::WhiteMoving: return "WhiteMoving";
        case TurnPhase::BlackToMove: return "BlackToMove";
        case TurnPhase::BlackMoving: return "BlackMoving";
        case TurnPhase::Finished: return "Finished";
    }
    return "?";
}

Scheduler::Scheduler(MoveStreams streams) : streams_(std::move(streams)) {
    auto n = streams_.white.size(), m = streams_.black.size();
    if (n < m || n - m > 1)
        throw SchedulerError(SchedulerErrc::ColorOrderViolation,
                             fmt::format("stream sizes {} (white) and {} (black) do not alternate", n, m));
    trace_.push_back(state_.phase);
}

void Scheduler::enter(TurnPhase phase) {
    state_.phase = phase;
    trace_.push_back(phase);
}

const std::vector<DecodedMove>& Scheduler::stream_for(TurnPhase phase) const {
    return phase == TurnPhase::WhiteToMove || phase == TurnPhase::WhiteMoving ? streams_.white : streams_.black;
}

void Scheduler::start() {
    if (state_.phase != TurnPhase::AwaitStart)
        throw SchedulerError(SchedulerErrc::ProtocolViolation, "game already started");
    enter(TurnPhase::WhiteToMove);
}

std::optional<MoveRequest> Scheduler::next_turn(const Workspace& workspace, const BoardLayout& layout) {
    if (state_.phase != TurnPhase::WhiteToMove && state_.phase != TurnPhase::BlackToMove)
        throw SchedulerError(SchedulerErrc::ProtocolViolation,
                             fmt::format("next_turn called in phase {}", to_string(state_.phase)));
    const bool white = state_.phase == TurnPhase::WhiteToMove;
    const auto& stream = stream_for(state_.phase);
    const auto idx = static_cast<std::size_t>(state_.move_index);
    if (idx >= stream.size()) {
        enter(TurnPhase::Finished);
        return std::nullopt;
    }
    MoveRequest req;
    req.arm = white ? ArmId::MR1 : ArmId::MR2;
    req.arm_move_index = state_.move_index;
    req.half_move = 2 * state_.move_index + (white ? 0 : 1);
    req.move = stream[idx];
    req.plan = plan_actions(req.move, layout, workspace);
    enter(white ? TurnPhase::WhiteMoving : TurnPhase::BlackMoving);
    return req;
}

void Scheduler::on_move_complete(const MoveMetrics& metrics) {
    if (state_.phase != TurnPhase::WhiteMoving && state_.phase != TurnPhase::BlackMoving)
        throw SchedulerError(SchedulerErrc::ProtocolViolation,
                             fmt::format("move completion reported in phase {}", to_string(state_.phase)));
    completed_.push_back(metrics);
    const auto idx = static_cast<std::size_t>(state_.move_index);
    if (state_.phase == TurnPhase::WhiteMoving) {
        enter(idx < streams_.black.size() ? TurnPhase::BlackToMove : TurnPhase::Finished);
    } else {
        ++state_.move_index;
        enter(idx + 1 < streams_.white.size() ? TurnPhase::WhiteToMove : TurnPhase::Finished);
    }
}

}  // namespace robochess
