#pragma once

// Splits a decoded game into the two arms' move streams, turns each
// half-move into pick/place actions, and runs the alternating turn protocol.

#include "robochess/kinematics.hpp"
#include "robochess/move_metrics.hpp"
#include "robochess/notation.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace robochess {

enum class SchedulerErrc { ColorOrderViolation, ProtocolViolation, NoPieceAtSource };

class SchedulerError : public std::runtime_error {
public:
    SchedulerError(SchedulerErrc code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}
    SchedulerErrc code() const { return code_; }

private:
    SchedulerErrc code_;
};

struct MoveStreams {
    std::vector<DecodedMove> white;
    std::vector<DecodedMove> black;
};

MoveStreams split_moves(const std::vector<DecodedMove>& moves);
std::vector<DecodedMove> interleave(const MoveStreams& streams);

inline ArmId arm_for(Color c) { return c == Color::White ? ArmId::MR1 : ArmId::MR2; }

struct WorkPoint {
    enum class Kind { Board, Discard };
    Kind kind = Kind::Board;
    Square square{};          // Board
    Color zone = Color::White;  // Discard: zone owner (the capturing side)
    int slot = 0;             // Discard
    Point3 position{};

    friend bool operator==(const WorkPoint&, const WorkPoint&) = default;
};

WorkPoint board_point(const BoardLayout& layout, Square sq);
WorkPoint discard_point(const BoardLayout& layout, Color zone, int slot);

struct PickPlace {
    WorkPoint pick;
    WorkPoint place;
    int piece_id = -1;
    std::optional<PieceKind> promote_to;
    friend bool operator==(const PickPlace&, const PickPlace&) = default;
};

struct ActionPlan {
    std::vector<PickPlace> actions;  // 1 item, or 2 for capture/castling
};

// Physical whereabouts of every piece in the shared workspace.
class Workspace {
public:
    enum class Location { Board, Discard, Held };

    struct Tracked {
        int id = 0;
        Piece piece{};
        Location location = Location::Board;
        Square square{};
        Color zone = Color::White;
        int slot = 0;
        Point3 position{};
    };

    static Workspace initial(const BoardLayout& layout);

    const std::vector<Tracked>& pieces() const { return pieces_; }
    const Tracked& piece(int id) const { return pieces_.at(static_cast<std::size_t>(id)); }
    std::optional<int> piece_at(Square sq) const;
    int discard_count(Color zone) const { return discard_count_[zone == Color::White ? 0 : 1]; }

    // Grasp lifts the piece off its pick point; release puts it at the place
    // point, applying any promotion.
    void grasp(const PickPlace& action);
    void carry(int id, const Point3& position);
    void release(const PickPlace& action);
    void apply(const PickPlace& action) {
        grasp(action);
        release(action);
    }

    std::array<std::optional<Piece>, 64> board_occupancy() const;
    std::vector<Piece> discarded(Color zone) const;  // in slot order

private:
    std::vector<Tracked> pieces_;
    std::array<std::optional<int>, 64> board_{};
    std::array<int, 2> discard_count_{};
};

ActionPlan plan_actions(const DecodedMove& move, const BoardLayout& layout, const Workspace& workspace);

enum class TurnPhase { AwaitStart, WhiteToMove, WhiteMoving, BlackToMove, BlackMoving, Finished };
std::string_view to_string(TurnPhase phase);

struct TurnState {
    TurnPhase phase = TurnPhase::AwaitStart;
    int move_index = 0;  // full moves completed by black
};

struct MoveRequest {
    ArmId arm = ArmId::MR1;
    int half_move = 0;
    int arm_move_index = 0;
    DecodedMove move{};
    ActionPlan plan{};
};

class Scheduler {
public:
    explicit Scheduler(MoveStreams streams);

    const TurnState& state() const { return state_; }
    const MoveStreams& streams() const { return streams_; }
    std::size_t total_moves() const { return streams_.white.size() + streams_.black.size(); }
    // Every phase entered, starting with AwaitStart.
    const std::vector<TurnPhase>& trace() const { return trace_; }
    const std::vector<MoveMetrics>& completed() const { return completed_; }

    void start();
    // Hands out the side-to-move's next move; empty once its stream is exhausted.
    std::optional<MoveRequest> next_turn(const Workspace& workspace, const BoardLayout& layout);
    void on_move_complete(const MoveMetrics& metrics);

private:
    void enter(TurnPhase phase);
    const std::vector<DecodedMove>& stream_for(TurnPhase phase) const;

    MoveStreams streams_;
    TurnState state_;
    std::vector<TurnPhase> trace_;
    std::vector<MoveMetrics> completed_;
};

}  // namespace robochess
