#include "robochess/notation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>

namespace robochess {

namespace {

constexpr int kKnightSteps[8][2] = {{1, 2}, {2, 1}, {2, -1}, {1, -2}, {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}};
constexpr int kKingSteps[8][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
constexpr int kRookRays[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
constexpr int kBishopRays[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
constexpr PieceKind kPromotions[4] = {PieceKind::Queen, PieceKind::Rook, PieceKind::Bishop, PieceKind::Knight};

bool on_board(int f, int r) { return f >= 0 && f < 8 && r >= 0 && r < 8; }

class PseudoGenerator {
public:
    PseudoGenerator(const BoardState& board, Color color, std::vector<DecodedMove>& out)
        : board_(board), color_(color), out_(out) {}

    void run() {
        for (int i = 0; i < 64; ++i) {
            const auto& p = board_.cells[i];
            if (!p || p->color != color_) continue;
            Square from = Square::from_index(i);
            switch (p->kind) {
                case PieceKind::Pawn: pawn(from); break;
                case PieceKind::Knight: steps(from, PieceKind::Knight, kKnightSteps); break;
                case PieceKind::Bishop: rays(from, PieceKind::Bishop, kBishopRays); break;
                case PieceKind::Rook: rays(from, PieceKind::Rook, kRookRays); break;
                case PieceKind::Queen:
                    rays(from, PieceKind::Queen, kRookRays);
                    rays(from, PieceKind::Queen, kBishopRays);
                    break;
                case PieceKind::King:
                    steps(from, PieceKind::King, kKingSteps);
                    castles(from);
                    break;
            }
        }
    }

private:
    void add(PieceKind kind, Square from, Square to) {
        DecodedMove m{color_, kind, from, to, {}, {}, {}, false};
        if (const auto& target = board_.at(to)) m.captured = CapturedPiece{target->kind, to};
        out_.push_back(m);
    }

    void steps(Square from, PieceKind kind, const int (&deltas)[8][2]) {
        for (const auto& d : deltas) {
            int f = from.file + d[0], r = from.rank + d[1];
            if (!on_board(f, r)) continue;
            const auto& target = board_.at(Square{f, r});
            if (target && target->color == color_) continue;
            add(kind, from, Square{f, r});
        }
    }

    void rays(Square from, PieceKind kind, const int (&dirs)[4][2]) {
        for (const auto& d : dirs) {
            int f = from.file + d[0], r = from.rank + d[1];
            while (on_board(f, r)) {
                const auto& target = board_.at(Square{f, r});
                if (target && target->color == color_) break;
                add(kind, from, Square{f, r});
                if (target) break;
                f += d[0];
                r += d[1];
            }
        }
    }

    void pawn_to(Square from, Square to, std::optional<CapturedPiece> captured) {
        int last_rank = color_ == Color::White ? 7 : 0;
        DecodedMove m{color_, PieceKind::Pawn, from, to, captured, {}, {}, false};
        if (to.rank == last_rank) {
            for (PieceKind k : kPromotions) {
                m.promotion = k;
                out_.push_back(m);
            }
        } else {
            out_.push_back(m);
        }
    }

    void pawn(Square from) {
        int dir = color_ == Color::White ? 1 : -1;
        int start_rank = color_ == Color::White ? 1 : 6;
        int r = from.rank + dir;
        if (!on_board(from.file, r)) return;
        Square one{from.file, r};
        if (!board_.at(one)) {
            pawn_to(from, one, std::nullopt);
            Square two{from.file, r + dir};
            if (from.rank == start_rank && !board_.at(two)) pawn_to(from, two, std::nullopt);
        }
        for (int df : {-1, 1}) {
            int f = from.file + df;
            if (!on_board(f, r)) continue;
            Square to{f, r};
            const auto& target = board_.at(to);
            if (target && target->color != color_) {
                pawn_to(from, to, CapturedPiece{target->kind, to});
            } else if (!target && board_.en_passant && *board_.en_passant == to &&
                       board_.side_to_move == color_) {
                Square victim{f, from.rank};
                const auto& v = board_.at(victim);
                if (v && v->kind == PieceKind::Pawn && v->color != color_)
                    pawn_to(from, to, CapturedPiece{PieceKind::Pawn, victim});
            }
        }
    }

    void castles(Square from) {
        int home = color_ == Color::White ? 0 : 7;
        if (!(from == Square{4, home})) return;
        Color enemy = opposite(color_);
        bool king_side = color_ == Color::White ? board_.castling.white_king : board_.castling.black_king;
        bool queen_side = color_ == Color::White ? board_.castling.white_queen : board_.castling.black_queen;
        auto empty = [&](int f) { return !board_.at(Square{f, home}); };
        auto safe = [&](int f) { return !board_.attacked_by(Square{f, home}, enemy); };
        auto rook_at = [&](int f) {
            const auto& p = board_.at(Square{f, home});
            return p && p->kind == PieceKind::Rook && p->color == color_;
        };
        if (!safe(4)) return;
        if (king_side && rook_at(7) && empty(5) && empty(6) && safe(5) && safe(6)) {
            out_.push_back(DecodedMove{color_, PieceKind::King, from, Square{6, home}, {}, {}, Castle::KingSide, false});
        }
        if (queen_side && rook_at(0) && empty(1) && empty(2) && empty(3) && safe(3) && safe(2)) {
            out_.push_back(DecodedMove{color_, PieceKind::King, from, Square{2, home}, {}, {}, Castle::QueenSide, false});
        }
    }

    const BoardState& board_;
    Color color_;
    std::vector<DecodedMove>& out_;
};

void clear_rights_for(CastlingRights& rights, Square sq) {
    if (sq == Square{0, 0}) rights.white_queen = false;
    if (sq == Square{7, 0}) rights.white_king = false;
    if (sq == Square{0, 7}) rights.black_queen = false;
    if (sq == Square{7, 7}) rights.black_king = false;
    if (sq == Square{4, 0}) rights.white_king = rights.white_queen = false;
    if (sq == Square{4, 7}) rights.black_king = rights.black_queen = false;
}

std::uint64_t count_leaves(const BoardState& board, int depth) {
    auto moves = legal_moves(board, board.side_to_move);
    if (depth == 1) return moves.size();
    std::uint64_t nodes = 0;
    for (const auto& m : moves) nodes += count_leaves(apply_move_unchecked(board, m), depth - 1);
    return nodes;
}

}  // namespace

BoardState apply_move_unchecked(const BoardState& board, const DecodedMove& move) {
    BoardState next = board;
    Piece moving = *next.at(move.from);

    if (move.captured) next.at(move.captured->square).reset();
    next.at(move.from).reset();
    next.at(move.to) = move.promotion ? Piece{*move.promotion, moving.color} : moving;

    if (move.castle) {
        int home = move.from.rank;
        int rook_from = *move.castle == Castle::KingSide ? 7 : 0;
        int rook_to = *move.castle == Castle::KingSide ? 5 : 3;
        next.at(Square{rook_to, home}) = next.at(Square{rook_from, home});
        next.at(Square{rook_from, home}).reset();
    }

    clear_rights_for(next.castling, move.from);
    clear_rights_for(next.castling, move.to);

    next.en_passant.reset();
    if (move.piece == PieceKind::Pawn && std::abs(move.to.rank - move.from.rank) == 2)
        next.en_passant = Square{move.from.file, (move.from.rank + move.to.rank) / 2};

    next.halfmove_clock = (move.piece == PieceKind::Pawn || move.captured) ? 0 : board.halfmove_clock + 1;
    if (board.side_to_move == Color::Black) ++next.fullmove_number;
    next.side_to_move = opposite(board.side_to_move);
    return next;
}

std::vector<DecodedMove> legal_moves(const BoardState& board, Color color) {
    std::vector<DecodedMove> pseudo;
    pseudo.reserve(64);
    PseudoGenerator(board, color, pseudo).run();

    // Legality is judged on the position as if `color` were to move.
    BoardState base = board;
    base.side_to_move = color;
    std::vector<DecodedMove> legal;
    legal.reserve(pseudo.size());
    for (auto& m : pseudo) {
        BoardState after = apply_move_unchecked(base, m);
        if (after.in_check(color)) continue;
        m.gives_check = after.in_check(opposite(color));
        legal.push_back(m);
    }
    return legal;
}

BoardState apply_move(const BoardState& board, const DecodedMove& move) {
    auto moves = legal_moves(board, board.side_to_move);
    auto same_motion = [&](const DecodedMove& m) {
        return m.color == move.color && m.piece == move.piece && m.from == move.from && m.to == move.to &&
               m.promotion == move.promotion && m.castle == move.castle && m.captured == move.captured;
    };
    if (std::none_of(moves.begin(), moves.end(), same_motion))
        throw NotationError(NotationErrc::IllegalMove,
                            fmt::format("illegal move {} in {}", describe(move), board.to_fen()));
    return apply_move_unchecked(board, move);
}

std::uint64_t perft_serial(const BoardState& board, int depth) {
    if (depth <= 0) return 1;
    return count_leaves(board, depth);
}

std::uint64_t perft(const BoardState& board, int depth) {
    if (depth <= 1) return perft_serial(board, depth);
    const auto roots = legal_moves(board, board.side_to_move);
    const auto n = static_cast<std::ptrdiff_t>(roots.size());
    std::uint64_t nodes = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : nodes)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        nodes += count_leaves(apply_move_unchecked(board, roots[i]), depth - 1);
    }
    return nodes;
}

}  // namespace robochess
