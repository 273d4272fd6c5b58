#include "robochess/notation.hpp"

#include <fmt/format.h>

#include <cctype>
#include <sstream>

namespace robochess {

std::string_view to_string(Color c) { return c == Color::White ? "white" : "black"; }

std::string_view to_string(PieceKind k) {
    switch (k) {
        case PieceKind::Pawn: return "Pawn";
        case PieceKind::Knight: return "Knight";
        case PieceKind::Bishop: return "Bishop";
        case PieceKind::Rook: return "Rook";
        case PieceKind::Queen: return "Queen";
        case PieceKind::King: return "King";
    }
    return "?";
}

char piece_letter(PieceKind k) {
    constexpr char letters[] = {'P', 'N', 'B', 'R', 'Q', 'K'};
    return letters[static_cast<int>(k)];
}

std::optional<Square> Square::parse(std::string_view name) {
    if (name.size() != 2) return std::nullopt;
    Square sq{name[0] - 'a', name[1] - '1'};
    if (!sq.valid()) return std::nullopt;
    return sq;
}

std::string Square::name() const {
    return {static_cast<char>('a' + file), static_cast<char>('1' + rank)};
}

NotationError::NotationError(NotationErrc code, std::string message,
                             std::optional<std::size_t> token_index,
                             std::optional<std::size_t> offset)
    : std::runtime_error(std::move(message)), code_(code), token_index_(token_index), offset_(offset) {}

std::string describe(const DecodedMove& m) {
    std::string out = fmt::format("{} {} {}-{}", to_string(m.color), to_string(m.piece), m.from.name(),
                                  m.to.name());
    if (m.castle) out += m.castle == Castle::KingSide ? " O-O" : " O-O-O";
    if (m.captured) out += fmt::format(" x{}@{}", to_string(m.captured->kind), m.captured->square.name());
    if (m.promotion) out += fmt::format(" ={}", to_string(*m.promotion));
    return out;
}

namespace {

std::optional<Piece> piece_from_char(char c) {
    Color color = std::isupper(static_cast<unsigned char>(c)) ? Color::White : Color::Black;
    switch (std::tolower(static_cast<unsigned char>(c))) {
        case 'p': return Piece{PieceKind::Pawn, color};
        case 'n': return Piece{PieceKind::Knight, color};
        case 'b': return Piece{PieceKind::Bishop, color};
        case 'r': return Piece{PieceKind::Rook, color};
        case 'q': return Piece{PieceKind::Queen, color};
        case 'k': return Piece{PieceKind::King, color};
        default: return std::nullopt;
    }
}

char piece_to_char(Piece p) {
    char c = piece_letter(p.kind);
    return p.color == Color::White ? c : static_cast<char>(std::tolower(c));
}

[[noreturn]] void bad_fen(std::string_view fen, std::string_view why) {
    throw NotationError(NotationErrc::InvalidPosition, fmt::format("invalid FEN '{}': {}", fen, why));
}

}  // namespace

BoardState BoardState::initial() {
    return from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
}

BoardState BoardState::from_fen(std::string_view fen) {
    std::istringstream in{std::string(fen)};
    std::string placement, side, castling, ep;
    if (!(in >> placement >> side >> castling >> ep)) bad_fen(fen, "expected at least four fields");

    BoardState b;
    b.castling = {false, false, false, false};
    int rank = 7, file = 0;
    for (char c : placement) {
        if (c == '/') {
            if (file != 8) bad_fen(fen, "rank does not have 8 files");
            --rank;
            file = 0;
        } else if (c >= '1' && c <= '8') {
            file += c - '0';
        } else {
            auto p = piece_from_char(c);
            if (!p || file > 7 || rank < 0) bad_fen(fen, "bad piece placement");
            b.at(Square{file, rank}) = *p;
            ++file;
        }
        if (file > 8) bad_fen(fen, "rank overflow");
    }
    if (rank != 0 || file != 8) bad_fen(fen, "placement must describe 8 ranks");

    if (side == "w") {
        b.side_to_move = Color::White;
    } else if (side == "b") {
        b.side_to_move = Color::Black;
    } else {
        bad_fen(fen, "side to move must be w or b");
    }

    if (castling != "-") {
        for (char c : castling) {
            switch (c) {
                case 'K': b.castling.white_king = true; break;
                case 'Q': b.castling.white_queen = true; break;
                case 'k': b.castling.black_king = true; break;
                case 'q': b.castling.black_queen = true; break;
                default: bad_fen(fen, "bad castling field");
            }
        }
    }
    if (ep != "-") {
        auto sq = Square::parse(ep);
        if (!sq) bad_fen(fen, "bad en-passant square");
        b.en_passant = sq;
    }
    int half = 0, full = 1;
    if (in >> half) {
        in >> full;
    }
    b.halfmove_clock = half;
    b.fullmove_number = full;
    b.validate();
    return b;
}

std::string BoardState::to_fen() const {
    std::string out;
    for (int rank = 7; rank >= 0; --rank) {
        int empty = 0;
        for (int file = 0; file < 8; ++file) {
            const auto& p = at(Square{file, rank});
            if (!p) {
                ++empty;
                continue;
            }
            if (empty) out += static_cast<char>('0' + empty);
            empty = 0;
            out += piece_to_char(*p);
        }
        if (empty) out += static_cast<char>('0' + empty);
        if (rank) out += '/';
    }
    out += side_to_move == Color::White ? " w " : " b ";
    std::string rights;
    if (castling.white_king) rights += 'K';
    if (castling.white_queen) rights += 'Q';
    if (castling.black_king) rights += 'k';
    if (castling.black_queen) rights += 'q';
    out += rights.empty() ? "-" : rights;
    out += ' ';
    out += en_passant ? en_passant->name() : "-";
    out += fmt::format(" {} {}", halfmove_clock, fullmove_number);
    return out;
}

std::optional<Square> BoardState::king_square(Color c) const {
    for (int i = 0; i < 64; ++i) {
        const auto& p = cells[i];
        if (p && p->kind == PieceKind::King && p->color == c) return Square::from_index(i);
    }
    return std::nullopt;
}

bool BoardState::attacked_by(Square sq, Color attacker) const {
    auto holds = [&](int f, int r, PieceKind k) {
        if (f < 0 || f > 7 || r < 0 || r > 7) return false;
        const auto& p = cells[r * 8 + f];
        return p && p->color == attacker && p->kind == k;
    };

    int pawn_dir = attacker == Color::White ? -1 : 1;  // rank the attacking pawn stands on
    if (holds(sq.file - 1, sq.rank + pawn_dir, PieceKind::Pawn) ||
        holds(sq.file + 1, sq.rank + pawn_dir, PieceKind::Pawn))
        return true;

    static constexpr int knight[8][2] = {{1, 2}, {2, 1}, {2, -1}, {1, -2}, {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}};
    for (const auto& d : knight)
        if (holds(sq.file + d[0], sq.rank + d[1], PieceKind::Knight)) return true;

    for (int df = -1; df <= 1; ++df)
        for (int dr = -1; dr <= 1; ++dr)
            if ((df || dr) && holds(sq.file + df, sq.rank + dr, PieceKind::King)) return true;

    static constexpr int rays[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    for (int i = 0; i < 8; ++i) {
        bool diagonal = i >= 4;
        int f = sq.file + rays[i][0], r = sq.rank + rays[i][1];
        while (f >= 0 && f < 8 && r >= 0 && r < 8) {
            const auto& p = cells[r * 8 + f];
            if (p) {
                if (p->color == attacker &&
                    (p->kind == PieceKind::Queen ||
                     p->kind == (diagonal ? PieceKind::Bishop : PieceKind::Rook)))
                    return true;
                break;
            }
            f += rays[i][0];
            r += rays[i][1];
        }
    }
    return false;
}

bool BoardState::in_check(Color c) const {
    auto k = king_square(c);
    return k && attacked_by(*k, opposite(c));
}

void BoardState::validate() const {
    for (Color c : {Color::White, Color::Black}) {
        int kings = 0;
        for (const auto& p : cells)
            if (p && p->kind == PieceKind::King && p->color == c) ++kings;
        if (kings != 1)
            throw NotationError(NotationErrc::InvalidPosition,
                                fmt::format("{} must have exactly one king, found {}", to_string(c), kings));
    }
    if (en_passant && en_passant->rank != 2 && en_passant->rank != 5)
        throw NotationError(NotationErrc::InvalidPosition, "en-passant target must be on rank 3 or 6");
    if (halfmove_clock < 0 || fullmove_number < 1)
        throw NotationError(NotationErrc::InvalidPosition, "move counters out of range");
}

}  // namespace robochess
