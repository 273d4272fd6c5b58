#pragma once

// Chess notation decoding: movetext tokenizer, board state, legal move
// generation, SAN resolution and the compact numeric move record written
// to the per-arm split files.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace robochess {

enum class Color : std::uint8_t { White, Black };
enum class PieceKind : std::uint8_t { Pawn, Knight, Bishop, Rook, Queen, King };
enum class Castle : std::uint8_t { KingSide, QueenSide };

constexpr Color opposite(Color c) { return c == Color::White ? Color::Black : Color::White; }

std::string_view to_string(Color c);
std::string_view to_string(PieceKind k);
char piece_letter(PieceKind k);  // 'P', 'N', ...

struct Piece {
    PieceKind kind{};
    Color color{};
    friend bool operator==(const Piece&, const Piece&) = default;
};

struct Square {
    int file = 0;  // 0..7 = a..h
    int rank = 0;  // 0..7 = 1..8

    constexpr int index() const { return rank * 8 + file; }
    constexpr bool valid() const { return file >= 0 && file < 8 && rank >= 0 && rank < 8; }
    static constexpr Square from_index(int idx) { return Square{idx % 8, idx / 8}; }
    static std::optional<Square> parse(std::string_view name);
    std::string name() const;

    friend bool operator==(const Square&, const Square&) = default;
};

enum class NotationErrc {
    MalformedToken,
    EmptyGame,
    IllegalMove,
    AmbiguousMove,
    InvalidPosition,
};

class NotationError : public std::runtime_error {
public:
    NotationError(NotationErrc code, std::string message,
                  std::optional<std::size_t> token_index = std::nullopt,
                  std::optional<std::size_t> offset = std::nullopt);

    NotationErrc code() const { return code_; }
    std::optional<std::size_t> token_index() const { return token_index_; }
    std::optional<std::size_t> offset() const { return offset_; }

private:
    NotationErrc code_;
    std::optional<std::size_t> token_index_;
    std::optional<std::size_t> offset_;
};

struct CastlingRights {
    bool white_king = true;
    bool white_queen = true;
    bool black_king = true;
    bool black_queen = true;
    friend bool operator==(const CastlingRights&, const CastlingRights&) = default;
};

struct CapturedPiece {
    PieceKind kind{};
    Square square{};
    friend bool operator==(const CapturedPiece&, const CapturedPiece&) = default;
};

struct DecodedMove {
    Color color{};
    PieceKind piece{};
    Square from{};
    Square to{};
    std::optional<CapturedPiece> captured;
    std::optional<PieceKind> promotion;
    std::optional<Castle> castle;
    bool gives_check = false;

    bool is_en_passant() const { return captured && !(captured->square == to); }
    friend bool operator==(const DecodedMove&, const DecodedMove&) = default;
};

std::string describe(const DecodedMove& m);  // "white Pawn e2-e4"

class BoardState {
public:
    std::array<std::optional<Piece>, 64> cells{};
    CastlingRights castling{};
    std::optional<Square> en_passant;
    Color side_to_move = Color::White;
    int halfmove_clock = 0;
    int fullmove_number = 1;

    static BoardState initial();
    // Piece placement, side, castling and en-passant fields are required;
    // the two counters are optional.
    static BoardState from_fen(std::string_view fen);
    std::string to_fen() const;

    const std::optional<Piece>& at(Square sq) const { return cells[sq.index()]; }
    std::optional<Piece>& at(Square sq) { return cells[sq.index()]; }

    std::optional<Square> king_square(Color c) const;
    bool attacked_by(Square sq, Color attacker) const;
    bool in_check(Color c) const;

    // Throws NotationError(InvalidPosition) naming the broken invariant.
    void validate() const;

    friend bool operator==(const BoardState&, const BoardState&) = default;
};

struct GameScript {
    std::vector<std::string> tokens;
    std::optional<std::string> result;
};

GameScript parse_game_text(std::string_view text);
GameScript load_game_file(const std::filesystem::path& path);

std::vector<DecodedMove> legal_moves(const BoardState& board, Color color);
DecodedMove decode_move(const BoardState& board, std::string_view token);
BoardState apply_move(const BoardState& board, const DecodedMove& move);

// Applies a move already known to be legal (e.g. taken from legal_moves).
BoardState apply_move_unchecked(const BoardState& board, const DecodedMove& move);

// True when the token's '+'/'#' suffix disagrees with the move's check status.
bool check_suffix_mismatch(std::string_view token, const DecodedMove& move);

struct DecodedGame {
    std::vector<DecodedMove> moves;
    BoardState final_board;
    std::vector<std::string> warnings;
};

// Replays every token from the initial position. NotationError carries the
// half-move index of the failing token.
DecodedGame decode_game(const GameScript& script);

// Leaf-node counts. perft runs the root moves in parallel; perft_serial is
// the single-threaded reference.
std::uint64_t perft(const BoardState& board, int depth);
std::uint64_t perft_serial(const BoardState& board, int depth);

namespace numeric_flags {
inline constexpr std::uint8_t capture = 1u << 0;
inline constexpr std::uint8_t en_passant = 1u << 1;
inline constexpr std::uint8_t castle_king = 1u << 2;
inline constexpr std::uint8_t castle_queen = 1u << 3;
inline constexpr std::uint8_t promo_knight = 1u << 4;
inline constexpr std::uint8_t promo_bishop = 1u << 5;
inline constexpr std::uint8_t promo_rook = 1u << 6;
inline constexpr std::uint8_t promo_queen = 1u << 7;
}  // namespace numeric_flags

struct NumericMove {
    std::uint8_t from = 0;  // rank * 8 + file
    std::uint8_t to = 0;
    std::uint8_t flags = 0;
    friend bool operator==(const NumericMove&, const NumericMove&) = default;
};

struct MoveMarkers {
    bool capture = false;
    bool en_passant = false;
    std::optional<Castle> castle;
    std::optional<PieceKind> promotion;
    friend bool operator==(const MoveMarkers&, const MoveMarkers&) = default;
};

NumericMove encode_numeric(const DecodedMove& move);
MoveMarkers decode_flags(std::uint8_t flags);
MoveMarkers markers_of(const DecodedMove& move);

std::string to_csv_line(const NumericMove& m);  // "from,to,flags"
NumericMove parse_csv_line(std::string_view line);

// One "from,to,flags" line per move.
void write_numeric_file(const std::vector<DecodedMove>& moves, const std::filesystem::path& path);
std::vector<NumericMove> read_numeric_file(const std::filesystem::path& path);

}  // namespace robochess
