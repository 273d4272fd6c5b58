#include "robochess/notation.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace robochess {

namespace {

struct SanPattern {
    PieceKind piece = PieceKind::Pawn;
    std::optional<int> from_file;
    std::optional<int> from_rank;
    bool capture = false;
    Square to{};
    std::optional<PieceKind> promotion;
    std::optional<Castle> castle;
    char suffix = 0;  // '+', '#' or 0
};

std::optional<PieceKind> piece_from_letter(char c) {
    switch (c) {
        case 'N': return PieceKind::Knight;
        case 'B': return PieceKind::Bishop;
        case 'R': return PieceKind::Rook;
        case 'Q': return PieceKind::Queen;
        case 'K': return PieceKind::King;
        default: return std::nullopt;
    }
}

bool is_file(char c) { return c >= 'a' && c <= 'h'; }
bool is_rank(char c) { return c >= '1' && c <= '8'; }

std::string_view strip_glyphs(std::string_view tok) {
    while (!tok.empty() && (tok.back() == '!' || tok.back() == '?')) tok.remove_suffix(1);
    return tok;
}

std::optional<SanPattern> parse_san(std::string_view tok) {
    SanPattern pat;
    tok = strip_glyphs(tok);
    if (!tok.empty() && (tok.back() == '+' || tok.back() == '#')) {
        pat.suffix = tok.back();
        tok.remove_suffix(1);
    }
    if (tok.empty()) return std::nullopt;

    if (tok == "O-O" || tok == "0-0") {
        pat.piece = PieceKind::King;
        pat.castle = Castle::KingSide;
        return pat;
    }
    if (tok == "O-O-O" || tok == "0-0-0") {
        pat.piece = PieceKind::King;
        pat.castle = Castle::QueenSide;
        return pat;
    }

    if (auto k = piece_from_letter(tok.front())) {
        pat.piece = *k;
        tok.remove_prefix(1);
    }

    if (pat.piece == PieceKind::Pawn && tok.size() >= 2) {
        // promotion: "e8=Q" or "e8Q"
        auto promo = piece_from_letter(tok.back());
        if (promo && *promo != PieceKind::King) {
            pat.promotion = promo;
            tok.remove_suffix(1);
            if (!tok.empty() && tok.back() == '=') tok.remove_suffix(1);
        }
    }

    if (tok.size() < 2 || !is_file(tok[tok.size() - 2]) || !is_rank(tok.back())) return std::nullopt;
    pat.to = Square{tok[tok.size() - 2] - 'a', tok.back() - '1'};
    tok.remove_suffix(2);

    if (!tok.empty() && tok.back() == 'x') {
        pat.capture = true;
        tok.remove_suffix(1);
    }
    if (!tok.empty() && is_file(tok.front())) {
        pat.from_file = tok.front() - 'a';
        tok.remove_prefix(1);
    }
    if (!tok.empty() && is_rank(tok.front())) {
        pat.from_rank = tok.front() - '1';
        tok.remove_prefix(1);
    }
    if (!tok.empty()) return std::nullopt;

    if (pat.piece == PieceKind::Pawn) {
        if (pat.from_rank) return std::nullopt;
        if (pat.capture != pat.from_file.has_value()) return std::nullopt;
        if (pat.promotion && pat.to.rank != 0 && pat.to.rank != 7) return std::nullopt;
    }
    return pat;
}

bool is_result(std::string_view lex) {
    return lex == "1-0" || lex == "0-1" || lex == "1/2-1/2" || lex == "*";
}

[[noreturn]] void malformed(std::string_view what, std::size_t token_index, std::size_t offset) {
    throw NotationError(NotationErrc::MalformedToken,
                        fmt::format("malformed token {} at offset {}: '{}'", token_index, offset, what),
                        token_index, offset);
}

}  // namespace

GameScript parse_game_text(std::string_view text) {
    GameScript script;
    std::size_t lexeme_index = 0;
    std::size_t i = 0;
    const std::size_t n = text.size();
    bool line_start = true;

    auto expect_number = [&](std::size_t number, bool black, std::size_t at) {
        std::size_t played = script.tokens.size();
        bool ok = black ? (played % 2 == 1 && number == (played + 1) / 2)
                        : (played % 2 == 0 && number == played / 2 + 1);
        if (!ok) {
            throw NotationError(NotationErrc::MalformedToken,
                                fmt::format("move number {}{} out of sequence at token {}", number,
                                            black ? "..." : ".", lexeme_index),
                                lexeme_index, at);
        }
    };

    while (i < n) {
        char c = text[i];
        if (c == '\n') {
            line_start = true;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (line_start && c == '[') {  // tag pair line
            while (i < n && text[i] != '\n') ++i;
            continue;
        }
        line_start = false;
        if (c == '{') {
            auto close = text.find('}', i);
            if (close == std::string_view::npos) malformed(text.substr(i, 16), lexeme_index, i);
            i = close + 1;
            continue;
        }
        if (c == ';') {
            while (i < n && text[i] != '\n') ++i;
            continue;
        }

        std::size_t start = i;
        while (i < n && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '{' && text[i] != ';')
            ++i;
        std::string_view lex = text.substr(start, i - start);

        if (script.result) malformed(lex, lexeme_index, start);
        if (is_result(lex)) {
            script.result = std::string(lex);
            ++lexeme_index;
            continue;
        }
        if (lex.front() == '$') {  // NAG
            ++lexeme_index;
            continue;
        }

        // "12." / "12..." possibly glued to the following move ("12.e4").
        if (std::isdigit(static_cast<unsigned char>(lex.front())) && lex.find('.') != std::string_view::npos) {
            std::size_t number = 0;
            auto [ptr, ec] = std::from_chars(lex.data(), lex.data() + lex.size(), number);
            std::size_t digits = static_cast<std::size_t>(ptr - lex.data());
            std::size_t dots = 0;
            while (digits + dots < lex.size() && lex[digits + dots] == '.') ++dots;
            if (ec != std::errc{} || dots == 0 || (dots != 1 && dots != 3)) malformed(lex, lexeme_index, start);
            expect_number(number, dots == 3, start);
            ++lexeme_index;
            lex.remove_prefix(digits + dots);
            start += digits + dots;
            if (lex.empty()) continue;
        }

        if (!parse_san(lex)) malformed(lex, lexeme_index, start);
        script.tokens.emplace_back(strip_glyphs(lex));
        ++lexeme_index;
    }

    if (script.tokens.empty()) throw NotationError(NotationErrc::EmptyGame, "game text contains no moves");
    return script;
}

GameScript load_game_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot open game file '{}'", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_game_text(buf.str());
}

DecodedMove decode_move(const BoardState& board, std::string_view token) {
    auto pat = parse_san(token);
    if (!pat) throw NotationError(NotationErrc::MalformedToken, fmt::format("malformed SAN '{}'", token));

    std::vector<DecodedMove> matches;
    for (const auto& m : legal_moves(board, board.side_to_move)) {
        if (pat->castle) {
            if (m.castle == pat->castle) matches.push_back(m);
            continue;
        }
        if (m.castle || m.piece != pat->piece || !(m.to == pat->to)) continue;
        if (pat->from_file && m.from.file != *pat->from_file) continue;
        if (pat->from_rank && m.from.rank != *pat->from_rank) continue;
        if (pat->capture && !m.captured) continue;
        if (m.promotion != pat->promotion) continue;
        matches.push_back(m);
    }
    if (matches.empty())
        throw NotationError(NotationErrc::IllegalMove,
                            fmt::format("'{}' matches no legal move in {}", token, board.to_fen()));
    if (matches.size() > 1)
        throw NotationError(NotationErrc::AmbiguousMove,
                            fmt::format("'{}' matches {} legal moves in {}", token, matches.size(), board.to_fen()));
    return matches.front();
}

bool check_suffix_mismatch(std::string_view token, const DecodedMove& move) {
    token = strip_glyphs(token);
    bool marked = !token.empty() && (token.back() == '+' || token.back() == '#');
    return marked != move.gives_check;
}

DecodedGame decode_game(const GameScript& script) {
    if (script.tokens.empty()) throw NotationError(NotationErrc::EmptyGame, "game has no moves");
    DecodedGame game{{}, BoardState::initial(), {}};
    game.moves.reserve(script.tokens.size());
    for (std::size_t i = 0; i < script.tokens.size(); ++i) {
        const auto& token = script.tokens[i];
        DecodedMove m;
        try {
            m = decode_move(game.final_board, token);
        } catch (const NotationError& e) {
            throw NotationError(e.code(), fmt::format("half-move {} ('{}'): {}", i, token, e.what()), i);
        }
        if (check_suffix_mismatch(token, m))
            game.warnings.push_back(fmt::format("half-move {} ('{}'): check marker does not match position", i, token));
        game.final_board = apply_move_unchecked(game.final_board, m);
        game.moves.push_back(m);
    }
    return game;
}

}  // namespace robochess
