#include "robochess/notation.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>

namespace robochess {

namespace {

std::uint8_t promotion_flag(PieceKind k) {
    switch (k) {
        case PieceKind::Knight: return numeric_flags::promo_knight;
        case PieceKind::Bishop: return numeric_flags::promo_bishop;
        case PieceKind::Rook: return numeric_flags::promo_rook;
        case PieceKind::Queen: return numeric_flags::promo_queen;
        default: return 0;
    }
}

}  // namespace

NumericMove encode_numeric(const DecodedMove& move) {
    NumericMove out;
    out.from = static_cast<std::uint8_t>(move.from.index());
    out.to = static_cast<std::uint8_t>(move.to.index());
    if (move.captured) out.flags |= numeric_flags::capture;
    if (move.is_en_passant()) out.flags |= numeric_flags::en_passant;
    if (move.castle == Castle::KingSide) out.flags |= numeric_flags::castle_king;
    if (move.castle == Castle::QueenSide) out.flags |= numeric_flags::castle_queen;
    if (move.promotion) out.flags |= promotion_flag(*move.promotion);
    return out;
}

MoveMarkers decode_flags(std::uint8_t flags) {
    using namespace numeric_flags;
    MoveMarkers m;
    m.capture = flags & capture;
    m.en_passant = flags & en_passant;
    if (flags & castle_king) m.castle = Castle::KingSide;
    if (flags & castle_queen) m.castle = Castle::QueenSide;
    if (flags & promo_knight) m.promotion = PieceKind::Knight;
    if (flags & promo_bishop) m.promotion = PieceKind::Bishop;
    if (flags & promo_rook) m.promotion = PieceKind::Rook;
    if (flags & promo_queen) m.promotion = PieceKind::Queen;
    return m;
}

MoveMarkers markers_of(const DecodedMove& move) {
    return MoveMarkers{move.captured.has_value(), move.is_en_passant(), move.castle, move.promotion};
}

std::string to_csv_line(const NumericMove& m) {
    return fmt::format("{},{},{}", m.from, m.to, m.flags);
}

NumericMove parse_csv_line(std::string_view line) {
    unsigned values[3] = {};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int i = 0; i < 3; ++i) {
        auto [next, ec] = std::from_chars(p, end, values[i]);
        bool sep_ok = i < 2 ? (next != end && *next == ',') : next == end;
        if (ec != std::errc{} || !sep_ok)
            throw NotationError(NotationErrc::MalformedToken, fmt::format("bad numeric move line '{}'", line));
        p = next + (i < 2 ? 1 : 0);
    }
    if (values[0] > 63 || values[1] > 63 || values[2] > 255)
        throw NotationError(NotationErrc::MalformedToken, fmt::format("numeric move out of range '{}'", line));
    return NumericMove{static_cast<std::uint8_t>(values[0]), static_cast<std::uint8_t>(values[1]),
                       static_cast<std::uint8_t>(values[2])};
}

void write_numeric_file(const std::vector<DecodedMove>& moves, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    for (const auto& m : moves) out << to_csv_line(encode_numeric(m)) << '\n';
}

std::vector<NumericMove> read_numeric_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot read '{}'", path.string()));
    std::vector<NumericMove> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        out.push_back(parse_csv_line(line));
    }
    return out;
}

}  // namespace robochess
