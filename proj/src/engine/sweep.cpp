#include "robochess/engine.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace robochess {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

DecodedGame decode_for_sweep(const GameScript& script) {
    try {
        return decode_game(script);
    } catch (const NotationError& e) {
        throw EngineError(EngineErrc::DecodeError, e.what(), e.token_index());
    }
}

SweepRow sweep_point(const SimConfig& base, const DecodedGame& game, const ParameterGrid& grid, std::size_t index) {
    SweepRow row;
    row.grid_index = index;
    row.parameters = grid.point(index);

    SimConfig cfg = base;
    cfg.mode = SimMode::Virtual;
    try {
        for (const auto& [key, value] : row.parameters) apply_setting(cfg, key, value);
        cfg.mode = SimMode::Virtual;
        cfg.validate();
    } catch (const ConfigError& e) {
        row.status = "invalid";
        row.detail = e.problems().empty() ? e.what() : e.problems().front();
        return row;
    }

    try {
        GameReport report = run(cfg, game);
        row.status = "ok";
        row.mean_white = report.mean_white;
        row.mean_black = report.mean_black;
        double total = 0;
        for (const auto& m : report.per_move) total += m.duration;
        if (!report.per_move.empty()) row.mean_move = total / static_cast<double>(report.per_move.size());
        row.total_path_white = report.total_path_white;
        row.total_path_black = report.total_path_black;
    } catch (const EngineError& e) {
        row.status = e.code() == EngineErrc::Unreachable ? "unreachable" : "error";
        row.detail = e.what();
    } catch (const std::exception& e) {
        row.status = "error";
        row.detail = e.what();
    }
    return row;
}

void rank_rows(std::vector<SweepRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        bool fa = a.status == "ok" && a.mean_move, fb = b.status == "ok" && b.mean_move;
        if (fa != fb) return fa;
        if (fa && *a.mean_move != *b.mean_move) return *a.mean_move < *b.mean_move;
        return a.grid_index < b.grid_index;
    });
}

void check_grid(const ParameterGrid& grid) {
    if (grid.size() == 0) throw EngineError(EngineErrc::EmptyGrid, "parameter grid has no points");
}

}  // namespace

std::size_t ParameterGrid::size() const {
    if (axes.empty()) return 0;
    std::size_t n = 1;
    for (const auto& axis : axes) n *= axis.values.size();
    return n;
}

std::vector<std::pair<std::string, std::string>> ParameterGrid::point(std::size_t index) const {
    // The last axis varies fastest.
    std::vector<std::pair<std::string, std::string>> out(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
        const auto& axis = axes[k];
        out[k] = {axis.key, axis.values[index % axis.values.size()]};
        index /= axis.values.size();
    }
    return out;
}

ParameterGrid parse_grid(std::string_view text) {
    ParameterGrid grid;
    std::vector<std::string> problems;
    std::size_t line_no = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            problems.push_back(fmt::format("line {}: expected 'key = v1, v2, ...'", line_no));
            continue;
        }
        GridAxis axis{std::string(trim(line.substr(0, eq))), {}};
        std::string_view rest = line.substr(eq + 1);
        for (;;) {
            auto comma = rest.find(',');
            auto value = trim(rest.substr(0, comma));
            if (!value.empty()) axis.values.emplace_back(value);
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        if (axis.values.empty()) {
            problems.push_back(fmt::format("line {}: '{}' has no values", line_no, axis.key));
            continue;
        }
        // Reject unknown keys and unparsable values up front.
        SimConfig scratch;
        for (const auto& v : axis.values) {
            try {
                apply_setting(scratch, axis.key, v);
            } catch (const ConfigError& e) {
                for (const auto& p : e.problems()) problems.push_back(fmt::format("line {}: {}", line_no, p));
            }
        }
        grid.axes.push_back(std::move(axis));
    }
    if (!problems.empty()) throw ConfigError(ConfigErrc::ParseError, std::move(problems));
    if (grid.size() == 0) throw EngineError(EngineErrc::EmptyGrid, "parameter grid has no axes");
    return grid;
}

ParameterGrid load_grid(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(ConfigErrc::ParseError, {fmt::format("cannot open '{}'", path.string())});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_grid(buf.str());
}

std::vector<SweepRow> sweep(const SimConfig& base, const GameScript& script, const ParameterGrid& grid) {
    check_grid(grid);
    const DecodedGame game = decode_for_sweep(script);
    const auto n = static_cast<std::ptrdiff_t>(grid.size());
    std::vector<SweepRow> rows(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        rows[static_cast<std::size_t>(i)] = sweep_point(base, game, grid, static_cast<std::size_t>(i));
    rank_rows(rows);
    return rows;
}

std::vector<SweepRow> sweep_serial(const SimConfig& base, const GameScript& script, const ParameterGrid& grid) {
    check_grid(grid);
    const DecodedGame game = decode_for_sweep(script);
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) rows.push_back(sweep_point(base, game, grid, i));
    rank_rows(rows);
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{:.6f}", *v) : std::string(); };
    std::string out = "rank,grid_index";
    if (!rows.empty())
        for (const auto& [key, value] : rows.front().parameters) out += "," + key;
    out += ",status,mean_white_s,mean_black_s,mean_move_s,path_white_m,path_black_m\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        out += fmt::format("{},{}", r + 1, row.grid_index);
        for (const auto& [key, value] : row.parameters) out += "," + value;
        out += fmt::format(",{},{},{},{},{:.6f},{:.6f}\n", row.status, opt(row.mean_white), opt(row.mean_black),
                           opt(row.mean_move), row.total_path_white, row.total_path_black);
    }
    return out;
}

}  // namespace robochess
