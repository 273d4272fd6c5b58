#include "robochess/control_server.hpp"
#include "robochess/engine.hpp"
#include "robochess/metrics.hpp"
#include "robochess/notation.hpp"
#include "robochess/scheduler.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace robochess;

namespace {

enum Exit { kOk = 0, kOther = 1, kDecode = 2, kUnreachable = 3, kConfig = 4 };

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    out << text;
}

std::string seconds(const std::optional<double>& v) { return v ? fmt::format("{:.3f} s", *v) : "n/a"; }

void print_summary(const GameReport& r) {
    fmt::print("half-moves:        {}\n", r.per_move.size());
    fmt::print("MR1 mean move time: {}\n", seconds(r.mean_white));
    fmt::print("MR2 mean move time: {}\n", seconds(r.mean_black));
    if (r.r12) fmt::print("r12:               {:.4f}\n", *r.r12);
    else fmt::print("r12:               undefined ({})\n", r.r12_reason.value_or("?"));
    fmt::print("path MR1 / MR2:    {:.3f} m / {:.3f} m\n", r.total_path_white, r.total_path_black);
}

struct SimulateArgs {
    std::string game, config, mode, csv, report, serve;
    std::optional<double> white_speed, black_speed;
    bool realtime = false;
};

SimConfig build_config(const std::string& path) { return path.empty() ? SimConfig{} : load_config(path); }

GameReport simulate_live(const SimConfig& config, const GameScript& script, const std::string& serve) {
    LiveSimulation live(config, script);
    std::unique_ptr<ControlServer> server;
    if (!serve.empty()) {
        server = std::make_unique<ControlServer>(live, config, serve);
        server->start();
        fmt::print("listening on {}\n", server->address());
        std::fflush(stdout);
    } else {
        live.submit(Command::start());
    }
    live.start();
    live.wait();
    GameReport report = live.report();
    if (server) server->shutdown(report);
    if (auto failure = live.failure()) {
        if (live.failure_code() == EngineErrc::Unreachable) throw EngineError(EngineErrc::Unreachable, *failure);
        throw std::runtime_error(*failure);
    }
    return report;
}

int simulate(const SimulateArgs& a) {
    SimConfig config = build_config(a.config);
    if (!a.mode.empty()) config.mode = *parse_mode(a.mode);
    if (a.white_speed) config.white_speed = *a.white_speed;
    if (a.black_speed) config.black_speed = *a.black_speed;
    if (a.realtime) config.realtime = true;
    config.validate();

    GameScript script = load_game_file(a.game);
    GameReport report;
    if (!a.serve.empty()) {
        if (config.mode == SimMode::Virtual) config.mode = SimMode::Autoplay;
        report = simulate_live(config, script, a.serve);
    } else if (config.realtime && config.mode == SimMode::Autoplay) {
        report = simulate_live(config, script, {});
    } else {
        report = run(config, script);
    }

    if (!a.csv.empty()) write_text(a.csv, to_csv(report));
    if (!a.report.empty()) write_text(a.report, to_json(report).dump(2) + "\n");
    print_summary(report);
    return kOk;
}

int run_sweep(const std::string& game, const std::string& grid_path, const std::string& out,
              const std::string& config_path, bool serial) {
    SimConfig config = build_config(config_path);
    ParameterGrid grid = load_grid(grid_path);
    GameScript script = load_game_file(game);
    auto rows = serial ? sweep_serial(config, script, grid) : sweep(config, script, grid);
    write_text(out, sweep_to_csv(rows));
    std::size_t ok = 0;
    for (const auto& r : rows) ok += r.status == "ok";
    fmt::print("{} grid points, {} feasible, written to {}\n", rows.size(), ok, out);
    if (!rows.empty() && rows.front().mean_move)
        fmt::print("best: grid point {} with mean move time {:.3f} s\n", rows.front().grid_index, *rows.front().mean_move);
    return kOk;
}

int decode(const std::string& game, const std::string& out_dir) {
    DecodedGame decoded = decode_game(load_game_file(game));
    std::filesystem::create_directories(out_dir);
    auto streams = split_moves(decoded.moves);
    std::filesystem::path dir(out_dir);
    write_numeric_file(decoded.moves, dir / "game_symbols.txt");
    write_numeric_file(streams.white, dir / "player_white.txt");
    write_numeric_file(streams.black, dir / "player_black.txt");
    for (const auto& w : decoded.warnings) fmt::print(stderr, "warning: {}\n", w);
    fmt::print("{} half-moves: {} white, {} black\n", decoded.moves.size(), streams.white.size(),
               streams.black.size());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Replay a chess game with two simulated three-link manipulators"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Replay a game and report move-time metrics");
    simulate_cmd->add_option("game", sim.game, "Game record (SAN movetext)")->required()->check(CLI::ExistingFile);
    simulate_cmd->add_option("--config", sim.config, "Config file")->check(CLI::ExistingFile);
    simulate_cmd->add_option("--mode", sim.mode, "step, auto or virtual")
        ->check(CLI::IsMember({"step", "auto", "virtual"}));
    simulate_cmd->add_option("--white-speed", sim.white_speed, "Speed factor for MR1");
    simulate_cmd->add_option("--black-speed", sim.black_speed, "Speed factor for MR2");
    simulate_cmd->add_option("--csv", sim.csv, "Per-move CSV output");
    simulate_cmd->add_option("--report", sim.report, "JSON report output");
    simulate_cmd->add_option("--serve", sim.serve, "Serve the wire protocol on host:port");
    simulate_cmd->add_flag("--realtime", sim.realtime, "Pace Autoplay to the wall clock");

    std::string sweep_game, grid, out, sweep_config;
    bool serial = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "Rank geometries over a parameter grid");
    sweep_cmd->add_option("game", sweep_game, "Game record")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--grid", grid, "Grid file")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--out", out, "CSV output")->required();
    sweep_cmd->add_option("--config", sweep_config, "Base config file")->check(CLI::ExistingFile);
    sweep_cmd->add_flag("--serial", serial, "Run grid points one at a time");

    std::string decode_game_path, out_dir;
    auto* decode_cmd = app.add_subcommand("decode", "Decode a game and write the split move files");
    decode_cmd->add_option("game", decode_game_path, "Game record")->required()->check(CLI::ExistingFile);
    decode_cmd->add_option("--out-dir", out_dir, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate_cmd) return simulate(sim);
        if (*sweep_cmd) return run_sweep(sweep_game, grid, out, sweep_config, serial);
        if (*decode_cmd) return decode(decode_game_path, out_dir);
    } catch (const NotationError& e) {
        fmt::print(stderr, "decode error: {}\n", e.what());
        return kDecode;
    } catch (const EngineError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        if (e.code() == EngineErrc::DecodeError) return kDecode;
        if (e.code() == EngineErrc::Unreachable) return kUnreachable;
        return kOther;
    } catch (const ConfigError& e) {
        fmt::print(stderr, "{}\n", e.what());
        return kConfig;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kOther;
    }
    return kOther;
}
