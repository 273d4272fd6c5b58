#pragma once

// Simulation orchestration: configuration, the deterministic tick loop,
// operator commands, the threaded live runner and the geometry sweep.

#include "robochess/metrics.hpp"
#include "robochess/motion.hpp"
#include "robochess/notation.hpp"
#include "robochess/scheduler.hpp"

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace robochess {

enum class SimMode { StepByStep, Autoplay, Virtual };
std::string_view to_string(SimMode mode);  // "step", "auto", "virtual"
std::optional<SimMode> parse_mode(std::string_view text);

// ---------------------------------------------------------------- config

enum class ConfigErrc { ParseError, ValidationError };

class ConfigError : public std::runtime_error {
public:
    ConfigError(ConfigErrc code, std::vector<std::string> problems);
    ConfigErrc code() const { return code_; }
    const std::vector<std::string>& problems() const { return problems_; }

private:
    ConfigErrc code_;
    std::vector<std::string> problems_;
};

struct SimConfig {
    ArmGeometry white_arm = default_white_arm();
    ArmGeometry black_arm = default_black_arm();
    // Per-joint home overrides; unset joints use default_home_pose.
    std::array<std::optional<double>, 3> white_home{};
    std::array<std::optional<double>, 3> black_home{};
    BoardLayout layout = default_layout();
    double white_speed = 1.0;
    double black_speed = 1.0;
    SpeedBounds speed_bounds{};
    double dwell = 0.1;
    double metrics_dt = 0.01;
    SimMode mode = SimMode::Autoplay;
    double tick = 0.01;
    bool realtime = false;  // throttle Autoplay to the wall clock
    std::string game_file;

    const ArmGeometry& arm(ArmId id) const { return id == ArmId::MR1 ? white_arm : black_arm; }
    JointAngles home(ArmId id) const;
    double speed(ArmId id) const { return id == ArmId::MR1 ? white_speed : black_speed; }

    // Throws ConfigError(ValidationError) listing every problem found.
    void validate() const;
};

// Flat "dotted.key = value" text. Keys take an arm prefix "white.", "black."
// or "arm." (both arms).
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::filesystem::path& path);
// Sets one key; throws ConfigError(ParseError) for unknown keys or bad values.
void apply_setting(SimConfig& config, std::string_view key, std::string_view value);

// ---------------------------------------------------------------- events

enum class EngineErrc { DecodeError, Unreachable, InvalidCommand, EmptyGrid };

class EngineError : public std::runtime_error {
public:
    EngineError(EngineErrc code, std::string message, std::optional<std::size_t> half_move = std::nullopt)
        : std::runtime_error(std::move(message)), code_(code), half_move_(half_move) {}
    EngineErrc code() const { return code_; }
    std::optional<std::size_t> half_move() const { return half_move_; }

private:
    EngineErrc code_;
    std::optional<std::size_t> half_move_;
};

struct ArmSnapshot {
    JointAngles joints{};
    Point3 gripper{};
    std::optional<int> held_piece;
    std::optional<MotionPhase> motion_phase;
};

struct PieceSnapshot {
    int id = 0;
    Piece piece{};
    Point3 position{};
    Workspace::Location location = Workspace::Location::Board;
    std::optional<Square> square;
};

struct SimEvent {
    std::uint64_t event_seq = 0;
    double sim_time = 0;
    std::array<ArmSnapshot, 2> arms{};
    std::vector<PieceSnapshot> pieces;
    TurnPhase phase = TurnPhase::AwaitStart;
    int half_move = 0;  // half-moves completed
    SimMode mode = SimMode::Autoplay;
    std::array<double, 2> speeds{};
    std::optional<MoveMetrics> last_metrics;  // set on the event that completes a move
    bool awaiting_step = false;
    bool finished = false;
    bool aborted = false;
};

struct Command {
    enum class Type { Start, StepOne, SetSpeed, SetMode, Abort };
    Type type = Type::Start;
    ArmId arm = ArmId::MR1;  // SetSpeed
    double speed = 1.0;      // SetSpeed
    SimMode mode = SimMode::Autoplay;  // SetMode

    static Command start() { return {Type::Start}; }
    static Command step_one() { return {Type::StepOne}; }
    static Command set_speed(ArmId arm, double s) { return {Type::SetSpeed, arm, s}; }
    static Command set_mode(SimMode m) { return {Type::SetMode, ArmId::MR1, 1.0, m}; }
    static Command abort() { return {Type::Abort}; }
};

std::string_view to_string(Command::Type type);

// ---------------------------------------------------------------- simulation

// Single-threaded simulation core. Time only advances through tick() (or
// run_virtual()), so results depend on the config and the game alone.
class Simulation {
public:
    using EventSink = std::function<void(const SimEvent&)>;

    Simulation(SimConfig config, const GameScript& script);
    Simulation(SimConfig config, DecodedGame game);
    // Active motions keep references into the owned config.
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    void set_event_sink(EventSink sink) { sink_ = std::move(sink); }

    // Throws EngineError(InvalidCommand) when the command does not apply.
    // Emits nothing; callers publish the new state themselves.
    void control(const Command& command);

    // Advances sim_time by one tick unless the game is idle (not started,
    // awaiting a step, finished). Non-virtual modes emit one event per tick.
    void tick();
    // Executes every remaining move with no ticks and no events.
    void run_virtual();

    bool started() const { return scheduler_.state().phase != TurnPhase::AwaitStart; }
    bool finished() const { return finished_; }
    bool aborted() const { return aborted_; }
    bool awaiting_step() const;
    bool idle() const { return finished_ || !started() || awaiting_step(); }

    double sim_time() const { return static_cast<double>(ticks_) * config_.tick; }
    const SimConfig& config() const { return config_; }
    const DecodedGame& game() const { return game_; }
    const Workspace& workspace() const { return workspace_; }
    const Scheduler& scheduler() const { return scheduler_; }
    const JointAngles& arm_pose(ArmId id) const { return poses_[index(id)]; }

    SimEvent snapshot() const;
    // Emits the current state outside the tick cadence (after a command).
    void emit_state() { emit(); }
    // Finalized report; after Abort this covers the completed moves only.
    GameReport report() const;

private:
    struct ActiveMove {
        MoveRequest request;
        std::size_t item = 0;
        std::unique_ptr<PickPlaceMotion> motion;
        double duration = 0;
        double path_length = 0;
    };

    static int index(ArmId id) { return id == ArmId::MR1 ? 0 : 1; }
    bool begin_next_move();
    void start_item();
    // Runs the active move for up to `budget` seconds.
    void advance_active(double budget);
    void emit(std::optional<MoveMetrics> completed = std::nullopt);

    SimConfig config_;
    DecodedGame game_;
    Workspace workspace_;
    Scheduler scheduler_;
    MetricsRecorder recorder_;
    std::array<JointAngles, 2> poses_{};
    std::array<JointAngles, 2> homes_{};
    std::optional<ActiveMove> active_;
    std::optional<MoveMetrics> completed_move_;
    std::uint64_t ticks_ = 0;
    std::uint64_t event_seq_ = 0;
    bool step_released_ = false;
    bool finished_ = false;
    bool aborted_ = false;
    EventSink sink_;
};

// Decodes and plays the whole game. StepByStep games are stepped as soon as
// they wait for the operator.
GameReport run(const SimConfig& config, const GameScript& script);
GameReport run(const SimConfig& config, const DecodedGame& game);

// ---------------------------------------------------------------- live runner

struct CommandResult {
    bool ok = true;
    std::string error;
};

// Runs a Simulation on its own thread. Commands are queued from any thread
// and applied at tick boundaries; subscribers get every event on the
// simulation thread and must not block.
class LiveSimulation {
public:
    using Subscriber = std::function<void(const SimEvent&, bool late_join_snapshot)>;
    using Completion = std::function<void(const CommandResult&)>;

    LiveSimulation(SimConfig config, const GameScript& script);
    ~LiveSimulation();
    LiveSimulation(const LiveSimulation&) = delete;
    LiveSimulation& operator=(const LiveSimulation&) = delete;

    void start();
    // Completion runs on the simulation thread right after the command is
    // applied, before any event it causes is published.
    void submit(const Command& command, Completion done = {});
    // Delivers the current state as a snapshot, then every later event.
    int subscribe(Subscriber subscriber);
    void unsubscribe(int id);

    // Blocks until the game finishes, is aborted or fails.
    void wait();
    void stop();
    bool done() const;

    GameReport report() const;
    std::optional<std::string> failure() const;
    std::optional<EngineErrc> failure_code() const;

private:
    void loop();
    void publish(const SimEvent& event);

    Simulation sim_;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<std::pair<Command, Completion>> commands_;
    std::mutex subscribers_mutex_;
    std::vector<std::pair<int, Subscriber>> subscribers_;
    int next_subscriber_ = 0;
    SimEvent latest_;
    bool stop_ = false;
    bool done_ = false;
    std::optional<std::string> failure_;
    std::optional<EngineErrc> failure_code_;
    std::optional<GameReport> report_;
    std::thread thread_;
};

// ---------------------------------------------------------------- sweep

struct GridAxis {
    std::string key;
    std::vector<std::string> values;
};

struct ParameterGrid {
    std::vector<GridAxis> axes;
    std::size_t size() const;
    std::vector<std::pair<std::string, std::string>> point(std::size_t index) const;
};

// Config syntax with comma-separated value lists.
ParameterGrid parse_grid(std::string_view text);
ParameterGrid load_grid(const std::filesystem::path& path);

struct SweepRow {
    std::size_t grid_index = 0;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::string status;  // "ok", "unreachable", "invalid" or "error"
    std::string detail;
    std::optional<double> mean_white;
    std::optional<double> mean_black;
    std::optional<double> mean_move;  // over all half-moves
    double total_path_white = 0;
    double total_path_black = 0;

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

// One Virtual run per grid point; rows sorted by mean_move, infeasible last.
// sweep runs grid points in parallel, sweep_serial is the reference loop.
std::vector<SweepRow> sweep(const SimConfig& base, const GameScript& script, const ParameterGrid& grid);
std::vector<SweepRow> sweep_serial(const SimConfig& base, const GameScript& script, const ParameterGrid& grid);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace robochess
