#include "robochess/engine.hpp"

#include <fmt/format.h>

#include <limits>

namespace robochess {

namespace {

DecodedGame decode_or_throw(const GameScript& script) {
    try {
        return decode_game(script);
    } catch (const NotationError& e) {
        throw EngineError(EngineErrc::DecodeError, e.what(), e.token_index());
    }
}

const SimConfig& validated(const SimConfig& config) {
    config.validate();
    return config;
}

}  // namespace

std::string_view to_string(Command::Type type) {
    switch (type) {
        case Command::Type::Start: return "Start";
        case Command::Type::StepOne: return "StepOne";
        case Command::Type::SetSpeed: return "SetSpeed";
        case Command::Type::SetMode: return "SetMode";
        case Command::Type::Abort: return "Abort";
    }
    return "?";
}

Simulation::Simulation(SimConfig config, const GameScript& script)
    : Simulation(validated(config), decode_or_throw(script)) {}

Simulation::Simulation(SimConfig config, DecodedGame game)
    : config_(std::move(config)),
      game_(std::move(game)),
      workspace_(Workspace::initial(config_.layout)),
      scheduler_(split_moves(game_.moves)) {
    config_.validate();
    for (ArmId id : {ArmId::MR1, ArmId::MR2}) {
        homes_[index(id)] = config_.home(id);
        poses_[index(id)] = homes_[index(id)];
    }
}

bool Simulation::awaiting_step() const {
    auto phase = scheduler_.state().phase;
    return config_.mode == SimMode::StepByStep && !finished_ && !active_ && !step_released_ &&
           (phase == TurnPhase::WhiteToMove || phase == TurnPhase::BlackToMove);
}

void Simulation::control(const Command& command) {
    auto invalid = [&](std::string_view why) {
        throw EngineError(EngineErrc::InvalidCommand, fmt::format("{}: {}", to_string(command.type), why));
    };
    if (finished_ && command.type != Command::Type::Abort) invalid("game is over");

    switch (command.type) {
        case Command::Type::Start:
            if (started()) invalid("game already started");
            scheduler_.start();
            break;
        case Command::Type::StepOne:
            if (config_.mode != SimMode::StepByStep) invalid("only valid in step-by-step mode");
            if (!started()) invalid("game not started");
            if (!awaiting_step()) invalid("a move is still in progress");
            step_released_ = true;
            break;
        case Command::Type::SetSpeed:
            if (!config_.speed_bounds.contains(command.speed))
                invalid(fmt::format("speed {} outside [{}, {}]", command.speed, config_.speed_bounds.min,
                                    config_.speed_bounds.max));
            (command.arm == ArmId::MR1 ? config_.white_speed : config_.black_speed) = command.speed;
            break;
        case Command::Type::SetMode:
            if (config_.mode == SimMode::Virtual || command.mode == SimMode::Virtual)
                invalid("virtual mode cannot be switched live");
            config_.mode = command.mode;
            break;
        case Command::Type::Abort:
            aborted_ = true;
            finished_ = true;
            active_.reset();
            break;
    }
}

bool Simulation::begin_next_move() {
    auto request = scheduler_.next_turn(workspace_, config_.layout);
    if (!request) {
        finished_ = true;
        return false;
    }
    active_.emplace();
    active_->request = std::move(*request);
    step_released_ = false;
    start_item();
    return true;
}

void Simulation::start_item() {
    auto& a = *active_;
    const int i = index(a.request.arm);
    try {
        a.motion = std::make_unique<PickPlaceMotion>(config_.arm(a.request.arm), a.request.plan.actions[a.item],
                                                     poses_[i], homes_[i],
                                                     MotionSettings{config_.dwell, config_.metrics_dt});
    } catch (const KinematicsError& e) {
        throw EngineError(EngineErrc::Unreachable,
                          fmt::format("half-move {} ({}): {}", a.request.half_move, describe(a.request.move), e.what()),
                          static_cast<std::size_t>(a.request.half_move));
    }
}

void Simulation::advance_active(double budget) {
    while (active_) {
        auto& a = *active_;
        const ArmId arm = a.request.arm;
        double left = a.motion->advance(budget, config_.speed(arm), workspace_);
        poses_[index(arm)] = a.motion->pose();
        if (!a.motion->done()) return;

        a.duration += a.motion->duration();
        a.path_length += a.motion->path_length();
        if (++a.item < a.request.plan.actions.size()) {
            start_item();
            budget = left;
            continue;
        }

        MoveMetrics m{a.duration, a.path_length, arm, a.request.arm_move_index, a.request.half_move};
        active_.reset();
        scheduler_.on_move_complete(m);
        recorder_.record(m);
        completed_move_ = m;
        if (scheduler_.state().phase == TurnPhase::Finished) finished_ = true;
        // Time left in this tick is dropped; the next move starts on a tick boundary.
        return;
    }
}

void Simulation::tick() {
    if (finished_ || !started()) return;
    if (!active_) {
        if (awaiting_step()) return;
        if (!begin_next_move()) {
            emit();
            return;
        }
    }
    ++ticks_;
    advance_active(config_.tick);
    emit(completed_move_);
    completed_move_.reset();
}

void Simulation::run_virtual() {
    if (!started()) scheduler_.start();
    while (!finished_) {
        if (!active_ && !begin_next_move()) break;
        advance_active(std::numeric_limits<double>::infinity());
        completed_move_.reset();
    }
}

void Simulation::emit(std::optional<MoveMetrics> completed) {
    if (config_.mode == SimMode::Virtual || !sink_) return;
    ++event_seq_;
    SimEvent e = snapshot();
    e.last_metrics = completed;
    sink_(e);
}

SimEvent Simulation::snapshot() const {
    SimEvent e;
    e.event_seq = event_seq_;
    e.sim_time = sim_time();
    for (ArmId id : {ArmId::MR1, ArmId::MR2}) {
        auto& arm = e.arms[index(id)];
        arm.joints = poses_[index(id)];
        arm.gripper = forward_kinematics(config_.arm(id), arm.joints);
        if (active_ && active_->request.arm == id) {
            arm.motion_phase = active_->motion->phase();
            if (active_->motion->holding()) arm.held_piece = active_->motion->piece_id();
        }
    }
    e.pieces.reserve(workspace_.pieces().size());
    for (const auto& t : workspace_.pieces()) {
        PieceSnapshot p{t.id, t.piece, t.position, t.location, std::nullopt};
        if (t.location == Workspace::Location::Board) p.square = t.square;
        e.pieces.push_back(p);
    }
    e.phase = scheduler_.state().phase;
    e.half_move = static_cast<int>(recorder_.per_move().size());
    e.mode = config_.mode;
    e.speeds = {config_.white_speed, config_.black_speed};
    e.awaiting_step = awaiting_step();
    e.finished = finished_;
    e.aborted = aborted_;
    return e;
}

GameReport Simulation::report() const {
    if (recorder_.per_move().empty()) {
        GameReport empty;
        empty.r12_reason = std::string(kFewerThanTwoPairs);
        return empty;
    }
    return recorder_.finalize();
}

GameReport run(const SimConfig& config, const DecodedGame& game) {
    Simulation sim(config, game);
    sim.control(Command::start());
    if (config.mode == SimMode::Virtual) {
        sim.run_virtual();
    } else {
        while (!sim.finished()) {
            if (sim.awaiting_step()) sim.control(Command::step_one());
            sim.tick();
        }
    }
    return sim.report();
}

GameReport run(const SimConfig& config, const GameScript& script) {
    config.validate();
    return run(config, decode_or_throw(script));
}

}  // namespace robochess
