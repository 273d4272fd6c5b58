#include "robochess/engine.hpp"

#include <chrono>

namespace robochess {

LiveSimulation::LiveSimulation(SimConfig config, const GameScript& script) : sim_(std::move(config), script) {
    latest_ = sim_.snapshot();
    sim_.set_event_sink([this](const SimEvent& e) { publish(e); });
}

LiveSimulation::~LiveSimulation() { stop(); }

void LiveSimulation::start() {
    if (!thread_.joinable()) thread_ = std::thread(&LiveSimulation::loop, this);
}

void LiveSimulation::submit(const Command& command, Completion done) {
    {
        std::lock_guard lock(mutex_);
        if (!done_) {
            commands_.emplace_back(command, std::move(done));
            cv_.notify_all();
            return;
        }
    }
    if (done) done({false, "simulation has ended"});
}

int LiveSimulation::subscribe(Subscriber subscriber) {
    std::lock_guard lock(subscribers_mutex_);
    int id = next_subscriber_++;
    subscriber(latest_, true);
    subscribers_.emplace_back(id, std::move(subscriber));
    return id;
}

void LiveSimulation::unsubscribe(int id) {
    std::lock_guard lock(subscribers_mutex_);
    std::erase_if(subscribers_, [&](const auto& s) { return s.first == id; });
}

void LiveSimulation::publish(const SimEvent& event) {
    std::lock_guard lock(subscribers_mutex_);
    latest_ = event;
    for (auto& [id, sub] : subscribers_) sub(event, false);
}

void LiveSimulation::loop() {
    using Clock = std::chrono::steady_clock;
    auto wall_anchor = Clock::now();
    double sim_anchor = 0;
    bool was_idle = true;

    for (;;) {
        std::deque<std::pair<Command, Completion>> batch;
        {
            std::lock_guard lock(mutex_);
            if (stop_) break;
            batch.swap(commands_);
        }
        for (auto& [command, done] : batch) {
            CommandResult result;
            try {
                sim_.control(command);
            } catch (const EngineError& e) {
                result = {false, e.what()};
            }
            if (done) done(result);
            if (result.ok) sim_.emit_state();
        }
        if (sim_.finished()) break;

        if (sim_.idle()) {
            std::unique_lock lock(mutex_);
            cv_.wait(lock, [&] { return stop_ || !commands_.empty(); });
            was_idle = true;
            continue;
        }
        if (was_idle) {
            wall_anchor = Clock::now();
            sim_anchor = sim_.sim_time();
            was_idle = false;
        }

        try {
            sim_.tick();
        } catch (const EngineError& e) {
            std::lock_guard lock(mutex_);
            failure_ = e.what();
            failure_code_ = e.code();
            break;
        } catch (const std::exception& e) {
            std::lock_guard lock(mutex_);
            failure_ = e.what();
            break;
        }

        if (sim_.config().realtime) {
            auto ahead = std::chrono::duration<double>(sim_.sim_time() - sim_anchor);
            std::this_thread::sleep_until(wall_anchor + std::chrono::duration_cast<Clock::duration>(ahead));
        }
    }

    GameReport report = sim_.report();
    std::deque<std::pair<Command, Completion>> leftover;
    {
        std::lock_guard lock(mutex_);
        report_ = std::move(report);
        done_ = true;
        leftover.swap(commands_);
    }
    cv_.notify_all();
    for (auto& [command, done] : leftover)
        if (done) done({false, "simulation has ended"});
}

void LiveSimulation::wait() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return done_; });
}

void LiveSimulation::stop() {
    {
        std::lock_guard lock(mutex_);
        stop_ = true;
    }
    cv_.notify_all();
    if (thread_.joinable()) thread_.join();
}

bool LiveSimulation::done() const {
    std::lock_guard lock(mutex_);
    return done_;
}

GameReport LiveSimulation::report() const {
    std::lock_guard lock(mutex_);
    if (!report_) throw std::logic_error("report requested before the game ended");
    return *report_;
}

std::optional<std::string> LiveSimulation::failure() const {
    std::lock_guard lock(mutex_);
    return failure_;
}

std::optional<EngineErrc> LiveSimulation::failure_code() const {
    std::lock_guard lock(mutex_);
    return failure_code_;
}

}  // namespace robochess
