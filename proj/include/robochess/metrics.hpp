#pragma once

// Per-move metric accumulation and the game-level indicators: mean move time
// per arm and the Pearson correlation of the two arms' move-time series.

#include "robochess/move_metrics.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace robochess {

enum class MetricsErrc { DuplicateIndex, ZeroVariance, LengthMismatch, EmptyGame };

class MetricsError : public std::runtime_error {
public:
    MetricsError(MetricsErrc code, std::string message) : std::runtime_error(std::move(message)), code_(code) {}
    MetricsErrc code() const { return code_; }

private:
    MetricsErrc code_;
};

inline constexpr std::string_view kFewerThanTwoPairs = "fewer than 2 pairs";
inline constexpr std::string_view kZeroVariance = "zero variance";

struct GameReport {
    std::vector<MoveMetrics> per_move;  // ordered by half_move
    std::optional<double> mean_white;   // empty when the arm made no move
    std::optional<double> mean_black;
    std::optional<double> r12;
    std::optional<std::string> r12_reason;  // set exactly when r12 is empty
    double total_path_white = 0;
    double total_path_black = 0;

    friend bool operator==(const GameReport&, const GameReport&) = default;
};

// Sample Pearson correlation of equal-length series (length >= 2).
double pearson(std::span<const double> a, std::span<const double> b);

class MetricsRecorder {
public:
    void record(const MoveMetrics& m);

    const std::vector<MoveMetrics>& per_move() const { return per_move_; }
    std::optional<double> running_mean(ArmId arm) const;

    // Pairs the i-th white move with the i-th black move for r12.
    GameReport finalize() const;

private:
    std::vector<MoveMetrics> per_move_;
    std::array<int, 2> next_index_{};
    std::array<double, 2> duration_sum_{};
    std::array<double, 2> path_sum_{};
    std::array<int, 2> count_{};
};

// "half_move,arm,duration_s,path_m", six decimals.
std::string to_csv(const GameReport& report);
nlohmann::json to_json(const GameReport& report);
GameReport report_from_json(const nlohmann::json& doc);

}  // namespace robochess
