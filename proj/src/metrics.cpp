#include "robochess/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace robochess {

namespace {

int slot(ArmId arm) { return arm == ArmId::MR1 ? 0 : 1; }

bool constant(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw MetricsError(MetricsErrc::LengthMismatch,
                           fmt::format("series lengths differ ({} vs {})", a.size(), b.size()));
    if (a.size() < 2) throw MetricsError(MetricsErrc::LengthMismatch, "need at least 2 pairs");
    if (constant(a) || constant(b)) throw MetricsError(MetricsErrc::ZeroVariance, "series has zero variance");

    const double n = static_cast<double>(a.size());
    double mean_a = 0, mean_b = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= n;
    mean_b /= n;

    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double da = a[i] - mean_a, db = b[i] - mean_b;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

void MetricsRecorder::record(const MoveMetrics& m) {
    int s = slot(m.arm_id);
    if (m.move_index != next_index_[s])
        throw MetricsError(MetricsErrc::DuplicateIndex,
                           fmt::format("{} move index {} recorded out of order (expected {})", to_string(m.arm_id),
                                       m.move_index, next_index_[s]));
    per_move_.push_back(m);
    ++next_index_[s];
    ++count_[s];
    duration_sum_[s] += m.duration;
    path_sum_[s] += m.path_length;
}

std::optional<double> MetricsRecorder::running_mean(ArmId arm) const {
    int s = slot(arm);
    if (count_[s] == 0) return std::nullopt;
    return duration_sum_[s] / count_[s];
}

GameReport MetricsRecorder::finalize() const {
    if (per_move_.empty()) throw MetricsError(MetricsErrc::EmptyGame, "no moves recorded");
    GameReport report;
    report.per_move = per_move_;
    std::stable_sort(report.per_move.begin(), report.per_move.end(),
                     [](const MoveMetrics& x, const MoveMetrics& y) { return x.half_move < y.half_move; });
    report.mean_white = running_mean(ArmId::MR1);
    report.mean_black = running_mean(ArmId::MR2);
    report.total_path_white = path_sum_[0];
    report.total_path_black = path_sum_[1];

    std::vector<double> white, black;
    for (const auto& m : report.per_move) (m.arm_id == ArmId::MR1 ? white : black).push_back(m.duration);
    std::size_t pairs = std::min(white.size(), black.size());
    if (pairs < 2) {
        report.r12_reason = std::string(kFewerThanTwoPairs);
        return report;
    }
    try {
        report.r12 = pearson(std::span(white).first(pairs), std::span(black).first(pairs));
    } catch (const MetricsError& e) {
        if (e.code() != MetricsErrc::ZeroVariance) throw;
        report.r12_reason = std::string(kZeroVariance);
    }
    return report;
}

std::string to_csv(const GameReport& report) {
    std::string out = "half_move,arm,duration_s,path_m\n";
    for (const auto& m : report.per_move)
        out += fmt::format("{},{},{:.6f},{:.6f}\n", m.half_move, to_string(m.arm_id), m.duration, m.path_length);
    return out;
}

nlohmann::json to_json(const GameReport& report) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    nlohmann::json moves = nlohmann::json::array();
    for (const auto& m : report.per_move) {
        moves.push_back({{"half_move", m.half_move},
                         {"arm_id", to_string(m.arm_id)},
                         {"move_index", m.move_index},
                         {"duration", m.duration},
                         {"path_length", m.path_length}});
    }
    return {{"per_move", moves},
            {"mean_white", opt(report.mean_white)},
            {"mean_black", opt(report.mean_black)},
            {"r12", opt(report.r12)},
            {"r12_reason", report.r12_reason ? nlohmann::json(*report.r12_reason) : nlohmann::json(nullptr)},
            {"total_path_white", report.total_path_white},
            {"total_path_black", report.total_path_black}};
}

GameReport report_from_json(const nlohmann::json& doc) {
    auto opt = [&](const char* key) -> std::optional<double> {
        const auto& v = doc.at(key);
        if (v.is_null()) return std::nullopt;
        return v.get<double>();
    };
    GameReport r;
    for (const auto& m : doc.at("per_move")) {
        r.per_move.push_back(MoveMetrics{m.at("duration").get<double>(), m.at("path_length").get<double>(),
                                         m.at("arm_id").get<std::string>() == "MR1" ? ArmId::MR1 : ArmId::MR2,
                                         m.at("move_index").get<int>(), m.at("half_move").get<int>()});
    }
    r.mean_white = opt("mean_white");
    r.mean_black = opt("mean_black");
    r.r12 = opt("r12");
    if (!doc.at("r12_reason").is_null()) r.r12_reason = doc.at("r12_reason").get<std::string>();
    r.total_path_white = doc.at("total_path_white").get<double>();
    r.total_path_black = doc.at("total_path_black").get<double>();
    return r;
}

}  // namespace robochess
