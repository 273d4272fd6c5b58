#include "robochess/engine.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace robochess {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

[[noreturn]] void parse_error(std::string message) {
    throw ConfigError(ConfigErrc::ParseError, {std::move(message)});
}

double to_double(std::string_view key, std::string_view value) {
    double out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        parse_error(fmt::format("{}: '{}' is not a number", key, value));
    return out;
}

bool to_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    parse_error(fmt::format("{}: '{}' is not a boolean", key, value));
}

int joint_index(std::string_view name) {
    if (name == "yaw") return 0;
    if (name == "shoulder") return 1;
    if (name == "elbow") return 2;
    return -1;
}

// Returns false when the key is not an arm key.
bool apply_arm_setting(ArmGeometry& arm, std::array<std::optional<double>, 3>& home, std::string_view key,
                       std::string_view full_key, std::string_view value) {
    auto num = [&] { return to_double(full_key, value); };
    if (key == "base.x") arm.base.x = num();
    else if (key == "base.y") arm.base.y = num();
    else if (key == "base.z") arm.base.z = num();
    else if (key == "heading") arm.heading = num();
    else if (key == "mount_height") arm.mount_height = num();
    else if (key == "l1") arm.l1 = num();
    else if (key == "l2") arm.l2 = num();
    else if (key.starts_with("omega.") && joint_index(key.substr(6)) >= 0)
        arm.joint_speed[static_cast<std::size_t>(joint_index(key.substr(6)))] = num();
    else if (key.starts_with("home.") && joint_index(key.substr(5)) >= 0)
        home[static_cast<std::size_t>(joint_index(key.substr(5)))] = num();
    else if (key.starts_with("limit.")) {
        auto rest = key.substr(6);
        auto dot = rest.find('.');
        if (dot == std::string_view::npos) return false;
        int j = joint_index(rest.substr(0, dot));
        auto bound = rest.substr(dot + 1);
        if (j < 0 || (bound != "min" && bound != "max")) return false;
        auto& range = arm.joint_limits[static_cast<std::size_t>(j)];
        (bound == "min" ? range.min : range.max) = num();
    } else {
        return false;
    }
    return true;
}

}  // namespace

ConfigError::ConfigError(ConfigErrc code, std::vector<std::string> problems)
    : std::runtime_error([&] {
          std::string msg = code == ConfigErrc::ParseError ? "config parse error" : "invalid config";
          for (const auto& p : problems) msg += "\n  " + p;
          return msg;
      }()),
      code_(code),
      problems_(std::move(problems)) {}

std::string_view to_string(SimMode mode) {
    switch (mode) {
        case SimMode::StepByStep: return "step";
        case SimMode::Autoplay: return "auto";
        case SimMode::Virtual: return "virtual";
    }
    return "?";
}

std::optional<SimMode> parse_mode(std::string_view text) {
    if (text == "step") return SimMode::StepByStep;
    if (text == "auto") return SimMode::Autoplay;
    if (text == "virtual") return SimMode::Virtual;
    return std::nullopt;
}

JointAngles SimConfig::home(ArmId id) const {
    const auto& geom = arm(id);
    JointAngles q = default_home_pose(geom, layout);
    const auto& overrides = id == ArmId::MR1 ? white_home : black_home;
    for (std::size_t j = 0; j < 3; ++j)
        if (overrides[j]) q[j] = *overrides[j];
    return q;
}

void SimConfig::validate() const {
    std::vector<std::string> problems;
    if (!(tick > 0)) problems.push_back(fmt::format("tick must be > 0 (got {})", tick));
    if (!(dwell >= 0)) problems.push_back(fmt::format("dwell must be >= 0 (got {})", dwell));
    if (!(metrics_dt > 0)) problems.push_back(fmt::format("metrics_dt must be > 0 (got {})", metrics_dt));
    if (!(speed_bounds.min > 0) || !(speed_bounds.min <= speed_bounds.max))
        problems.push_back(fmt::format("speed bounds [{}, {}] must satisfy 0 < min <= max", speed_bounds.min,
                                       speed_bounds.max));
    for (ArmId id : {ArmId::MR1, ArmId::MR2}) {
        auto side = id == ArmId::MR1 ? "white" : "black";
        if (!speed_bounds.contains(speed(id)))
            problems.push_back(fmt::format("speed.{} = {} outside [{}, {}]", side, speed(id), speed_bounds.min,
                                           speed_bounds.max));
        try {
            arm(id).validate();
            if (!arm(id).within_limits(home(id))) problems.push_back(fmt::format("{} home pose violates joint limits", side));
        } catch (const std::invalid_argument& e) {
            problems.push_back(fmt::format("{}: {}", side, e.what()));
        }
    }
    try {
        layout.validate();
    } catch (const std::invalid_argument& e) {
        problems.push_back(fmt::format("board: {}", e.what()));
    }
    if (!problems.empty()) throw ConfigError(ConfigErrc::ValidationError, std::move(problems));
}

void apply_setting(SimConfig& config, std::string_view key, std::string_view value) {
    auto num = [&] { return to_double(key, value); };
    if (key == "mode") {
        auto mode = parse_mode(value);
        if (!mode) parse_error(fmt::format("mode: '{}' is not one of step, auto, virtual", value));
        config.mode = *mode;
    } else if (key == "tick") {
        config.tick = num();
    } else if (key == "dwell") {
        config.dwell = num();
    } else if (key == "metrics_dt") {
        config.metrics_dt = num();
    } else if (key == "realtime") {
        config.realtime = to_bool(key, value);
    } else if (key == "game") {
        config.game_file = std::string(value);
    } else if (key == "speed.white") {
        config.white_speed = num();
    } else if (key == "speed.black") {
        config.black_speed = num();
    } else if (key == "speed.min") {
        config.speed_bounds.min = num();
    } else if (key == "speed.max") {
        config.speed_bounds.max = num();
    } else if (key.starts_with("board.")) {
        auto k = key.substr(6);
        if (k == "origin.x") config.layout.origin.x = num();
        else if (k == "origin.y") config.layout.origin.y = num();
        else if (k == "origin.z") config.layout.origin.z = num();
        else if (k == "square_size") config.layout.square_size = num();
        else if (k == "grip_height") config.layout.grip_height = num();
        else parse_error(fmt::format("unknown key '{}'", key));
        config.layout.rebuild_discard_zones();
    } else if (key.starts_with("white.")) {
        if (!apply_arm_setting(config.white_arm, config.white_home, key.substr(6), key, value))
            parse_error(fmt::format("unknown key '{}'", key));
    } else if (key.starts_with("black.")) {
        if (!apply_arm_setting(config.black_arm, config.black_home, key.substr(6), key, value))
            parse_error(fmt::format("unknown key '{}'", key));
    } else if (key.starts_with("arm.")) {
        if (!apply_arm_setting(config.white_arm, config.white_home, key.substr(4), key, value) ||
            !apply_arm_setting(config.black_arm, config.black_home, key.substr(4), key, value))
            parse_error(fmt::format("unknown key '{}'", key));
    } else {
        parse_error(fmt::format("unknown key '{}'", key));
    }
}

SimConfig parse_config(std::string_view text) {
    SimConfig config;
    std::size_t line_no = 0;
    std::vector<std::string> problems;
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
            problems.push_back(fmt::format("line {}: expected 'key = value'", line_no));
            continue;
        }
        try {
            apply_setting(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            for (const auto& p : e.problems()) problems.push_back(fmt::format("line {}: {}", line_no, p));
        }
    }
    if (!problems.empty()) throw ConfigError(ConfigErrc::ParseError, std::move(problems));
    config.validate();
    return config;
}

SimConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(ConfigErrc::ParseError, {fmt::format("cannot open '{}'", path.string())});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace robochess
