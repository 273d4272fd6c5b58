#include "robochess/wire.hpp"

#include <fmt/format.h>

namespace robochess {

using nlohmann::json;

namespace {

json point_json(const Point3& p) { return json::array({p.x, p.y, p.z}); }
json joints_json(const JointAngles& q) { return json::array({q.yaw, q.shoulder, q.elbow}); }

std::string_view location_name(Workspace::Location loc) {
    switch (loc) {
        case Workspace::Location::Board: return "board";
        case Workspace::Location::Discard: return "discard";
        case Workspace::Location::Held: return "held";
    }
    return "?";
}

std::optional<ArmId> parse_arm(std::string_view s) {
    if (s == "white" || s == "MR1") return ArmId::MR1;
    if (s == "black" || s == "MR2") return ArmId::MR2;
    return std::nullopt;
}

}  // namespace

std::string_view to_string(WireKind kind) {
    switch (kind) {
        case WireKind::Event: return "event";
        case WireKind::Command: return "command";
        case WireKind::Ack: return "ack";
        case WireKind::Error: return "error";
    }
    return "?";
}

std::string encode(const WireMessage& message) {
    json doc = {{"kind", to_string(message.kind)}, {"seq", message.seq}, {"payload", message.payload}};
    std::string line = doc.dump();
    line += '\n';
    return line;
}

WireMessage decode(std::string_view line) {
    if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
    if (line.size() > kMaxLineBytes)
        throw FrameError(FrameErrc::Oversized, fmt::format("line of {} bytes exceeds {}", line.size(), kMaxLineBytes));
    json doc = json::parse(line.begin(), line.end(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw FrameError(FrameErrc::Malformed, "line is not a JSON object");
    auto kind = doc.find("kind");
    auto seq = doc.find("seq");
    if (kind == doc.end() || !kind->is_string()) throw FrameError(FrameErrc::Malformed, "missing string field 'kind'");
    if (seq == doc.end() || !seq->is_number_unsigned())
        throw FrameError(FrameErrc::Malformed, "missing non-negative integer field 'seq'");

    WireMessage m;
    const auto& k = kind->get_ref<const std::string&>();
    if (k == "event") m.kind = WireKind::Event;
    else if (k == "command") m.kind = WireKind::Command;
    else if (k == "ack") m.kind = WireKind::Ack;
    else if (k == "error") m.kind = WireKind::Error;
    else throw FrameError(FrameErrc::UnknownKind, fmt::format("unknown message kind '{}'", k));
    m.seq = seq->get<std::uint64_t>();
    if (auto p = doc.find("payload"); p != doc.end()) m.payload = *p;
    return m;
}

void LineBuffer::append(std::string_view bytes) {
    buffer_.append(bytes);
    if (buffer_.size() > kMaxLineBytes && buffer_.find('\n') == std::string::npos)
        throw FrameError(FrameErrc::Oversized, fmt::format("line exceeds {} bytes", kMaxLineBytes));
}

std::optional<std::string> LineBuffer::next_line() {
    auto nl = buffer_.find('\n');
    if (nl == std::string::npos) return std::nullopt;
    std::string line = buffer_.substr(0, nl);
    buffer_.erase(0, nl + 1);
    if (line.size() > kMaxLineBytes)
        throw FrameError(FrameErrc::Oversized, fmt::format("line exceeds {} bytes", kMaxLineBytes));
    return line;
}

json command_to_json(const Command& command) {
    json out = {{"type", to_string(command.type)}};
    if (command.type == Command::Type::SetSpeed) {
        out["arm"] = command.arm == ArmId::MR1 ? "white" : "black";
        out["speed"] = command.speed;
    } else if (command.type == Command::Type::SetMode) {
        out["mode"] = to_string(command.mode);
    }
    return out;
}

json join_to_json(bool controller) { return {{"type", "Join"}, {"role", controller ? "controller" : "observer"}}; }

WireCommand command_from_json(const json& payload) {
    auto bad = [](std::string msg) { throw std::invalid_argument(std::move(msg)); };
    if (!payload.is_object() || !payload.contains("type") || !payload["type"].is_string())
        bad("command payload needs a string 'type'");
    const auto type = payload["type"].get<std::string>();
    WireCommand wc;
    if (type == "Join") {
        wc.kind = WireCommand::Kind::Join;
        auto role = payload.value("role", std::string{});
        if (role != "controller" && role != "observer") bad("Join role must be 'controller' or 'observer'");
        wc.controller = role == "controller";
    } else if (type == "Start") {
        wc.command = Command::start();
    } else if (type == "StepOne") {
        wc.command = Command::step_one();
    } else if (type == "Abort") {
        wc.command = Command::abort();
    } else if (type == "SetSpeed") {
        auto arm = parse_arm(payload.value("arm", std::string{}));
        if (!arm) bad("SetSpeed arm must be 'white' or 'black'");
        if (!payload.contains("speed") || !payload["speed"].is_number()) bad("SetSpeed needs a numeric 'speed'");
        wc.command = Command::set_speed(*arm, payload["speed"].get<double>());
    } else if (type == "SetMode") {
        auto mode = parse_mode(payload.value("mode", std::string{}));
        if (!mode) bad("SetMode mode must be 'step', 'auto' or 'virtual'");
        wc.command = Command::set_mode(*mode);
    } else {
        bad(fmt::format("unknown command type '{}'", type));
    }
    return wc;
}

json metrics_to_json(const MoveMetrics& m) {
    return {{"half_move", m.half_move},
            {"arm_id", to_string(m.arm_id)},
            {"move_index", m.move_index},
            {"duration", m.duration},
            {"path_length", m.path_length}};
}

json geometry_to_json(const SimConfig& config) {
    json arms = json::array();
    for (ArmId id : {ArmId::MR1, ArmId::MR2}) {
        const auto& g = config.arm(id);
        json limits = json::array();
        for (const auto& r : g.joint_limits) limits.push_back({r.min, r.max});
        arms.push_back({{"arm", to_string(id)},
                        {"base", point_json(g.base)},
                        {"heading", g.heading},
                        {"mount_height", g.mount_height},
                        {"l1", g.l1},
                        {"l2", g.l2},
                        {"joint_speed", g.joint_speed},
                        {"joint_limits", limits},
                        {"home", joints_json(config.home(id))}});
    }
    return {{"arms", arms},
            {"board",
             {{"origin", point_json(config.layout.origin)},
              {"square_size", config.layout.square_size},
              {"grip_height", config.layout.grip_height}}}};
}

json event_to_json(const SimEvent& event, const json* geometry) {
    json arms = json::array();
    for (ArmId id : {ArmId::MR1, ArmId::MR2}) {
        const auto& a = event.arms[id == ArmId::MR1 ? 0 : 1];
        arms.push_back({{"arm", to_string(id)},
                        {"joints", joints_json(a.joints)},
                        {"gripper", point_json(a.gripper)},
                        {"held_piece", a.held_piece ? json(*a.held_piece) : json(nullptr)},
                        {"motion_phase", a.motion_phase ? json(to_string(*a.motion_phase)) : json(nullptr)}});
    }
    json pieces = json::array();
    for (const auto& p : event.pieces) {
        pieces.push_back({{"id", p.id},
                          {"color", to_string(p.piece.color)},
                          {"kind", to_string(p.piece.kind)},
                          {"position", point_json(p.position)},
                          {"location", location_name(p.location)},
                          {"square", p.square ? json(p.square->name()) : json(nullptr)}});
    }
    json out = {{"event_seq", event.event_seq},
                {"sim_time", event.sim_time},
                {"snapshot", geometry != nullptr},
                {"phase", to_string(event.phase)},
                {"half_move", event.half_move},
                {"mode", to_string(event.mode)},
                {"speeds", {{"white", event.speeds[0]}, {"black", event.speeds[1]}}},
                {"awaiting_step", event.awaiting_step},
                {"finished", event.finished},
                {"aborted", event.aborted},
                {"arms", arms},
                {"pieces", pieces},
                {"metrics", event.last_metrics ? metrics_to_json(*event.last_metrics) : json(nullptr)}};
    if (geometry) out["geometry"] = *geometry;
    return out;
}

}  // namespace robochess
