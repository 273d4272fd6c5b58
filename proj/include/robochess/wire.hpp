#pragma once

// Newline-delimited JSON messages exchanged with the control server.

#include "robochess/engine.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace robochess {

enum class WireKind { Event, Command, Ack, Error };
std::string_view to_string(WireKind kind);  // "event", "command", "ack", "error"

struct WireMessage {
    WireKind kind = WireKind::Event;
    std::uint64_t seq = 0;
    nlohmann::json payload = nlohmann::json::object();

    friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

inline constexpr std::size_t kMaxLineBytes = 1u << 20;

enum class FrameErrc { Oversized, Malformed, UnknownKind };

class FrameError : public std::runtime_error {
public:
    FrameError(FrameErrc code, std::string message) : std::runtime_error(std::move(message)), code_(code) {}
    FrameErrc code() const { return code_; }

private:
    FrameErrc code_;
};

// One line including the trailing '\n'.
std::string encode(const WireMessage& message);
// Accepts a line with or without its '\n'.
WireMessage decode(std::string_view line);

// Splits a byte stream into lines, enforcing kMaxLineBytes.
class LineBuffer {
public:
    void append(std::string_view bytes);
    std::optional<std::string> next_line();

private:
    std::string buffer_;
};

// Command payloads. Join selects the client's role and must come first.
struct WireCommand {
    enum class Kind { Join, Engine };
    Kind kind = Kind::Engine;
    bool controller = false;  // Join
    Command command{};        // Engine
};

nlohmann::json command_to_json(const Command& command);
nlohmann::json join_to_json(bool controller);
// Throws std::invalid_argument describing what is wrong with the payload.
WireCommand command_from_json(const nlohmann::json& payload);

nlohmann::json metrics_to_json(const MoveMetrics& m);
nlohmann::json geometry_to_json(const SimConfig& config);
// Late-join snapshots also carry the geometry needed to draw the scene.
nlohmann::json event_to_json(const SimEvent& event, const nlohmann::json* geometry = nullptr);

}  // namespace robochess
