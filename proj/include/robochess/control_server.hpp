#pragma once

// TCP front end for a LiveSimulation. Clients join as the single controller
// or as observers; every command gets exactly one ack or error.

#include "robochess/bounded_queue.hpp"
#include "robochess/engine.hpp"
#include "robochess/wire.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace robochess {

enum class ServerErrc { BindFailure, BadAddress };

class ServerError : public std::runtime_error {
public:
    ServerError(ServerErrc code, std::string message) : std::runtime_error(std::move(message)), code_(code) {}
    ServerErrc code() const { return code_; }

private:
    ServerErrc code_;
};

// Error codes sent in error payloads.
namespace wire_error {
inline constexpr std::string_view kSecondController = "SecondController";
inline constexpr std::string_view kNotJoined = "NotJoined";
inline constexpr std::string_view kNotController = "NotController";
inline constexpr std::string_view kBadCommand = "BadCommand";
inline constexpr std::string_view kInvalidCommand = "InvalidCommand";
inline constexpr std::string_view kSequence = "SequenceViolation";
inline constexpr std::string_view kFrame = "FrameError";
}  // namespace wire_error

struct ServerOptions {
    std::size_t queue_capacity = 1024;  // per client; snapshot events beyond it are dropped
};

class ControlServer {
public:
    // Binds immediately. address is "host:port"; port 0 picks a free port.
    ControlServer(LiveSimulation& live, const SimConfig& config, const std::string& address,
                  ServerOptions options = {});
    ~ControlServer();
    ControlServer(const ControlServer&) = delete;
    ControlServer& operator=(const ControlServer&) = delete;

    void start();
    std::uint16_t port() const { return port_; }
    std::string address() const;

    // Sends the final report to every client, flushes their queues and
    // closes all connections.
    void shutdown(const GameReport& report);
    std::size_t client_count() const;

private:
    struct Client;
    struct Outgoing {
        WireKind kind;
        nlohmann::json payload;
    };

    void accept_loop();
    void reader(const std::shared_ptr<Client>& client);
    void writer(const std::shared_ptr<Client>& client);
    void handle(const std::shared_ptr<Client>& client, const WireMessage& message);
    void send_error(Client& client, std::optional<std::uint64_t> ref, std::string_view code,
                    const std::string& message);
    void disconnect(Client& client);

    LiveSimulation& live_;
    nlohmann::json geometry_;
    ServerOptions options_;
    std::string host_;
    std::uint16_t port_ = 0;
    int listen_fd_ = -1;
    std::atomic<bool> stopping_{false};
    std::thread accept_thread_;
    mutable std::mutex clients_mutex_;
    std::vector<std::shared_ptr<Client>> clients_;
    std::shared_ptr<Client> controller_;
};

}  // namespace robochess
