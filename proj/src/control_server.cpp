#include "robochess/control_server.hpp"

#include <fmt/format.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

namespace robochess {

namespace {

bool send_all(int fd, std::string_view data) {
    while (!data.empty()) {
        ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return false;
        data.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
}

}  // namespace

struct ControlServer::Client {
    enum class Role { None, Observer, Controller };

    explicit Client(int fd_, std::size_t capacity) : fd(fd_), queue(capacity) {}

    int fd;
    BoundedQueue<Outgoing> queue;
    std::thread reader_thread;
    std::thread writer_thread;
    std::mutex mutex;
    Role role = Role::None;
    std::optional<std::uint64_t> last_seq;
    std::optional<int> subscription;
};

ControlServer::ControlServer(LiveSimulation& live, const SimConfig& config, const std::string& address,
                             ServerOptions options)
    : live_(live), geometry_(geometry_to_json(config)), options_(options) {
    auto colon = address.rfind(':');
    if (colon == std::string::npos) throw ServerError(ServerErrc::BadAddress, fmt::format("'{}' is not host:port", address));
    host_ = address.substr(0, colon);
    std::string_view port_text = std::string_view(address).substr(colon + 1);
    unsigned port = 0;
    auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port > 65535)
        throw ServerError(ServerErrc::BadAddress, fmt::format("bad port in '{}'", address));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (host_.empty() || host_ == "localhost") host_ = "127.0.0.1";
    if (host_ == "*") host_ = "0.0.0.0";
    if (::inet_pton(AF_INET, host_.c_str(), &addr.sin_addr) != 1)
        throw ServerError(ServerErrc::BadAddress, fmt::format("bad IPv4 host in '{}'", address));

    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw ServerError(ServerErrc::BindFailure, std::strerror(errno));
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 16) < 0) {
        std::string why = std::strerror(errno);
        ::close(listen_fd_);
        throw ServerError(ServerErrc::BindFailure, fmt::format("cannot bind {}: {}", address, why));
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

ControlServer::~ControlServer() {
    stopping_ = true;
    if (accept_thread_.joinable()) accept_thread_.join();
    std::vector<std::shared_ptr<Client>> clients;
    {
        std::lock_guard lock(clients_mutex_);
        clients = clients_;
    }
    for (auto& c : clients) {
        std::optional<int> subscription;
        {
            std::lock_guard lock(c->mutex);
            subscription = std::exchange(c->subscription, std::nullopt);
        }
        if (subscription) live_.unsubscribe(*subscription);
        c->queue.close();
    }
    for (auto& c : clients) {
        if (c->writer_thread.joinable()) c->writer_thread.join();
        if (c->reader_thread.joinable()) c->reader_thread.join();
        ::close(c->fd);
    }
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

std::string ControlServer::address() const { return fmt::format("{}:{}", host_, port_); }

std::size_t ControlServer::client_count() const {
    std::lock_guard lock(clients_mutex_);
    return clients_.size();
}

void ControlServer::start() {
    if (!accept_thread_.joinable()) accept_thread_ = std::thread(&ControlServer::accept_loop, this);
}

void ControlServer::accept_loop() {
    while (!stopping_) {
        pollfd pfd{listen_fd_, POLLIN, 0};
        if (::poll(&pfd, 1, 50) <= 0) continue;
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) continue;
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        auto client = std::make_shared<Client>(fd, options_.queue_capacity);
        {
            std::lock_guard lock(clients_mutex_);
            if (stopping_) {
                ::close(fd);
                break;
            }
            clients_.push_back(client);
        }
        client->writer_thread = std::thread([this, client] { writer(client); });
        client->reader_thread = std::thread([this, client] { reader(client); });
    }
}

void ControlServer::writer(const std::shared_ptr<Client>& client) {
    std::uint64_t seq = 0;
    for (;;) {
        auto item = client->queue.pop(std::chrono::milliseconds(50));
        if (!item) {
            if (client->queue.closed_and_empty()) break;
            continue;
        }
        if (!send_all(client->fd, encode(WireMessage{item->kind, seq++, std::move(item->payload)}))) {
            client->queue.close();
            break;
        }
    }
    ::shutdown(client->fd, SHUT_RDWR);
}

void ControlServer::reader(const std::shared_ptr<Client>& client) {
    LineBuffer buffer;
    char chunk[4096];
    for (;;) {
        ssize_t n = ::recv(client->fd, chunk, sizeof chunk, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) break;
        try {
            buffer.append(std::string_view(chunk, static_cast<std::size_t>(n)));
            while (auto line = buffer.next_line()) {
                WireMessage message;
                try {
                    message = decode(*line);
                } catch (const FrameError& e) {
                    if (e.code() == FrameErrc::Oversized) throw;
                    send_error(*client, std::nullopt, wire_error::kFrame, e.what());
                    continue;
                }
                handle(client, message);
            }
        } catch (const FrameError& e) {
            send_error(*client, std::nullopt, wire_error::kFrame, e.what());
            break;
        }
    }
    disconnect(*client);
}

void ControlServer::send_error(Client& client, std::optional<std::uint64_t> ref, std::string_view code,
                               const std::string& message) {
    nlohmann::json payload = {{"ref", ref ? nlohmann::json(*ref) : nlohmann::json(nullptr)},
                              {"code", code},
                              {"message", message}};
    client.queue.push(Outgoing{WireKind::Error, std::move(payload)}, false);
}

void ControlServer::disconnect(Client& client) {
    std::optional<int> subscription;
    {
        std::lock_guard lock(client.mutex);
        subscription = std::exchange(client.subscription, std::nullopt);
    }
    if (subscription) live_.unsubscribe(*subscription);
    {
        std::lock_guard lock(clients_mutex_);
        if (controller_.get() == &client) controller_.reset();
    }
    client.queue.close();
}

void ControlServer::handle(const std::shared_ptr<Client>& client, const WireMessage& message) {
    if (message.kind != WireKind::Command) {
        send_error(*client, message.seq, wire_error::kBadCommand,
                   fmt::format("clients send commands, not {}", to_string(message.kind)));
        return;
    }
    {
        std::lock_guard lock(client->mutex);
        if (client->last_seq && message.seq <= *client->last_seq) {
            send_error(*client, message.seq, wire_error::kSequence,
                       fmt::format("seq {} does not follow {}", message.seq, *client->last_seq));
            return;
        }
        client->last_seq = message.seq;
    }

    WireCommand wc;
    try {
        wc = command_from_json(message.payload);
    } catch (const std::exception& e) {
        send_error(*client, message.seq, wire_error::kBadCommand, e.what());
        return;
    }
    auto ack = [ref = message.seq, command = message.payload] {
        return Outgoing{WireKind::Ack, {{"ref", ref}, {"command", command}}};
    };

    if (wc.kind == WireCommand::Kind::Join) {
        if (client->role != Client::Role::None) {
            send_error(*client, message.seq, wire_error::kBadCommand, "already joined");
            return;
        }
        if (wc.controller) {
            std::lock_guard lock(clients_mutex_);
            if (controller_) {
                send_error(*client, message.seq, wire_error::kSecondController, "a controller is already connected");
                client->queue.close();
                return;
            }
            controller_ = client;
        }
        {
            std::lock_guard lock(client->mutex);
            client->role = wc.controller ? Client::Role::Controller : Client::Role::Observer;
        }
        client->queue.push(ack(), false);
        std::weak_ptr<Client> weak = client;
        int id = live_.subscribe([this, weak](const SimEvent& event, bool late_join) {
            auto c = weak.lock();
            if (!c) return;
            bool droppable = !late_join && !event.last_metrics && !event.finished;
            c->queue.push(Outgoing{WireKind::Event, event_to_json(event, late_join ? &geometry_ : nullptr)},
                          droppable);
        });
        std::lock_guard lock(client->mutex);
        client->subscription = id;
        return;
    }

    if (client->role == Client::Role::None) {
        send_error(*client, message.seq, wire_error::kNotJoined, "send Join first");
        return;
    }
    if (client->role != Client::Role::Controller) {
        send_error(*client, message.seq, wire_error::kNotController, "observers cannot send commands");
        return;
    }
    std::weak_ptr<Client> weak = client;
    live_.submit(wc.command, [this, weak, ack, ref = message.seq](const CommandResult& result) {
        auto c = weak.lock();
        if (!c) return;
        if (result.ok) c->queue.push(ack(), false);
        else send_error(*c, ref, wire_error::kInvalidCommand, result.error);
    });
}

void ControlServer::shutdown(const GameReport& report) {
    stopping_ = true;
    if (accept_thread_.joinable()) accept_thread_.join();
    std::vector<std::shared_ptr<Client>> clients;
    {
        std::lock_guard lock(clients_mutex_);
        clients = clients_;
    }
    nlohmann::json final_report = {{"final_report", to_json(report)}};
    for (auto& c : clients) {
        std::optional<int> subscription;
        bool joined = false;
        {
            std::lock_guard lock(c->mutex);
            subscription = std::exchange(c->subscription, std::nullopt);
            joined = c->role != Client::Role::None;
        }
        if (subscription) live_.unsubscribe(*subscription);
        if (joined) c->queue.push(Outgoing{WireKind::Event, final_report}, false);
        c->queue.close();
    }
    for (auto& c : clients) {
        if (c->writer_thread.joinable()) c->writer_thread.join();
        if (c->reader_thread.joinable()) c->reader_thread.join();
    }
}

}  // namespace robochess
