#include "tls/wire.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

namespace tls {

namespace {

void send_all(int fd, const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
        const ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
        if (n <= 0) throw ConfigError("socket send failed");
        off += static_cast<std::size_t>(n);
    }
}

}  // namespace

WireServer::WireServer(ControlApi& api, const std::string& host, std::uint16_t port)
    : api_(api), host_(host), port_(port) {}

WireServer::~WireServer() { stop(); }

void WireServer::start() {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw ConfigError("cannot create socket");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port_);
    if (::inet_pton(AF_INET, host_.c_str(), &addr.sin_addr) != 1)
        throw ConfigError("invalid listen host: " + host_);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
        throw ConfigError("cannot bind " + host_ + ":" + std::to_string(port_));
    if (::listen(listen_fd_, 8) != 0) throw ConfigError("cannot listen");
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    running_ = true;
    accept_thread_ = std::thread([this] { accept_loop(); });
}

void WireServer::accept_loop() {
    while (running_) {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) break;
        bool controlling = false;
        {
            std::lock_guard<std::mutex> lock(mu_);
            if (!controlling_taken_) {
                controlling_taken_ = true;
                controlling = true;
            }
            session_fds_.push_back(fd);
            sessions_.emplace_back([this, fd, controlling] { session_loop(fd, controlling); });
        }
    }
}

void WireServer::session_loop(int fd, bool controlling) {
    std::string buffer;
    char chunk[4096];
    while (running_) {
        const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
        if (n <= 0) break;
        buffer.append(chunk, static_cast<std::size_t>(n));
        std::size_t pos;
        while ((pos = buffer.find('\n')) != std::string::npos) {
            std::string line = buffer.substr(0, pos);
            buffer.erase(0, pos + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            try {
                send_all(fd, api_.execute_line(line, controlling) + "\n");
            } catch (const ConfigError&) {
                goto done;  // peer went away mid-response
            }
        }
    }
done:
    ::close(fd);
    if (controlling) {
        std::lock_guard<std::mutex> lock(mu_);
        controlling_closed_ = true;
        cv_.notify_all();
    }
}

void WireServer::stop() {
    if (!running_.exchange(false)) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    if (accept_thread_.joinable()) accept_thread_.join();
    std::vector<std::thread> sessions;
    {
        std::lock_guard<std::mutex> lock(mu_);
        for (int fd : session_fds_) ::shutdown(fd, SHUT_RDWR);
        session_fds_.clear();
        sessions.swap(sessions_);
    }
    for (auto& t : sessions)
        if (t.joinable()) t.join();
}

void WireServer::wait_controlling_closed() {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [this] { return controlling_closed_; });
}

WireClient::WireClient(const std::string& host, std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw ConfigError("cannot create socket");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
        throw ConfigError("invalid host: " + host);
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
        throw ConfigError("cannot connect to " + host + ":" + std::to_string(port));
}

WireClient::~WireClient() { close(); }

void WireClient::send_raw(const std::string& bytes) { send_all(fd_, bytes); }

std::string WireClient::read_line() {
    char chunk[4096];
    while (true) {
        const std::size_t pos = buffer_.find('\n');
        if (pos != std::string::npos) {
            std::string line = buffer_.substr(0, pos);
            buffer_.erase(0, pos + 1);
            return line;
        }
        const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
        if (n <= 0) throw ConfigError("connection closed");
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

std::string WireClient::request(const std::string& line) {
    send_raw(line + "\n");
    return read_line();
}

void WireClient::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

}  // namespace tls
