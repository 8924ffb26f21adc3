#ifndef TLS_WIRE_HPP
#define TLS_WIRE_HPP

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "tls/control.hpp"

namespace tls {

// Newline-delimited UTF-8 JSON over a stream socket, one Command/Response per
// line. The first session to connect is the controlling session (may issue
// SIM_STEP); later sessions are read-only observers.
class WireServer {
public:
    WireServer(ControlApi& api, const std::string& host, std::uint16_t port);
    ~WireServer();

    WireServer(const WireServer&) = delete;
    WireServer& operator=(const WireServer&) = delete;

    void start();
    void stop();

    std::uint16_t port() const { return port_; }

    // Blocks until the controlling session has connected and closed.
    void wait_controlling_closed();

private:
    void accept_loop();
    void session_loop(int fd, bool controlling);

    ControlApi& api_;
    std::string host_;
    std::uint16_t port_ = 0;
    int listen_fd_ = -1;
    std::atomic<bool> running_{false};
    bool controlling_taken_ = false;
    bool controlling_closed_ = false;
    std::thread accept_thread_;
    std::vector<std::thread> sessions_;
    std::vector<int> session_fds_;
    std::mutex mu_;
    std::condition_variable cv_;
};

// Minimal blocking line client for tests and tooling.
class WireClient {
public:
    WireClient(const std::string& host, std::uint16_t port);
    ~WireClient();

    WireClient(const WireClient&) = delete;
    WireClient& operator=(const WireClient&) = delete;

    // Sends one line (LF appended) and returns one response line.
    std::string request(const std::string& line);
    void send_raw(const std::string& bytes);
    std::string read_line();
    void close();

private:
    int fd_ = -1;
    std::string buffer_;
};

}  // namespace tls

#endif
