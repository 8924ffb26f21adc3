#ifndef TLS_ERRORS_HPP
#define TLS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tls {

// Error taxonomy shared across the library. The wire layer maps these onto
// protocol error codes (STATE, PLAN_INVALID, UNKNOWN_ID, ...).

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct LookupError : std::runtime_error {
    explicit LookupError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RoutingError : std::runtime_error {
    explicit RoutingError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ContractError : std::logic_error {
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

struct IllegalActionError : std::runtime_error {
    explicit IllegalActionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct LifecycleError : std::runtime_error {
    explicit LifecycleError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tls

#endif
