#pragma once

#include <stdexcept>
#include <string>

namespace vmstain {

/// Invalid pixel or parameter values (out of range, non-finite).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Violated API precondition (dimension mismatch, out-of-bounds origin,
/// missing or duplicate lattice positions).
class ContractError : public std::runtime_error {
public:
    explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid grid or job configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// External backend failure (process, framing, or protocol violation).
class BackendError : public std::runtime_error {
public:
    explicit BackendError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File read/write failure.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace vmstain
