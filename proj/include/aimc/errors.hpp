#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace aimc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid generation config. `field()` names the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error("config field '" + field + "': " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class SynthesisError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// Container read/write failures. Each failure mode has its own kind so
/// callers (and the verify CLI) can report it precisely.
class ContainerError : public Error {
public:
    enum class Kind { io, format, version, checksum, truncated, invalid };

    ContainerError(Kind kind, const std::string& what, std::optional<std::uint32_t> pulse = std::nullopt)
        : Error(what), kind_(kind), pulse_(pulse) {}

    Kind kind() const noexcept { return kind_; }
    std::optional<std::uint32_t> pulse_index() const noexcept { return pulse_; }

private:
    Kind kind_;
    std::optional<std::uint32_t> pulse_;
};

inline const char* to_string(ContainerError::Kind kind) noexcept {
    switch (kind) {
        case ContainerError::Kind::io: return "io";
        case ContainerError::Kind::format: return "format";
        case ContainerError::Kind::version: return "version";
        case ContainerError::Kind::checksum: return "checksum";
        case ContainerError::Kind::truncated: return "truncated";
        case ContainerError::Kind::invalid: return "invalid";
    }
    return "unknown";
}

}  // namespace aimc
