#pragma once

#include <stdexcept>
#include <string>

namespace pairlearn {

// Caller broke an API contract (shape mismatch, misaligned structures, bad call order).
class ContractError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numeric input outside an operation's documented domain (e.g. non-finite logits).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid or mutually inconsistent user configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed file content (datasets, checkpoints, configs on disk).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pairlearn
