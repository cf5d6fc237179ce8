#pragma once

#include <stdexcept>
#include <string>

namespace bmo {

/// A caller broke an operation's contract (negative argument, empty region, ...).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A decomposition engine was called outside its stated precondition.
/// The message spells out the violated inequality.
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The concave minorant could not be built within the probe horizon.
class MinorantError : public std::runtime_error {
public:
    MinorantError(const std::string& what, std::size_t level)
        : std::runtime_error(what), level_(level) {}
    std::size_t missing_level() const { return level_; }

private:
    std::size_t level_;
};

/// Malformed input file or inline data.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bmo
