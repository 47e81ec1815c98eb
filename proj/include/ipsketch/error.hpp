#pragma once

#include <stdexcept>
#include <string>

namespace ipsketch {

/// Raised for every contract violation on user-supplied input: bad
/// dimensions, mismatched sketch parameters, malformed files. The CLI maps
/// it to exit code 2.
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

namespace detail {

[[noreturn]] inline void fail(const std::string& what) { throw InvalidInput(what); }

inline void require(bool cond, const char* what) {
    if (!cond) fail(what);
}

} // namespace detail
} // namespace ipsketch
