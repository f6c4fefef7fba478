#pragma once

#include <stdexcept>
#include <string>

namespace npplab {

// Thrown when an enumeration/solver guard would be exceeded. The CLI maps
// this to exit code 3; --force raises the guard instead.
class resource_limit_error : public std::runtime_error {
public:
    explicit resource_limit_error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline void require_guard(bool cond, const std::string& msg) {
    if (!cond) throw resource_limit_error(msg);
}

}  // namespace npplab
