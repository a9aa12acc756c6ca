#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace spot {

enum class Errc {
    invalid_fov,
    degenerate_fov,
    unreachable,
    too_few_samples,
    empty_text,
    incompatible_signatures,
    not_normalized,
    invalid_query,
    zero_speed,
    no_start_waypoint,
    overlap_unavoidable,
    route_inconsistent,
    bad_input,
    io_error,
};

/// Library-wide exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
public:
    Error(Errc code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, Errc code, const std::string& msg) {
    if (!cond) raise(code, msg);
}

} // namespace spot
