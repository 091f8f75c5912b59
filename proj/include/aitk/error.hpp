#pragma once

#include <stdexcept>
#include <string>

namespace aitk {

// Mirrors aitk_status in aitk.h; values are part of the C ABI.
enum class ErrorCode : int {
    invalid_argument = 1,
    parse = 2,
    composition = 3,
    io = 4,
    numeric = 5,
    not_converged = 6,
    config = 7,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t position, const std::string& what)
        : Error(ErrorCode::parse, what + " at position " + std::to_string(position)),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

inline Error invalid_argument(const std::string& what) {
    return Error(ErrorCode::invalid_argument, what);
}

inline Error config_error(const std::string& what) {
    return Error(ErrorCode::config, what);
}

}  // namespace aitk
