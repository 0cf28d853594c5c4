// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the reswd project.

#pragma once

#include <stdexcept>
#include <string>

namespace reswd {

enum class ErrorKind {
    InvalidArgument,
    Config,
    Input,    // missing, unreadable or malformed input (files, documents)
    Output,   // output cannot be written
    Numeric,  // non-finite values during optimization
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) { throw Error(kind, what); }

inline void require(bool cond, const std::string &what) {
    if (!cond)
        fail(ErrorKind::InvalidArgument, what);
}

}  // namespace reswd
