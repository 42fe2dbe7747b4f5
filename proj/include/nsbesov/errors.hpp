#pragma once

#include <stdexcept>
#include <string>

namespace nsbesov {

// Exit-code taxonomy used by the CLI:
//   2 precondition violation, 3 numerical failure, 4 I/O failure.

struct precondition_error : std::invalid_argument {
    explicit precondition_error(const std::string& what) : std::invalid_argument(what) {}
};

struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

struct io_error : std::runtime_error {
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nsbesov
