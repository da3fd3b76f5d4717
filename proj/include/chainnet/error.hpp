#pragma once

#include <stdexcept>
#include <string>

namespace chainnet {

// Error categories aligned with the CLI exit codes:
// 0 success, 1 config, 2 I/O, 3 data validation.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace chainnet
