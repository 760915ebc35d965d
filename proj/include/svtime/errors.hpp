#ifndef SVTIME_ERRORS_HPP
#define SVTIME_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace svtime {

/// Bad configuration (CLI/config-file validation). Process exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
    static constexpr int exit_code = 2;
};

/// Bad or insufficient input data (CSV, splits, shapes). Process exit code 3.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
    static constexpr int exit_code = 3;
};

/// Numerical failure during training/inference (non-finite values). Exit code 4.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
    static constexpr int exit_code = 4;
};

} // namespace svtime

#endif // SVTIME_ERRORS_HPP
