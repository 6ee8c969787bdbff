#ifndef QMRI_ERRORS_HPP
#define QMRI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qmri {

// Error taxonomy maps onto CLI exit codes: usage 1, data 2, divergence 3.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& m) : std::runtime_error(m) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& m) : std::runtime_error(m) {}
};

struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace qmri

#endif
