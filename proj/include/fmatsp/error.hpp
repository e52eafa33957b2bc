#pragma once

#include <stdexcept>
#include <string>

namespace fmatsp {

/// Bad input: malformed route, wrong bit length, out-of-range value.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Request exceeds what an exact method can handle (memory or time).
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// FM training produced a non-finite loss.
class TrainingError : public std::runtime_error {
public:
    TrainingError(const std::string& what, int epoch)
        : std::runtime_error(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}

    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

}  // namespace fmatsp
