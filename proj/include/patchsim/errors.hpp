#pragma once

#include <stdexcept>
#include <string>

namespace patchsim {

/// Malformed or inconsistent input data. Carries file/line/field context
/// when the failure came from a dataset file.
class DataError : public std::runtime_error {
public:
    enum class Kind {
        Malformed,
        BeforeEpoch,
        AfterHorizon,
        DuplicateKey,
        DanglingReference,
        Configuration,
    };

    DataError(Kind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller broke an operation's precondition (dimension mismatch, bad counts,
/// transform applied twice, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace patchsim
