#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cmsbm {

enum class ErrorKind {
    InvalidParams,
    IndexOutOfRange,
    BudgetExceeded,
    InfeasibleSize,
    PartitionBudgetExceeded,
    NoConvergence,
    Infeasible,
    MissingTruth,
    SchemaMismatch,
    DominanceViolated,
    Io,
};

std::string_view error_name(ErrorKind kind);

// One-line hint printed by the CLI next to the error name.
std::string_view error_remedy(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace cmsbm
