#include "cmsbm/error.hpp"

namespace cmsbm {

std::string_view error_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::InfeasibleSize: return "InfeasibleSize";
    case ErrorKind::PartitionBudgetExceeded: return "PartitionBudgetExceeded";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::MissingTruth: return "MissingTruth";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::DominanceViolated: return "DominanceViolated";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

std::string_view error_remedy(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidParams: return "check the parameter file against the documented ranges";
    case ErrorKind::IndexOutOfRange: return "layer index must be below the number of layers";
    case ErrorKind::BudgetExceeded: return "lower aleph or n, switch to the transfer backend, or raise --budget";
    case ErrorKind::InfeasibleSize: return "need n >= 2*aleph and p >= aleph";
    case ErrorKind::PartitionBudgetExceeded: return "the transfer backend supports aleph <= 6";
    case ErrorKind::NoConvergence: return "raise --max-iters or loosen --tol";
    case ErrorKind::Infeasible: return "the correlation floor must lie in [0, 1]";
    case ErrorKind::MissingTruth: return "metrics need an observation sampled with its latent state";
    case ErrorKind::SchemaMismatch: return "input does not follow the expected file layout";
    case ErrorKind::DominanceViolated: return "a Bernoulli moment exceeded its Gaussian counterpart";
    case ErrorKind::Io: return "check that the path exists and is writable";
    }
    return "";
}

}  // namespace cmsbm
