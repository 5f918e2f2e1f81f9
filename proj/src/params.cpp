#include "cmsbm/params.hpp"

#include <cmath>
#include <string>

#include "cmsbm/error.hpp"

namespace cmsbm {

namespace {

[[noreturn]] void reject(const std::string& field, const std::string& why) {
    throw Error(ErrorKind::InvalidParams, field + ": " + why);
}

}  // namespace

void validate_params(const ModelParams& params, std::size_t n_context) {
    if (params.n < 1) reject("n", "must be at least 1");
    if (params.p < 1) reject("p", "must be at least 1");
    if (!std::isfinite(params.mu) || params.mu < 0.0) reject("mu", "must be finite and non-negative");
    if (!(params.rho >= 0.0 && params.rho <= 1.0)) reject("rho", "must lie in [0, 1]");
    if (params.lambda.size() != params.epsilon.size())
        reject("epsilon", "needs one entry per layer (" + std::to_string(params.lambda.size()) + ")");
    if (n_context < 1) reject("n", "context size must be at least 1");
    for (std::size_t l = 0; l < params.lambda.size(); ++l) {
        const std::string idx = "[" + std::to_string(l) + "]";
        const double lam = params.lambda[l];
        const double eps = params.epsilon[l];
        if (!std::isfinite(lam) || lam <= 0.0) reject("lambda" + idx, "must be positive");
        if (!(eps > 0.0 && eps < 1.0)) reject("epsilon" + idx, "must lie in (0, 1)");
        if ((1.0 + eps) * lam / static_cast<double>(n_context) > 1.0)
            reject("lambda" + idx, "edge probability (1+epsilon)*lambda/n exceeds 1");
    }
}

}  // namespace cmsbm
