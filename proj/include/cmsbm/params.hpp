#pragma once

#include <cstddef>
#include <vector>

namespace cmsbm {

struct ModelParams {
    std::size_t n = 0;  // vertices carrying the hidden labels
    std::size_t p = 0;  // feature dimension of the spiked matrix
    double mu = 0.0;    // spike strength
    double rho = 0.0;   // per-layer label correlation
    std::vector<double> lambda;   // average degree per layer
    std::vector<double> epsilon;  // assortativity per layer

    std::size_t layers() const { return lambda.size(); }
    double gamma() const { return static_cast<double>(n) / static_cast<double>(p); }

    // Squared signal strength of each channel: the spike first, then one
    // entry per layer.
    double spike_strength() const { return mu * mu / gamma(); }
    double layer_strength(std::size_t l) const { return epsilon[l] * epsilon[l] * lambda[l]; }
};

// Throws Error(InvalidParams) naming the offending field. n_context is the
// vertex count used for the edge-probability check.
void validate_params(const ModelParams& params, std::size_t n_context);
inline void validate_params(const ModelParams& params) { validate_params(params, params.n); }

}  // namespace cmsbm
