#pragma once

#include <cmath>
#include <vector>

#include "cmsbm/params.hpp"

namespace cmsbm::testing {

inline ModelParams make_params(std::size_t n, std::size_t p, double mu, double rho, std::vector<double> lambda,
                               std::vector<double> epsilon) {
    ModelParams m;
    m.n = n;
    m.p = p;
    m.mu = mu;
    m.rho = rho;
    m.lambda = std::move(lambda);
    m.epsilon = std::move(epsilon);
    return m;
}

// Fig-4 setting: n=100, p=50, mu=0.5, rho=0.6, eps=0.5, two layers.
inline ModelParams fig4(double lambda, std::size_t n = 100, std::size_t p = 50) {
    return make_params(n, p, 0.5, 0.6, {lambda, lambda}, {0.5, 0.5});
}

inline double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace cmsbm::testing
