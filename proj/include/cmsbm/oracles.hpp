#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cmsbm/model.hpp"

namespace cmsbm {

// Reference implementations used to check the fast code paths. They favour
// transparency over speed and are only meant for tiny instances.

// Enumerates every labeled decorated cycle (detection) or path (recovery)
// once, computes f_S from the raw entries, and weights each by its class.
// Requires n <= 12, p <= 6, aleph <= 3.
double brute_force_detection(const Observation& obs, const ModelParams& params, int aleph);
Eigen::MatrixXd brute_force_recovery(const Observation& obs, const ModelParams& params, int aleph);

struct MomentQuery {
    int alpha = 0;            // exponent 2*alpha on the spike-channel overlap
    std::vector<int> alphas;  // exponents 2*alpha_l on the layer overlaps
    int n_small = 2;
};

// E[(<x,x'>/sqrt n)^(2a) prod_l (<x_l,x_l'>/sqrt n)^(2a_l)] for two
// independent draws of the label/flip model, by a coordinate recursion.
double bernoulli_moment(const MomentQuery& q, double rho);
// The same expectation by summing over every sign configuration;
// n (2 + 2L) <= 20.
double bernoulli_moment_enumerated(const MomentQuery& q, double rho);
// E[U^(2a) prod V_l^(2a_l)] for the Gaussian surrogate, by pairings.
double gaussian_moment(const MomentQuery& q, double rho);

struct DominanceReport {
    int queries = 0;
    double max_gap = -INFINITY;  // max of bernoulli - gaussian
    MomentQuery worst;
};

// Checks bernoulli <= gaussian + 1e-12 over alpha + sum alpha_l <= 3 and
// n in 2..6; throws DominanceViolated on the first failure.
DominanceReport moment_dominance_suite(double rho, int layers);

}  // namespace cmsbm
