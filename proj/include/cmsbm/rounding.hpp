#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cmsbm/model.hpp"

namespace cmsbm {

struct ProjectionConfig {
    double correlation_floor = 0.05;
    int max_iters = 5000;
    double tol = 1e-8;
};

struct ProjectionDiagnostics {
    double min_eigenvalue = 0.0;
    double diagonal_error = 0.0;    // max |diag - 1|
    double constraint_slack = 0.0;  // <phi_hat, phi> - floor * n * |phi|_F, scaled input
    double achieved_floor = 0.0;    // <phi_hat, phi> / (n |phi|_F)
    double distance = 0.0;          // |phi_hat - scaled input|_F
    int iters = 0;
};

struct Estimate {
    Eigen::MatrixXd phi_hat;
    std::optional<std::vector<std::int8_t>> x_hat;
    ProjectionDiagnostics diagnostics;
};

// Finds a unit-diagonal PSD matrix with <phi_hat, phi> >= floor * n * |phi|_F
// near phi. phi is symmetrized and rescaled to Frobenius norm n (the norm of
// a rank-one sign matrix) before Dykstra's alternating projections; the
// final iterate is polished by clipping negative eigenvalues and rescaling
// to unit diagonal, which keeps it exactly in the first two sets.
Estimate psd_project(const Eigen::MatrixXd& phi, const ProjectionConfig& cfg = {});

// Signs of w ~ N(0, phi_hat); zeros become +1.
std::vector<std::int8_t> sign_round(const Estimate& est, std::uint64_t seed);

// <m, x x^T> / (|m|_F n).
double cosine_similarity(const Eigen::MatrixXd& m, const std::vector<std::int8_t>& x);
// |<x_hat, x>| / n.
double overlap(const std::vector<std::int8_t>& x_hat, const std::vector<std::int8_t>& x);

struct Metrics {
    double cosine = 0.0;
    double overlap = 0.0;
};

// Throw MissingTruth when the observation carries no latent state.
Metrics metrics(const Eigen::MatrixXd& m, const Observation& obs);
Metrics metrics(const std::vector<std::int8_t>& x_hat, const Observation& obs);

}  // namespace cmsbm
