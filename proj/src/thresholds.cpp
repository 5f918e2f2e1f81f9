#include "cmsbm/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmsbm/error.hpp"

namespace cmsbm {

double threshold_F(const ModelParams& params, FormulaVariant variant) {
    validate_params(params);
    const double spike = params.spike_strength();
    const double r4 = std::pow(params.rho, 4);
    double best_layer = 0.0;
    double combined = spike;
    bool combined_valid = true;
    for (std::size_t l = 0; l < params.layers(); ++l) {
        const double s = params.layer_strength(l);
        best_layer = std::max(best_layer, s);
        const double eff = variant == FormulaVariant::Intro ? s : s * s;
        const double denom = 1.0 - (1.0 - r4) * eff;
        if (denom <= 0.0)
            combined_valid = false;
        else
            combined += r4 * eff / denom;
    }
    double f = std::max(spike, best_layer);
    if (combined_valid) f = std::max(f, combined);
    return f;
}

namespace {

struct Channels {
    Eigen::VectorXd strength;  // squared strength per channel
    Eigen::MatrixXd corr;      // label correlations between channels
};

Channels channels(const ModelParams& params) {
    validate_params(params);
    const auto dim = static_cast<Eigen::Index>(params.layers() + 1);
    const double r2 = params.rho * params.rho;
    Channels c;
    c.corr = Eigen::MatrixXd::Constant(dim, dim, r2 * r2);
    c.corr.row(0).setConstant(r2);
    c.corr.col(0).setConstant(r2);
    c.corr.diagonal().setOnes();
    c.strength.resize(dim);
    c.strength(0) = params.spike_strength();
    for (std::size_t l = 0; l < params.layers(); ++l)
        c.strength(static_cast<Eigen::Index>(l + 1)) = params.layer_strength(l);
    return c;
}

}  // namespace

Eigen::MatrixXd interaction_matrix(const ModelParams& params) {
    const Channels c = channels(params);
    return c.strength.asDiagonal() * c.corr;
}

Eigen::MatrixXd symmetric_interaction(const ModelParams& params) {
    const Channels c = channels(params);
    const Eigen::VectorXd root = c.strength.cwiseSqrt();
    return root.asDiagonal() * c.corr * root.asDiagonal();
}

double sigma_plus(const ModelParams& params) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric_interaction(params),
                                                      Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "eigensolver failed");
    return es.eigenvalues().maxCoeff();
}

Eigen::VectorXd word_recursion(const ModelParams& params, int aleph) {
    if (aleph < 1) throw Error(ErrorKind::InvalidParams, "aleph: must be at least 1");
    const Eigen::MatrixXd p = interaction_matrix(params);
    Eigen::VectorXd v = p.diagonal();
    for (int k = 1; k < aleph; ++k) v = p * v;
    return v;
}

Chi2Surrogate chi2_surrogate(const ModelParams& params, double t) {
    validate_params(params);
    const double r4 = std::pow(params.rho, 4);
    double product = 1.0;
    double spike_sum = (1.0 + t) * (1.0 + t) * params.spike_strength();
    for (std::size_t l = 0; l < params.layers(); ++l) {
        const double s = params.layer_strength(l);
        const double factor = 1.0 - s * (1.0 - r4);
        if (factor <= 0.0)
            return {std::numeric_limits<double>::infinity(), Chi2Surrogate::Reason::LayerFactor};
        product /= std::sqrt(factor);
        spike_sum += r4 * s / factor;
    }
    if (spike_sum >= 1.0)
        return {std::numeric_limits<double>::infinity(), Chi2Surrogate::Reason::SpikeFactor};
    return {product / std::sqrt(1.0 - spike_sum), Chi2Surrogate::Reason::Finite};
}

double lambda_for_threshold(const ModelParams& params, double target, FormulaVariant variant) {
    const double r4 = std::pow(params.rho, 4);
    double max_eps2 = 0.0;
    for (double e : params.epsilon) max_eps2 = std::max(max_eps2, e * e);
    if (max_eps2 <= 0.0) throw Error(ErrorKind::InvalidParams, "epsilon: empty layer list");
    auto f_at = [&](double lam) {
        ModelParams q = params;
        std::fill(q.lambda.begin(), q.lambda.end(), lam);
        q.n = std::max<std::size_t>(q.n, static_cast<std::size_t>(std::ceil(2.0 * lam)) + 1);
        return threshold_F(q, variant);
    };
    // The first pole of the combined term, in units of lambda.
    double hi = std::numeric_limits<double>::infinity();
    if (r4 < 1.0) {
        const double pole_strength = 1.0 / (1.0 - r4);
        hi = variant == FormulaVariant::Intro ? pole_strength / max_eps2
                                              : std::sqrt(pole_strength) / max_eps2;
        hi *= 1.0 - 1e-12;
    } else {
        hi = 1.0;
        while (f_at(hi) < target) hi *= 2.0;
    }
    double lo = 0.0;
    if (f_at(hi * (1.0 - 1e-9)) < target || f_at(lo + 1e-300) > target)
        throw Error(ErrorKind::InvalidParams, "target F is not reachable below the pole");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f_at(mid) < target) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace cmsbm
