#include "cmsbm/rounding.hpp"

#include <algorithm>
#include <cmath>

#include "cmsbm/error.hpp"
#include "cmsbm/philox.hpp"

namespace cmsbm {

namespace {

Eigen::MatrixXd clip_psd(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "eigensolver failed");
    const Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// Nearest point with <x, a> >= level.
Eigen::MatrixXd half_space(const Eigen::MatrixXd& x, const Eigen::MatrixXd& a, double level) {
    const double inner = (x.array() * a.array()).sum();
    if (inner >= level) return x;
    return x + ((level - inner) / a.squaredNorm()) * a;
}

Eigen::MatrixXd unit_diagonal(Eigen::MatrixXd x) {
    x.diagonal().setOnes();
    return x;
}

// PSD clip followed by diagonal rescaling; exactly PSD (up to eigensolver
// roundoff) with an exactly unit diagonal.
Eigen::MatrixXd polish(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd c = clip_psd(0.5 * (x + x.transpose()));
    Eigen::VectorXd d = c.diagonal();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d(i) <= 1e-300) {
            c.row(i).setZero();
            c.col(i).setZero();
            c(i, i) = 1.0;
            d(i) = 1.0;
        }
    }
    const Eigen::VectorXd s = d.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd out = s.asDiagonal() * c * s.asDiagonal();
    out = 0.5 * (out + out.transpose());
    out.diagonal().setOnes();
    return out;
}

}  // namespace

Estimate psd_project(const Eigen::MatrixXd& phi_in, const ProjectionConfig& cfg) {
    if (!(cfg.correlation_floor >= 0.0) || cfg.correlation_floor > 1.0)
        throw Error(ErrorKind::Infeasible, "correlation floor must lie in [0, 1]");
    const Eigen::Index n = phi_in.rows();
    if (n == 0 || phi_in.cols() != n) throw Error(ErrorKind::InvalidParams, "phi must be square and nonempty");
    Eigen::MatrixXd phi = 0.5 * (phi_in + phi_in.transpose());
    const double norm = phi.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw Error(ErrorKind::InvalidParams, "phi must be nonzero and finite");
    phi *= static_cast<double>(n) / norm;
    const double dn = static_cast<double>(n);
    const double level = cfg.correlation_floor * dn * phi.norm();

    auto feasible = [&](const Eigen::MatrixXd& x, ProjectionDiagnostics& d) {
        d.min_eigenvalue = min_eigenvalue(x);
        d.diagonal_error = (x.diagonal().array() - 1.0).abs().maxCoeff();
        const double inner = (x.array() * phi.array()).sum();
        d.constraint_slack = inner - level;
        d.achieved_floor = inner / (dn * phi.norm());
        d.distance = (x - phi).norm();
        return d.min_eigenvalue >= -cfg.tol && d.diagonal_error <= cfg.tol && d.constraint_slack >= -cfg.tol;
    };

    Estimate est;
    // Aim slightly above the floor so the polished point clears it.
    double target = level;
    Eigen::MatrixXd x = phi;
    Eigen::MatrixXd inc_diag = Eigen::MatrixXd::Zero(n, n), inc_psd = inc_diag, inc_half = inc_diag;
    int it = 0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        for (; it < cfg.max_iters;) {
            ++it;
            const Eigen::MatrixXd prev = x;
            Eigen::MatrixXd y = unit_diagonal(x + inc_diag);
            inc_diag = x + inc_diag - y;
            x = y;
            y = clip_psd(x + inc_psd);
            inc_psd = x + inc_psd - y;
            x = y;
            y = half_space(x + inc_half, phi, target);
            inc_half = x + inc_half - y;
            x = y;
            if ((x - prev).norm() < cfg.tol) break;
        }
        est.phi_hat = polish(x);
        est.diagnostics.iters = it;
        if (feasible(est.phi_hat, est.diagnostics)) return est;
        if (it >= cfg.max_iters) break;
        target += std::max(-est.diagnostics.constraint_slack, cfg.tol) * 2.0;
    }
    throw Error(ErrorKind::NoConvergence,
                "projection did not reach feasibility within " + std::to_string(cfg.max_iters) + " iterations");
}

std::vector<std::int8_t> sign_round(const Estimate& est, std::uint64_t seed) {
    const Eigen::Index n = est.phi_hat.rows();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (est.phi_hat + est.phi_hat.transpose()));
    if (es.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "eigensolver failed");
    const Eigen::VectorXd root = (es.eigenvalues().cwiseMax(0.0).array() + 1e-10).sqrt();
    const CounterRng rng(seed);
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) g(i) = rng.normal(make_tag(entity::rounding), static_cast<std::uint64_t>(i));
    const Eigen::VectorXd w = es.eigenvectors() * root.asDiagonal() * (es.eigenvectors().transpose() * g);
    std::vector<std::int8_t> x(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = w(i) < 0.0 ? -1 : 1;
    return x;
}

double cosine_similarity(const Eigen::MatrixXd& m, const std::vector<std::int8_t>& x) {
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = x[static_cast<std::size_t>(i)];
    const double norm = m.norm();
    if (norm == 0.0) return 0.0;
    return v.dot(m * v) / (norm * static_cast<double>(n));
}

double overlap(const std::vector<std::int8_t>& x_hat, const std::vector<std::int8_t>& x) {
    long long s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x_hat[i] * x[i];
    return static_cast<double>(std::llabs(s)) / static_cast<double>(x.size());
}

Metrics metrics(const Eigen::MatrixXd& m, const Observation& obs) {
    if (!obs.truth) throw Error(ErrorKind::MissingTruth, "observation has no latent state");
    return {cosine_similarity(m, obs.truth->x), 0.0};
}

Metrics metrics(const std::vector<std::int8_t>& x_hat, const Observation& obs) {
    if (!obs.truth) throw Error(ErrorKind::MissingTruth, "observation has no latent state");
    const double ov = overlap(x_hat, obs.truth->x);
    return {ov * ov, ov};
}

}  // namespace cmsbm
