#include "cmsbm/verify.hpp"

#include <algorithm>
#include <cmath>

#include "cmsbm/error.hpp"
#include "cmsbm/oracles.hpp"
#include "cmsbm/philox.hpp"
#include "cmsbm/statistics.hpp"
#include "cmsbm/thresholds.hpp"

namespace cmsbm {

namespace {

ModelParams tiny(std::size_t n, std::size_t p, std::size_t layers) {
    ModelParams m;
    m.n = n;
    m.p = p;
    m.mu = 0.9;
    m.rho = 0.6;
    for (std::size_t l = 0; l < layers; ++l) {
        m.lambda.push_back(2.0 + 0.5 * static_cast<double>(l));
        m.epsilon.push_back(0.5 - 0.1 * static_cast<double>(l));
    }
    return m;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
}

StatisticConfig cfg(int aleph, Backend b) {
    StatisticConfig c;
    c.aleph = aleph;
    c.backend = b;
    return c;
}

VerifyCheck finish(std::string name, double measured, double tol, int cases) {
    return {std::move(name), measured <= tol, measured, tol, cases};
}

}  // namespace

std::vector<VerifyCheck> run_verification() {
    std::vector<VerifyCheck> out;

    {
        double gap = -INFINITY;
        int cases = 0;
        bool violated = false;
        for (int layers = 0; layers <= 3; ++layers)
            for (double rho : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                try {
                    const auto r = moment_dominance_suite(rho, layers);
                    gap = std::max(gap, r.max_gap);
                    cases += r.queries;
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::DominanceViolated) throw;
                    violated = true;
                }
            }
        auto c = finish("moment_dominance", gap, 1e-12, cases);
        c.passed = c.passed && !violated;
        out.push_back(c);
    }

    {
        double worst = 0.0;
        int cases = 0;
        for (int n = 1; n <= 3; ++n)
            for (double rho : {0.0, 0.3, 0.7, 1.0})
                for (int a = 0; a <= 2; ++a)
                    for (int a1 = 0; a1 <= 2; ++a1)
                        for (int a2 = 0; a2 <= 1; ++a2) {
                            if (a + a1 + a2 > 3) continue;
                            const MomentQuery q{a, {a1, a2}, n};
                            worst = std::max(worst, std::abs(bernoulli_moment(q, rho) -
                                                             bernoulli_moment_enumerated(q, rho)));
                            ++cases;
                        }
        out.push_back(finish("bernoulli_factorized_vs_enumerated", worst, 1e-12, cases));
    }

    {
        double worst = 0.0;
        int cases = 0;
        for (std::size_t layers : {1u, 2u}) {
            const ModelParams m = tiny(8, 4, layers);
            for (std::uint64_t seed = 1; seed <= 3; ++seed) {
                const Observation obs = sample_planted(m, seed);
                worst = std::max(worst, rel(detection_statistic(obs, m, cfg(3, Backend::ExactEnumeration)).value,
                                            brute_force_detection(obs, m, 3)));
                worst = std::max(worst, rel(*recovery_matrix(obs, m, cfg(2, Backend::ExactEnumeration)).matrix,
                                            brute_force_recovery(obs, m, 2)));
                cases += 2;
            }
        }
        out.push_back(finish("brute_force_vs_exact", worst, 1e-10, cases));
    }

    {
        double worst = 0.0;
        int cases = 0;
        const ModelParams m = tiny(12, 6, 2);
        for (std::uint64_t seed = 1; seed <= 2; ++seed) {
            const Observation obs = sample_planted(m, seed);
            for (int aleph : {3, 4}) {
                worst = std::max(worst, rel(detection_statistic(obs, m, cfg(aleph, Backend::TransferApprox)).value,
                                            detection_statistic(obs, m, cfg(aleph, Backend::ExactEnumeration)).value));
                ++cases;
            }
            worst = std::max(worst, rel(*recovery_matrix(obs, m, cfg(3, Backend::TransferApprox)).matrix,
                                        *recovery_matrix(obs, m, cfg(3, Backend::ExactEnumeration)).matrix));
            ++cases;
        }
        out.push_back(finish("exact_vs_transfer", worst, 1e-8, cases));
    }

    {
        const CounterRng rng(2024);
        const std::uint32_t tag = make_tag(entity::probe, 0);
        int mismatches = 0, cases = 0;
        for (std::uint64_t t = 0; cases < 200; ++t) {
            ModelParams m;
            m.n = 100;
            m.p = 1 + static_cast<std::size_t>(99 * rng.uniform(tag, 8 * t));
            m.rho = rng.uniform(tag, 8 * t + 1);
            m.mu = 2.0 * rng.uniform(tag, 8 * t + 2);
            const int layers = 1 + static_cast<int>(3 * rng.uniform(tag, 8 * t + 3));
            for (int l = 0; l < layers; ++l) {
                m.lambda.push_back(0.5 + 5.0 * rng.uniform(tag, 8 * t + 4 + static_cast<std::uint64_t>(l)));
                m.epsilon.push_back(rng.uniform(make_tag(entity::probe, 1), 8 * t + static_cast<std::uint64_t>(l)));
            }
            bool admissible = m.spike_strength() < 1.0;
            for (std::size_t l = 0; l < m.layers(); ++l) admissible = admissible && m.layer_strength(l) < 1.0;
            const double f = threshold_F(m, FormulaVariant::Intro);
            if (!admissible || std::abs(f - 1.0) <= 0.02) continue;
            ++cases;
            if ((sigma_plus(m) > 1.0) != (f > 1.0)) ++mismatches;
        }
        out.push_back(finish("threshold_side_agreement", mismatches, 0, cases));
    }
    return out;
}

}  // namespace cmsbm
