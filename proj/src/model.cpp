#include "cmsbm/model.hpp"

#include <cmath>
#include <string>

#include "cmsbm/error.hpp"
#include "cmsbm/philox.hpp"

namespace cmsbm {

namespace {

Graph sample_layer(const CounterRng& rng, std::uint32_t tag, std::size_t n, double p_same,
                   double p_diff, const std::vector<std::int8_t>* labels) {
    Graph g(static_cast<std::uint32_t>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double prob = p_same;
            if (labels && (*labels)[i] != (*labels)[j]) prob = p_diff;
            if (rng.bernoulli(tag, pair_index(n, i, j), prob))
                g.add_edge(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
        }
    }
    g.finalize();
    return g;
}

}  // namespace

LatentState sample_latent(const ModelParams& params, std::uint64_t seed) {
    validate_params(params);
    const CounterRng rng(seed);
    LatentState s;
    s.x.resize(params.n);
    for (std::size_t i = 0; i < params.n; ++i)
        s.x[i] = static_cast<std::int8_t>(rng.sign(make_tag(entity::label), i, 0.5));
    const double keep = (1.0 + params.rho) / 2.0;
    s.z.assign(params.layers(), std::vector<std::int8_t>(params.n));
    for (std::size_t l = 0; l < params.layers(); ++l)
        for (std::size_t i = 0; i < params.n; ++i)
            s.z[l][i] = static_cast<std::int8_t>(
                rng.sign(make_tag(entity::flip, static_cast<std::uint32_t>(l)), i, keep));
    s.u.resize(static_cast<Eigen::Index>(params.p));
    for (std::size_t k = 0; k < params.p; ++k)
        s.u(static_cast<Eigen::Index>(k)) = rng.normal(make_tag(entity::spike), k);
    return s;
}

Observation sample_planted(const ModelParams& params, std::uint64_t seed) {
    Observation obs;
    obs.params = params;
    obs.seed = seed;
    obs.hypothesis = Hypothesis::Planted;
    LatentState s = sample_latent(params, seed);
    const CounterRng rng(seed);
    const std::size_t n = params.n, p = params.p;
    const double scale = std::sqrt(params.mu / static_cast<double>(n));
    obs.y.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < p; ++k)
            obs.y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                scale * s.x[i] * s.u(static_cast<Eigen::Index>(k)) +
                rng.normal(make_tag(entity::noise), i * p + k);
    for (std::size_t l = 0; l < params.layers(); ++l) {
        const double base = params.lambda[l] / static_cast<double>(n);
        std::vector<std::int8_t> labels(n);
        for (std::size_t i = 0; i < n; ++i) labels[i] = s.layer_label(l, i);
        obs.layers.push_back(sample_layer(rng, make_tag(entity::edge, static_cast<std::uint32_t>(l)), n,
                                          (1.0 + params.epsilon[l]) * base,
                                          (1.0 - params.epsilon[l]) * base, &labels));
    }
    obs.truth = std::move(s);
    return obs;
}

Observation sample_null(const ModelParams& params, std::uint64_t seed) {
    validate_params(params);
    Observation obs;
    obs.params = params;
    obs.seed = seed;
    obs.hypothesis = Hypothesis::Null;
    const CounterRng rng(seed);
    const std::size_t n = params.n, p = params.p;
    obs.y.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < p; ++k)
            obs.y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                rng.normal(make_tag(entity::noise, 0, Provenance::Null), i * p + k);
    for (std::size_t l = 0; l < params.layers(); ++l) {
        const double base = params.lambda[l] / static_cast<double>(n);
        obs.layers.push_back(sample_layer(
            rng, make_tag(entity::edge, static_cast<std::uint32_t>(l), Provenance::Null), n, base, base,
            nullptr));
    }
    return obs;
}

CenteredLayer center_layer(const Observation& obs, std::size_t layer) {
    if (layer >= obs.layers.size())
        throw Error(ErrorKind::IndexOutOfRange,
                    "layer " + std::to_string(layer) + " of " + std::to_string(obs.layers.size()));
    const std::size_t n = obs.params.n;
    const double q = obs.params.lambda[layer] / static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(q);
    const auto N = static_cast<Eigen::Index>(n);
    CenteredLayer c;
    c.values = Eigen::MatrixXd::Constant(N, N, -q * inv);
    c.values.diagonal().setZero();
    for (const auto& [i, j] : obs.layers[layer].edges()) {
        c.values(i, j) = (1.0 - q) * inv;
        c.values(j, i) = (1.0 - q) * inv;
    }
    return c;
}

}  // namespace cmsbm
