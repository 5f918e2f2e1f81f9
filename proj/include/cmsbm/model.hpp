#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cmsbm/graph.hpp"
#include "cmsbm/params.hpp"

namespace cmsbm {

struct LatentState {
    std::vector<std::int8_t> x;               // community labels, length n
    std::vector<std::vector<std::int8_t>> z;  // per-layer flips, L x n
    Eigen::VectorXd u;                        // spike direction, length p

    // Effective labels of layer l: x(i) * z_l(i).
    std::int8_t layer_label(std::size_t l, std::size_t i) const {
        return static_cast<std::int8_t>(x[i] * z[l][i]);
    }
};

enum class Hypothesis { Planted, Null };

struct Observation {
    ModelParams params;
    Eigen::MatrixXd y;  // n x p
    std::vector<Graph> layers;
    std::optional<LatentState> truth;
    Hypothesis hypothesis = Hypothesis::Planted;
    std::uint64_t seed = 0;
};

// Centered, degree-normalized adjacency of one layer: off-diagonal entries
// (G - lambda/n) / sqrt(lambda/n), zero diagonal.
struct CenteredLayer {
    Eigen::MatrixXd values;
};

LatentState sample_latent(const ModelParams& params, std::uint64_t seed);
Observation sample_planted(const ModelParams& params, std::uint64_t seed);
Observation sample_null(const ModelParams& params, std::uint64_t seed);
CenteredLayer center_layer(const Observation& obs, std::size_t layer);

// Dense index of the unordered pair i < j, used as the counter for edge draws.
inline std::uint64_t pair_index(std::size_t n, std::size_t i, std::size_t j) {
    return static_cast<std::uint64_t>(i) * n + j;
}

}  // namespace cmsbm
