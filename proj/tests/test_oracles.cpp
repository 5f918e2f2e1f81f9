#include <doctest.h>

#include <cmath>

#include "cmsbm/error.hpp"
#include "cmsbm/families.hpp"
#include "cmsbm/oracles.hpp"
#include "helpers.hpp"

using namespace cmsbm;
using cmsbm::testing::make_params;

TEST_CASE("bernoulli moments") {
    CHECK(bernoulli_moment({1, {0}, 4}, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(bernoulli_moment({1, {}, 6}, 0.3) == doctest::Approx(1.0).epsilon(1e-14));
    // Factorized recursion against literal enumeration of every sign pattern.
    for (int n = 1; n <= 3; ++n)
        for (double rho : {0.0, 0.3, 0.5, 1.0})
            for (int a = 0; a <= 2; ++a)
                for (int a1 = 0; a1 <= 2; ++a1)
                    for (int a2 = 0; a2 <= 1; ++a2) {
                        if (a + a1 + a2 > 4) continue;
                        const MomentQuery q{a, {a1, a2}, n};
                        CHECK(bernoulli_moment(q, rho) ==
                              doctest::Approx(bernoulli_moment_enumerated(q, rho)).epsilon(1e-12));
                    }
    // E[<x,x'>^2 <x_1,x_1'>^2] / n^2 for n = 4 spelled out coordinatewise:
    // n terms with both indices equal, n(n-1) with distinct pairs (1 each)
    // and 2n(n-1) cross terms weighted rho^4.
    const double rho = 0.5, n = 4;
    const double direct = (n + n * (n - 1) + 2 * n * (n - 1) * std::pow(rho, 4)) / (n * n);
    CHECK(bernoulli_moment_enumerated({1, {1}, 4}, rho) == doctest::Approx(direct).epsilon(1e-14));
    CHECK(bernoulli_moment({1, {1}, 4}, rho) == doctest::Approx(direct).epsilon(1e-14));
    CHECK_THROWS_AS(bernoulli_moment({3, {2}, 4}, 0.5), Error);
}

TEST_CASE("gaussian moments by pairings") {
    const double rho = 0.7, r4 = std::pow(rho, 4), r8 = std::pow(rho, 8);
    CHECK(gaussian_moment({1, {}, 2}, rho) == 1.0);
    CHECK(gaussian_moment({2, {}, 2}, rho) == 3.0);
    CHECK(gaussian_moment({1, {1}, 2}, rho) == doctest::Approx(1 + 2 * r4).epsilon(1e-14));
    CHECK(gaussian_moment({0, {1, 1}, 2}, rho) == doctest::Approx(1 + 2 * r8).epsilon(1e-14));
    // Symmetric under relabeling the layers.
    CHECK(gaussian_moment({1, {2, 1, 0}, 2}, rho) == doctest::Approx(gaussian_moment({1, {0, 1, 2}, 2}, rho)).epsilon(1e-14));
}

TEST_CASE("bernoulli moments are dominated by gaussian moments") {
    for (int layers = 0; layers <= 3; ++layers)
        for (double rho : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const auto rep = moment_dominance_suite(rho, layers);
            CHECK(rep.max_gap <= 1e-12);
            CHECK(rep.queries > 0);
        }
    // rho = 1: single overlap, Bernoulli fourth moment 3 - 2/n against 3.
    CHECK(bernoulli_moment({2, {}, 5}, 1.0) == doctest::Approx(3.0 - 2.0 / 5).epsilon(1e-14));
}

TEST_CASE("brute-force triangle sum for a single-layer monochromatic family") {
    // With mu = 0 only the all-colored triangle carries weight, so the
    // statistic is a triangle count in the centered layer.
    const ModelParams p = make_params(6, 3, 0.0, 0.5, {2.0}, {0.5});
    const Observation obs = sample_planted(p, 4);
    const CenteredLayer c = center_layer(obs, 0);
    double tri = 0.0;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            for (int k = j + 1; k < 6; ++k) tri += c.values(i, j) * c.values(j, k) * c.values(i, k);
    // xi = (eps^2 lambda)^(3/2), beta = xi^2 / 6.
    const double xi = std::pow(p.layer_strength(0), 1.5);
    const double expected = xi / std::pow(6.0, 1.5) * tri / std::sqrt(xi * xi / 6);
    CHECK(brute_force_detection(obs, p, 3) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("brute force on an empty-graph, zero-feature instance") {
    ModelParams p = make_params(4, 3, 0.5, 0.5, {1.0}, {0.5});
    Observation obs;
    obs.params = p;
    obs.y = Eigen::MatrixXd::Zero(4, 3);
    obs.layers.emplace_back(4);
    // Only the all-colored 3-cycles survive; each edge carries -sqrt(q) and
    // K4 has 4 triangles. beta sums xi^2 over every raw word, divided by 2 aleph.
    double beta = 0.0;
    for (int w = 0; w < 8; ++w) {
        ColorWord word{Topology::Cycle, {std::uint8_t(w & 1), std::uint8_t((w >> 1) & 1), std::uint8_t((w >> 2) & 1)}};
        beta += std::pow(xi_weight(word, p), 2) / 6;
    }
    const double q = 0.25;
    const double xi = xi_weight({Topology::Cycle, {1, 1, 1}}, p);
    const double expected = xi / std::pow(4.0, 1.5) * 4 * -std::pow(std::sqrt(q), 3) / std::sqrt(beta);
    CHECK(brute_force_detection(obs, p, 3) == doctest::Approx(expected).epsilon(1e-12));
    CHECK_THROWS_AS(brute_force_detection(sample_null(make_params(13, 3, 0.5, 0.5, {1.0}, {0.5}), 1),
                                          make_params(13, 3, 0.5, 0.5, {1.0}, {0.5}), 3),
                    Error);
}
