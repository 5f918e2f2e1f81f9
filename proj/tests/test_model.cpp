#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cmsbm/error.hpp"
#include "cmsbm/model.hpp"
#include "helpers.hpp"

using namespace cmsbm;
using cmsbm::testing::fig4;
using cmsbm::testing::make_params;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::Io;
}

// Two-sample Kolmogorov-Smirnov test at level 0.01.
bool ks_same(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= t) ++i;
        while (j < b.size() && b[j] <= t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    return d <= 1.628 * std::sqrt((na + nb) / (na * nb));
}

}  // namespace

TEST_CASE("parameter validation names the field") {
    ModelParams p = fig4(3);
    p.rho = 1.5;
    CHECK(kind_of([&] { validate_params(p); }) == ErrorKind::InvalidParams);
    try {
        validate_params(p);
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("rho") != std::string::npos);
    }
    p = fig4(3);
    p.epsilon = {0.5};
    CHECK(kind_of([&] { validate_params(p); }) == ErrorKind::InvalidParams);
    p = fig4(3);
    p.epsilon = {1.0, 0.5};
    CHECK(kind_of([&] { validate_params(p); }) == ErrorKind::InvalidParams);
    p = fig4(3);
    p.lambda = {60.0, 3.0};  // (1+eps) lambda / n = 0.9
    CHECK_NOTHROW(validate_params(p));
    p.lambda = {70.0, 3.0};  // 1.05
    CHECK(kind_of([&] { validate_params(p); }) == ErrorKind::InvalidParams);
    CHECK(kind_of([&] { validate_params(fig4(3), 2); }) == ErrorKind::InvalidParams);
    p = fig4(3);
    p.mu = -0.1;
    CHECK(kind_of([&] { validate_params(p); }) == ErrorKind::InvalidParams);
}

TEST_CASE("sampling is a pure function of params and seed") {
    const ModelParams p = fig4(3, 40, 20);
    const Observation a = sample_planted(p, 9), b = sample_planted(p, 9), c = sample_planted(p, 10);
    CHECK(a.y == b.y);
    CHECK(a.layers == b.layers);
    CHECK(a.truth->x == b.truth->x);
    CHECK(a.y != c.y);
    const Observation q1 = sample_null(p, 9), q2 = sample_null(p, 9);
    CHECK(q1.y == q2.y);
    CHECK(q1.layers == q2.layers);
    CHECK_FALSE(q1.truth.has_value());
    // Planted and null draws with the same seed use separate streams.
    CHECK(q1.y != a.y);
}

TEST_CASE("planted draws follow the model") {
    const ModelParams p = make_params(200, 100, 2.0, 0.6, {8.0, 8.0}, {0.5, 0.5});
    double agree = 0, total = 0, same_edges = 0, same_pairs = 0, diff_edges = 0, diff_pairs = 0;
    double signal = 0, cells = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Observation obs = sample_planted(p, seed);
        const LatentState& s = *obs.truth;
        for (std::size_t i = 0; i < p.n; ++i) {
            agree += s.z[0][i] == 1;
            ++total;
        }
        for (std::size_t i = 0; i < p.n; ++i)
            for (std::size_t j = i + 1; j < p.n; ++j) {
                const bool same = s.layer_label(1, i) == s.layer_label(1, j);
                const bool e = obs.layers[1].has_edge(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
                (same ? same_edges : diff_edges) += e;
                (same ? same_pairs : diff_pairs) += 1;
            }
        for (std::size_t i = 0; i < p.n; ++i)
            for (std::size_t k = 0; k < p.p; ++k) {
                signal += obs.y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) * s.x[i] *
                          s.u(static_cast<Eigen::Index>(k));
                ++cells;
            }
    }
    CHECK(std::abs(agree / total - 0.8) < 0.03);
    CHECK(std::abs(same_edges / same_pairs - 1.5 * 8.0 / 200) < 0.004);
    CHECK(std::abs(diff_edges / diff_pairs - 0.5 * 8.0 / 200) < 0.003);
    // E[Y(i,k) x_i u_k] = sqrt(mu/n) E[u_k^2].
    CHECK(std::abs(signal / cells - std::sqrt(2.0 / 200)) < 0.01);
}

TEST_CASE("null draws have independent standard entries and ER layers") {
    const ModelParams p = fig4(5, 100, 50);
    double s1 = 0, s2 = 0, cells = 0, edges = 0, pairs = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Observation obs = sample_null(p, seed);
        s1 += obs.y.sum();
        s2 += obs.y.squaredNorm();
        cells += static_cast<double>(obs.y.size());
        edges += static_cast<double>(obs.layers[0].edges().size());
        pairs += 100.0 * 99 / 2;
    }
    CHECK(std::abs(s1 / cells) < 4 / std::sqrt(cells));
    CHECK(std::abs(s2 / cells - 1.0) < 4 * std::sqrt(2 / cells));
    CHECK(std::abs(edges / pairs - 0.05) < 4 * std::sqrt(0.05 / pairs));
}

TEST_CASE("centered layer") {
    const ModelParams p = fig4(3, 30, 10);
    const Observation obs = sample_null(p, 3);
    const CenteredLayer c = center_layer(obs, 1);
    CHECK(c.values.isApprox(c.values.transpose()));
    CHECK(c.values.diagonal().isZero());
    const double q = 3.0 / 30;
    for (std::uint32_t i = 0; i < 30; ++i)
        for (std::uint32_t j = 0; j < 30; ++j) {
            if (i == j) continue;
            const double g = obs.layers[1].has_edge(i, j) ? 1.0 : 0.0;
            CHECK(c.values(i, j) == doctest::Approx((g - q) / std::sqrt(q)).epsilon(1e-14));
        }
    CHECK(kind_of([&] { center_layer(obs, 2); }) == ErrorKind::IndexOutOfRange);
}

TEST_CASE("edge draws are exchangeable across vertices") {
    const ModelParams p = fig4(5, 60, 10);
    std::vector<double> first, last;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const Observation obs = sample_planted(p, seed);
        double d0 = 0, d1 = 0;
        for (const auto& [i, j] : obs.layers[0].edges()) {
            d0 += (i == 0 || j == 0);
            d1 += (i == 59 || j == 59);
        }
        first.push_back(d0);
        last.push_back(d1);
    }
    CHECK(ks_same(first, last));
}
