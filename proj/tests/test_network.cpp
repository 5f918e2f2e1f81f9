#include <doctest.h>

#include <memory>

#include "cmsbm/network.hpp"
#include "cmsbm/partitions.hpp"
#include "cmsbm/philox.hpp"

using namespace cmsbm;

TEST_CASE("set partitions and their Moebius weights") {
    for (int m = 0; m <= 7; ++m) {
        const auto parts = set_partitions(m);
        CHECK(parts.size() == bell_number(m));
        double sum = 0.0;
        for (const auto& p : parts) sum += p.moebius;
        // Sum of mu(0, pi) over the whole lattice vanishes for m >= 2.
        CHECK(sum == (m <= 1 ? 1.0 : 0.0));
    }
    CHECK(bell_number(5) == 52);
    const auto three = set_partitions(3);
    CHECK(three.back().blocks == 3);
    CHECK(three.front().moebius == 2.0);  // one block of size 3: (-1)^2 2!
}

namespace {

std::shared_ptr<const Eigen::MatrixXd> random_matrix(Eigen::Index r, Eigen::Index c, std::uint32_t tag) {
    const CounterRng rng(17);
    auto m = std::make_shared<Eigen::MatrixXd>(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j)
            (*m)(i, j) = rng.normal(make_tag(entity::probe, tag), static_cast<std::uint64_t>(i * c + j));
    return m;
}

}  // namespace

TEST_CASE("contraction of a four-cycle with a chord") {
    // K4 minus one edge is series-parallel; nodes 0..3 of size 4, 3, 5, 2.
    const Eigen::Index d[] = {4, 3, 5, 2};
    auto a = random_matrix(4, 3, 1), b = random_matrix(3, 5, 2), c = random_matrix(5, 2, 3), e = random_matrix(2, 4, 4),
         f = random_matrix(4, 5, 5);
    double brute = 0.0;
    for (int i = 0; i < d[0]; ++i)
        for (int j = 0; j < d[1]; ++j)
            for (int k = 0; k < d[2]; ++k)
                for (int l = 0; l < d[3]; ++l)
                    brute += (*a)(i, j) * (*b)(j, k) * (*c)(k, l) * (*e)(l, i) * (*f)(i, k);
    TensorNetwork net;
    for (auto dim : d) net.add_node(dim);
    net.add_edge(0, 1, {a, "A"});
    net.add_edge(1, 2, {b, "B"});
    net.add_edge(2, 3, {c, "C"});
    net.add_edge(3, 0, {e, "E"});
    net.add_edge(2, 0, Operand{f, "F"}.flipped());
    ContractionMemo memo;
    CHECK(net.contract_scalar(&memo) == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("contraction of K4 falls back to branching") {
    const Eigen::Index n = 4;
    std::vector<std::shared_ptr<const Eigen::MatrixXd>> m;
    for (std::uint32_t t = 0; t < 6; ++t) m.push_back(random_matrix(n, n, 10 + t));
    double brute = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    brute += (*m[0])(i, j) * (*m[1])(i, k) * (*m[2])(i, l) * (*m[3])(j, k) * (*m[4])(j, l) *
                             (*m[5])(k, l);
    TensorNetwork net;
    for (int x = 0; x < 4; ++x) net.add_node(n);
    const int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    for (int e = 0; e < 6; ++e) net.add_edge(pairs[e][0], pairs[e][1], {m[static_cast<std::size_t>(e)], "M" + std::to_string(e)});
    CHECK(net.contract_scalar(nullptr) == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("pair contraction keeps the outputs free") {
    auto a = random_matrix(3, 4, 30), b = random_matrix(4, 3, 31), g = random_matrix(3, 3, 32);
    TensorNetwork net;
    const int u = net.add_node(3, true), v = net.add_node(3, true), w = net.add_node(4);
    net.add_edge(u, w, {a, "A"});
    net.add_edge(w, v, {b, "B"});
    net.add_edge(v, v, {g, "G"});  // self-loop on an output
    const Eigen::MatrixXd r = net.contract_pair(u, v, nullptr);
    const Eigen::MatrixXd expected = (*a) * (*b) * g->diagonal().asDiagonal();
    CHECK((r - expected).norm() < 1e-12 * expected.norm());
}
