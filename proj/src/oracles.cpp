#include "cmsbm/oracles.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "cmsbm/error.hpp"
#include "cmsbm/families.hpp"

namespace cmsbm {

namespace {

void require_tiny(const Observation& obs, int aleph) {
    if (obs.params.n > 12 || obs.params.p > 6 || aleph > 3)
        throw Error(ErrorKind::InfeasibleSize, "brute force is limited to n <= 12, p <= 6, aleph <= 3");
}

// Centered entry straight from the adjacency relation.
double centered(const Observation& obs, std::size_t l, std::size_t i, std::size_t j) {
    const double q = obs.params.lambda[l] / static_cast<double>(obs.params.n);
    const double g = obs.layers[l].has_edge(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)) ? 1.0 : 0.0;
    return (g - q) / std::sqrt(q);
}

struct Decorated {
    std::vector<std::size_t> a;     // a-vertices in reading order
    std::vector<std::uint8_t> word;  // one letter per edge of the reading
    std::vector<std::size_t> b;     // feature vertex of each 0-letter, in order
};

// Visits every word and every injective choice of feature vertices for the
// given a-vertex reading.
template <class F>
void decorate(const std::vector<std::size_t>& a, int letters, int colors, std::size_t p, F&& visit) {
    Decorated d{a, std::vector<std::uint8_t>(static_cast<std::size_t>(letters)), {}};
    std::vector<char> used(p, 0);
    auto rec = [&](auto&& self, int i) -> void {
        if (i == letters) {
            visit(d);
            return;
        }
        for (int c = 0; c < colors; ++c) {
            d.word[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(c);
            if (c > 0) {
                self(self, i + 1);
                continue;
            }
            for (std::size_t k = 0; k < p; ++k) {
                if (used[k]) continue;
                used[k] = 1;
                d.b.push_back(k);
                self(self, i + 1);
                d.b.pop_back();
                used[k] = 0;
            }
        }
    };
    rec(rec, 0);
}

double subgraph_value(const Observation& obs, const Decorated& d, bool closed) {
    const std::size_t m = d.a.size();
    double f = 1.0;
    std::size_t zi = 0;
    for (std::size_t i = 0; i < d.word.size(); ++i) {
        const std::size_t s = d.a[i], t = d.a[closed ? (i + 1) % m : i + 1];
        if (d.word[i] == 0) {
            const auto k = static_cast<Eigen::Index>(d.b[zi++]);
            f *= obs.y(static_cast<Eigen::Index>(s), k) * obs.y(static_cast<Eigen::Index>(t), k);
        } else {
            f *= centered(obs, d.word[i] - 1u, s, t);
        }
    }
    return f;
}

std::map<std::vector<std::uint8_t>, double> class_weights(const FamilyWeights& fam) {
    std::map<std::vector<std::uint8_t>, double> out;
    for (const auto& fc : fam.classes) out[fc.word.letters] = fc.xi;
    return out;
}

// Ordered injective sequences of length m from {0..n-1}.
template <class F>
void sequences(std::size_t n, std::size_t m, F&& visit) {
    std::vector<std::size_t> seq;
    std::vector<char> used(n, 0);
    auto rec = [&](auto&& self) -> void {
        if (seq.size() == m) {
            visit(seq);
            return;
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (used[v]) continue;
            used[v] = 1;
            seq.push_back(v);
            self(self);
            seq.pop_back();
            used[v] = 0;
        }
    };
    rec(rec);
}

}  // namespace

double brute_force_detection(const Observation& obs, const ModelParams& params, int aleph) {
    require_tiny(obs, aleph);
    const FamilyWeights fam = enumerate_cycles(aleph, params);
    const auto xi = class_weights(fam);
    const int colors = static_cast<int>(params.layers()) + 1;
    const double n = static_cast<double>(params.n), p = static_cast<double>(params.p);
    long double total = 0.0L;
    const auto m = static_cast<std::size_t>(aleph);
    sequences(params.n, m, [&](const std::vector<std::size_t>& a) {
        // One reading per labeled cycle: start at the smallest vertex, step
        // towards the smaller of its two neighbours.
        if (a[0] != *std::min_element(a.begin(), a.end()) || a[1] > a[m - 1]) return;
        decorate(a, aleph, colors, params.p, [&](const Decorated& d) {
            const ColorWord w{Topology::Cycle, d.word};
            const double weight = xi.at(canonical_form(w).letters) /
                                  (std::pow(n, aleph / 2.0) * std::pow(p, static_cast<double>(d.b.size()) / 2.0));
            total += static_cast<long double>(weight * subgraph_value(obs, d, true));
        });
    });
    return static_cast<double>(total / std::sqrt(static_cast<long double>(fam.beta)));
}

Eigen::MatrixXd brute_force_recovery(const Observation& obs, const ModelParams& params, int aleph) {
    require_tiny(obs, aleph);
    const FamilyWeights fam = enumerate_paths(aleph, params);
    const auto xi = class_weights(fam);
    const int colors = static_cast<int>(params.layers()) + 1;
    const double n = static_cast<double>(params.n), p = static_cast<double>(params.p);
    const auto N = static_cast<Eigen::Index>(params.n);
    std::vector<long double> acc(static_cast<std::size_t>(N * N), 0.0L);
    sequences(params.n, static_cast<std::size_t>(aleph) + 1, [&](const std::vector<std::size_t>& a) {
        // One reading per labeled path: from the smaller leaf.
        if (a.front() > a.back()) return;
        decorate(a, aleph, colors, params.p, [&](const Decorated& d) {
            const ColorWord w{Topology::Path, d.word};
            const double weight = xi.at(canonical_form(w).letters) /
                                  (std::pow(n, aleph / 2.0 - 1.0) *
                                   std::pow(p, static_cast<double>(d.b.size()) / 2.0) * fam.beta);
            const long double f = static_cast<long double>(weight * subgraph_value(obs, d, false));
            acc[a.front() * params.n + a.back()] += f;
            acc[a.back() * params.n + a.front()] += f;
        });
    });
    Eigen::MatrixXd phi(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) phi(i, j) = static_cast<double>(acc[static_cast<std::size_t>(i * N + j)]);
    return phi;
}

double bernoulli_moment(const MomentQuery& q, double rho) {
    if (q.alpha + std::accumulate(q.alphas.begin(), q.alphas.end(), 0) > 4 || q.n_small > 8)
        throw Error(ErrorKind::BudgetExceeded, "moment query exceeds the enumeration budget");
    const std::size_t ch = q.alphas.size() + 1;
    std::vector<int> k(ch);
    k[0] = 2 * q.alpha;
    for (std::size_t l = 0; l + 1 < ch; ++l) k[l + 1] = 2 * q.alphas[l];
    const int total_degree = std::accumulate(k.begin(), k.end(), 0);
    const double r2 = rho * rho;

    std::vector<std::vector<double>> binom(9, std::vector<double>(9, 0.0));
    for (int a = 0; a <= 8; ++a) {
        binom[static_cast<std::size_t>(a)][0] = 1.0;
        for (int b = 1; b <= a; ++b)
            binom[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                binom[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)] +
                (b < a ? binom[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b)] : 0.0);
    }
    std::map<std::pair<int, std::vector<int>>, long double> memo;
    // Sum over splittings of the remaining exponents across coordinates i..n-1.
    auto rec = [&](auto&& self, int i, const std::vector<int>& rem) -> long double {
        const bool done = std::all_of(rem.begin(), rem.end(), [](int r) { return r == 0; });
        if (i == q.n_small) return done ? 1.0L : 0.0L;
        if (done) return 1.0L;
        auto key = std::make_pair(i, rem);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        long double sum = 0.0L;
        std::vector<int> beta(ch, 0);
        auto split = [&](auto&& inner, std::size_t c) -> void {
            if (c == ch) {
                int parity = 0, odd_layers = 0;
                long double coef = 1.0L;
                for (std::size_t d = 0; d < ch; ++d) {
                    parity += beta[d];
                    if (d > 0 && beta[d] % 2) ++odd_layers;
                    coef *= binom[static_cast<std::size_t>(rem[d])][static_cast<std::size_t>(beta[d])];
                }
                if (parity % 2) return;
                std::vector<int> next(rem);
                for (std::size_t d = 0; d < ch; ++d) next[d] -= beta[d];
                sum += coef * std::pow(static_cast<long double>(r2), odd_layers) * self(self, i + 1, next);
                return;
            }
            for (int b = 0; b <= rem[c]; ++b) {
                beta[c] = b;
                inner(inner, c + 1);
            }
        };
        split(split, 0);
        memo[key] = sum;
        return sum;
    };
    const long double raw = rec(rec, 0, k);
    return static_cast<double>(raw / std::pow(static_cast<long double>(q.n_small), total_degree / 2.0L));
}

double bernoulli_moment_enumerated(const MomentQuery& q, double rho) {
    const int n = q.n_small;
    const int layers = static_cast<int>(q.alphas.size());
    if (n < 1 || n * (2 + 2 * layers) > 20)
        throw Error(ErrorKind::BudgetExceeded, "literal enumeration needs n (2 + 2L) <= 20 sign bits");
    // Bits: x, x', then z_l, z'_l for each layer; n bits each.
    const int words = 2 + 2 * layers;
    const std::uint64_t configs = std::uint64_t{1} << (n * words);
    const double keep = (1.0 + rho) / 2.0, flip = (1.0 - rho) / 2.0;
    long double total = 0.0L;
    for (std::uint64_t s = 0; s < configs; ++s) {
        auto bit = [&](int word, int i) { return ((s >> (word * n + i)) & 1u) ? -1 : 1; };
        long double prob = std::pow(0.25L, n);
        for (int w = 2; w < words; ++w)
            for (int i = 0; i < n; ++i) prob *= bit(w, i) == 1 ? keep : flip;
        if (prob == 0.0L) continue;
        long double value = 1.0L;
        double ov = 0.0;
        for (int i = 0; i < n; ++i) ov += bit(0, i) * bit(1, i);
        value *= std::pow(static_cast<long double>(ov / std::sqrt(n)), 2 * q.alpha);
        for (int l = 0; l < layers; ++l) {
            double o = 0.0;
            for (int i = 0; i < n; ++i) o += bit(0, i) * bit(2 + 2 * l, i) * bit(1, i) * bit(3 + 2 * l, i);
            value *= std::pow(static_cast<long double>(o / std::sqrt(n)), 2 * q.alphas[static_cast<std::size_t>(l)]);
        }
        total += prob * value;
    }
    return static_cast<double>(total);
}

double gaussian_moment(const MomentQuery& q, double rho) {
    std::vector<int> vars;  // 0 = U, l = V_l
    for (int i = 0; i < 2 * q.alpha; ++i) vars.push_back(0);
    for (std::size_t l = 0; l < q.alphas.size(); ++l)
        for (int i = 0; i < 2 * q.alphas[l]; ++i) vars.push_back(static_cast<int>(l) + 1);
    if (vars.size() > 8) throw Error(ErrorKind::BudgetExceeded, "gaussian moment degree above 8");
    const double r2 = rho * rho;
    auto cov = [&](int a, int b) {
        if (a == b) return 1.0;
        return (a == 0 || b == 0) ? r2 : r2 * r2;
    };
    std::vector<char> used(vars.size(), 0);
    auto rec = [&](auto&& self) -> double {
        std::size_t first = 0;
        while (first < vars.size() && used[first]) ++first;
        if (first == vars.size()) return 1.0;
        used[first] = 1;
        double sum = 0.0;
        for (std::size_t j = first + 1; j < vars.size(); ++j) {
            if (used[j]) continue;
            used[j] = 1;
            sum += cov(vars[first], vars[j]) * self(self);
            used[j] = 0;
        }
        used[first] = 0;
        return sum;
    };
    return rec(rec);
}

DominanceReport moment_dominance_suite(double rho, int layers) {
    DominanceReport rep;
    std::vector<int> exps(static_cast<std::size_t>(layers) + 1, 0);
    auto rec = [&](auto&& self, std::size_t c, int budget) -> void {
        if (c == exps.size()) {
            for (int n = 2; n <= 6; ++n) {
                MomentQuery q{exps[0], std::vector<int>(exps.begin() + 1, exps.end()), n};
                const double gap = bernoulli_moment(q, rho) - gaussian_moment(q, rho);
                ++rep.queries;
                if (gap > rep.max_gap) {
                    rep.max_gap = gap;
                    rep.worst = q;
                }
                if (gap > 1e-12) {
                    std::string desc = "alpha=" + std::to_string(q.alpha) + " n=" + std::to_string(n) +
                                       " rho=" + std::to_string(rho);
                    throw Error(ErrorKind::DominanceViolated, desc);
                }
            }
            return;
        }
        for (int e = 0; e <= budget; ++e) {
            exps[c] = e;
            self(self, c + 1, budget - e);
        }
        exps[c] = 0;
    };
    rec(rec, 0, 3);
    return rep;
}

}  // namespace cmsbm
