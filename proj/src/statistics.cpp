#include "cmsbm/statistics.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <string>

#include "cmsbm/error.hpp"
#include "cmsbm/network.hpp"
#include "cmsbm/partitions.hpp"

namespace cmsbm {

namespace {

// Observation matrices scaled so that a word's product carries the factor
// n^(-aleph/2) p^(-c0/2).
struct ScaledInputs {
    std::vector<std::shared_ptr<const Eigen::MatrixXd>> layers;  // index l-1
    std::shared_ptr<const Eigen::MatrixXd> y;
};

ScaledInputs scale_inputs(const Observation& obs) {
    const double n = static_cast<double>(obs.params.n), p = static_cast<double>(obs.params.p);
    ScaledInputs s;
    for (std::size_t l = 0; l < obs.layers.size(); ++l)
        s.layers.push_back(std::make_shared<Eigen::MatrixXd>(center_layer(obs, l).values / std::sqrt(n)));
    s.y = std::make_shared<Eigen::MatrixXd>(obs.y / std::pow(n * p, 0.25));
    return s;
}

int slot_count(Topology t, int aleph) { return t == Topology::Cycle ? aleph : aleph + 1; }

std::uint64_t word_count(int colors, int aleph) {
    std::uint64_t c = 1;
    for (int i = 0; i < aleph; ++i) c *= static_cast<std::uint64_t>(colors);
    return c;
}

void check_size(const ModelParams& params, const StatisticConfig& cfg, Topology topo) {
    const auto a = static_cast<std::size_t>(cfg.aleph);
    if (topo == Topology::Cycle) {
        if (cfg.aleph < 3) throw Error(ErrorKind::InvalidParams, "aleph: detection needs aleph >= 3");
        if (params.n < 2 * a || params.p < a)
            throw Error(ErrorKind::InfeasibleSize, "need n >= 2*aleph and p >= aleph");
    } else {
        if (cfg.aleph < 1) throw Error(ErrorKind::InvalidParams, "aleph: recovery needs aleph >= 1");
        if (params.n < a + 1 || params.p < a)
            throw Error(ErrorKind::InfeasibleSize, "need n >= aleph + 1 and p >= aleph");
    }
}

// ---------------------------------------------------------------- exact

struct ExactWalker {
    const ScaledInputs& in;
    Topology topo;
    int aleph, colors, slots;
    Eigen::Index n, p;
    std::vector<Eigen::Index> a;
    std::vector<char> used_a, used_b;
    WordSums& out;

    void place(int pos) {
        if (pos == slots) {
            letters(0, 1.0, 0);
            return;
        }
        for (Eigen::Index v = 0; v < n; ++v) {
            if (used_a[static_cast<std::size_t>(v)]) continue;
            used_a[static_cast<std::size_t>(v)] = 1;
            a[static_cast<std::size_t>(pos)] = v;
            place(pos + 1);
            used_a[static_cast<std::size_t>(v)] = 0;
        }
    }

    void letters(int i, double prod, std::uint64_t code) {
        if (i == aleph) {
            if (topo == Topology::Cycle) out.scalar[code] += prod;
            else out.pair[code](a.front(), a.back()) += prod;
            return;
        }
        const Eigen::Index s = a[static_cast<std::size_t>(i)];
        const Eigen::Index t = a[static_cast<std::size_t>((i + 1) % slots)];
        const auto next = code * static_cast<std::uint64_t>(colors);
        const Eigen::MatrixXd& y = *in.y;
        for (Eigen::Index k = 0; k < p; ++k) {
            if (used_b[static_cast<std::size_t>(k)]) continue;
            used_b[static_cast<std::size_t>(k)] = 1;
            letters(i + 1, prod * y(s, k) * y(t, k), next);
            used_b[static_cast<std::size_t>(k)] = 0;
        }
        for (int c = 1; c < colors; ++c)
            letters(i + 1, prod * (*in.layers[static_cast<std::size_t>(c - 1)])(s, t),
                    next + static_cast<std::uint64_t>(c));
    }
};

void exact_sums(const ScaledInputs& in, WordSums& out, Eigen::Index n, Eigen::Index p) {
    ExactWalker w{in, out.topology, out.aleph, out.colors, slot_count(out.topology, out.aleph), n, p,
                  std::vector<Eigen::Index>(static_cast<std::size_t>(slot_count(out.topology, out.aleph))),
                  std::vector<char>(static_cast<std::size_t>(n), 0),
                  std::vector<char>(static_cast<std::size_t>(p), 0), out};
    w.place(0);
}

// ------------------------------------------------------------- transfer

void transfer_sums(const ScaledInputs& in, WordSums& out, Eigen::Index n, Eigen::Index p,
                   bool b_correction) {
    const Topology topo = out.topology;
    const int aleph = out.aleph, colors = out.colors;
    const int slots = slot_count(topo, aleph);
    const auto slot_parts = set_partitions(slots);
    std::vector<std::vector<SetPartition>> zero_parts(static_cast<std::size_t>(aleph) + 1);
    // Without the full correction, inclusion-exclusion is truncated at first
    // order: all feature indices distinct, minus each single coincident pair.
    for (int z = 0; z <= aleph; ++z)
        for (auto& part : set_partitions(z))
            if (b_correction || part.blocks >= z - 1) zero_parts[static_cast<std::size_t>(z)].push_back(std::move(part));

    std::vector<Operand> layer_ops;
    for (int c = 1; c < colors; ++c)
        layer_ops.push_back({in.layers[static_cast<std::size_t>(c - 1)], "G" + std::to_string(c), false, true});
    const Operand y_op{in.y, "Y", false, false};

    ContractionMemo memo;
    const std::uint64_t words = word_count(colors, aleph);
    for (std::uint64_t code = 0; code < words; ++code) {
        const auto w = word_from_index(code, aleph, colors);
        std::vector<int> zeros;
        for (int i = 0; i < aleph; ++i)
            if (w[static_cast<std::size_t>(i)] == 0) zeros.push_back(i);
        double scalar_total = 0.0;
        Eigen::MatrixXd pair_total;
        if (topo == Topology::Path) pair_total = Eigen::MatrixXd::Zero(n, n);

        for (const auto& sp : slot_parts) {
            const auto& blk = sp.block;
            const int last = (topo == Topology::Cycle) ? 0 : aleph;
            if (topo == Topology::Path && blk[0] == blk[static_cast<std::size_t>(last)]) continue;
            bool vanishes = false;
            for (int i = 0; i < aleph && !vanishes; ++i) {
                const int s = blk[static_cast<std::size_t>(i)];
                const int t = blk[static_cast<std::size_t>((i + 1) % slots)];
                // Centered layers have zero diagonal.
                if (w[static_cast<std::size_t>(i)] != 0 && s == t) vanishes = true;
            }
            if (vanishes) continue;
            for (const auto& zp : zero_parts[zeros.size()]) {
                TensorNetwork net;
                std::vector<int> a_node(static_cast<std::size_t>(sp.blocks));
                for (int b = 0; b < sp.blocks; ++b) {
                    const bool output = topo == Topology::Path &&
                                        (b == blk[0] || b == blk[static_cast<std::size_t>(aleph)]);
                    a_node[static_cast<std::size_t>(b)] = net.add_node(n, output);
                }
                std::vector<int> b_node(static_cast<std::size_t>(zp.blocks));
                for (int b = 0; b < zp.blocks; ++b) b_node[static_cast<std::size_t>(b)] = net.add_node(p);
                int zi = 0;
                for (int i = 0; i < aleph; ++i) {
                    const int s = a_node[static_cast<std::size_t>(blk[static_cast<std::size_t>(i)])];
                    const int t = a_node[static_cast<std::size_t>(blk[static_cast<std::size_t>((i + 1) % slots)])];
                    const auto c = w[static_cast<std::size_t>(i)];
                    if (c == 0) {
                        const int b = b_node[static_cast<std::size_t>(zp.block[static_cast<std::size_t>(zi++)])];
                        net.add_edge(s, b, y_op);
                        net.add_edge(t, b, y_op);
                    } else {
                        net.add_edge(s, t, layer_ops[static_cast<std::size_t>(c - 1)]);
                    }
                }
                const double weight = sp.moebius * zp.moebius;
                if (topo == Topology::Cycle) {
                    scalar_total += weight * net.contract_scalar(&memo);
                } else {
                    const int u = a_node[static_cast<std::size_t>(blk[0])];
                    const int v = a_node[static_cast<std::size_t>(blk[static_cast<std::size_t>(aleph)])];
                    if (u < v) pair_total += weight * net.contract_pair(u, v, &memo);
                    else pair_total += weight * net.contract_pair(v, u, &memo).transpose();
                }
            }
        }
        if (topo == Topology::Cycle) out.scalar[code] = scalar_total;
        else out.pair[code] = std::move(pair_total);
    }
}

template <class F>
void for_each_family_word(const FamilyWeights& family, F&& f) {
    for (const auto& fc : family.classes)
        for (const auto& w : orbit(fc.word)) f(w, fc.xi);
}

}  // namespace

std::string_view backend_name(Backend b) {
    return b == Backend::ExactEnumeration ? "exact" : "transfer";
}

Backend parse_backend(std::string_view name) {
    if (name == "exact") return Backend::ExactEnumeration;
    if (name == "transfer") return Backend::TransferApprox;
    throw Error(ErrorKind::InvalidParams, "backend: expected exact or transfer, got " + std::string(name));
}

double estimated_cost(const ModelParams& params, const StatisticConfig& cfg, Topology topology) {
    const int colors = static_cast<int>(params.layers()) + 1;
    const int slots = slot_count(topology, cfg.aleph);
    const double n = static_cast<double>(params.n), p = static_cast<double>(params.p);
    if (cfg.backend == Backend::ExactEnumeration) {
        double placements = 1.0;
        for (int i = 0; i < slots; ++i) placements *= n - i;
        return placements * std::pow(p + colors - 1, cfg.aleph);
    }
    const double zero_terms = cfg.b_collision_correction ? static_cast<double>(bell_number(cfg.aleph))
                                                         : 1.0 + cfg.aleph * (cfg.aleph - 1) / 2.0;
    return static_cast<double>(word_count(colors, cfg.aleph)) * static_cast<double>(bell_number(slots)) *
           zero_terms * n * n * std::max(n, p);
}

WordSums word_sums(const Observation& obs, const StatisticConfig& cfg, Topology topology) {
    const ModelParams& params = obs.params;
    check_size(params, cfg, topology);
    if (cfg.backend == Backend::TransferApprox && cfg.aleph > 6)
        throw Error(ErrorKind::PartitionBudgetExceeded,
                    "aleph = " + std::to_string(cfg.aleph) + " exceeds the partition budget (6)");
    const double cost = estimated_cost(params, cfg, topology);
    if (cost > cfg.op_budget)
        throw Error(ErrorKind::BudgetExceeded, "estimated cost " + std::to_string(cost) +
                                                   " exceeds budget " + std::to_string(cfg.op_budget));
    WordSums out;
    out.topology = topology;
    out.aleph = cfg.aleph;
    out.colors = static_cast<int>(params.layers()) + 1;
    const auto words = word_count(out.colors, out.aleph);
    const auto n = static_cast<Eigen::Index>(params.n), p = static_cast<Eigen::Index>(params.p);
    if (topology == Topology::Cycle) out.scalar.assign(words, 0.0);
    else out.pair.assign(words, Eigen::MatrixXd::Zero(n, n));
    const ScaledInputs in = scale_inputs(obs);
    if (cfg.backend == Backend::ExactEnumeration) exact_sums(in, out, n, p);
    else transfer_sums(in, out, n, p, cfg.b_collision_correction);
    return out;
}

double detection_from_sums(const WordSums& sums, const FamilyWeights& family) {
    double total = 0.0;
    for_each_family_word(family, [&](const ColorWord& w, double xi) {
        total += xi * sums.scalar[word_index(w.letters, sums.colors)];
    });
    return total / (2.0 * sums.aleph) / std::sqrt(family.beta);
}

Eigen::MatrixXd recovery_from_sums(const WordSums& sums, const FamilyWeights& family, std::size_t n) {
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(N, N);
    for_each_family_word(family, [&](const ColorWord& w, double xi) {
        phi += xi * sums.pair[word_index(w.letters, sums.colors)];
    });
    phi *= static_cast<double>(n) / family.beta;
    Eigen::MatrixXd sym = 0.5 * (phi + phi.transpose());
    sym.diagonal().setZero();
    return sym;
}

StatisticReport detection_statistic(const Observation& obs, const ModelParams& params,
                                    const StatisticConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const FamilyWeights family = enumerate_cycles(cfg.aleph, params);
    Observation view = obs;
    view.params = params;
    const WordSums sums = word_sums(view, cfg, Topology::Cycle);
    StatisticReport r;
    r.backend = cfg.backend;
    r.beta = family.beta;
    r.value = detection_from_sums(sums, family);
    r.tau = cfg.threshold_c * std::sqrt(family.beta);
    r.decision = detection_test(r);
    r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

bool detection_test(const StatisticReport& report) { return report.value >= report.tau; }

StatisticReport recovery_matrix(const Observation& obs, const ModelParams& params, const StatisticConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const FamilyWeights family = enumerate_paths(cfg.aleph, params);
    Observation view = obs;
    view.params = params;
    const WordSums sums = word_sums(view, cfg, Topology::Path);
    StatisticReport r;
    r.backend = cfg.backend;
    r.beta = family.beta;
    r.matrix = recovery_from_sums(sums, family, params.n);
    r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

StatisticReport transfer_backend(const Observation& obs, const ModelParams& params, const StatisticConfig& cfg,
                                 Topology topology) {
    StatisticConfig c = cfg;
    c.backend = Backend::TransferApprox;
    return topology == Topology::Cycle ? detection_statistic(obs, params, c) : recovery_matrix(obs, params, c);
}

}  // namespace cmsbm
