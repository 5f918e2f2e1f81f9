#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cmsbm/families.hpp"
#include "cmsbm/model.hpp"

namespace cmsbm {

enum class Backend { ExactEnumeration, TransferApprox };

std::string_view backend_name(Backend b);
Backend parse_backend(std::string_view name);

struct StatisticConfig {
    int aleph = 4;
    Backend backend = Backend::TransferApprox;
    double threshold_c = 0.5;
    bool b_collision_correction = true;
    double op_budget = 1e11;
};

struct StatisticReport {
    double value = 0.0;
    std::optional<Eigen::MatrixXd> matrix;
    double beta = 0.0;
    double tau = 0.0;
    std::optional<bool> decision;
    Backend backend = Backend::TransferApprox;
    double elapsed = 0.0;
};

// Walk sums resolved by color word. For word w (indexed by word_index), the
// entry is the sum over all injective placements of the word, a-vertices
// distinct and each 0-letter on its own distinct feature index, of the
// product of scaled entries: centered layers / sqrt(n) for colored letters,
// Y(i,k) Y(j,k) / sqrt(n p) for 0-letters. Cycles give scalars; paths give
// n x n matrices indexed by (first vertex, last vertex).
struct WordSums {
    Topology topology = Topology::Cycle;
    int aleph = 0;
    int colors = 0;
    std::vector<double> scalar;
    std::vector<Eigen::MatrixXd> pair;
};

WordSums word_sums(const Observation& obs, const StatisticConfig& cfg, Topology topology);

// Estimated dense-arithmetic cost of word_sums, checked against cfg.op_budget.
double estimated_cost(const ModelParams& params, const StatisticConfig& cfg, Topology topology);

// Detection statistic of a cycle family from precomputed sums.
double detection_from_sums(const WordSums& sums, const FamilyWeights& family);
// Recovery matrix of a path family from precomputed sums; symmetric, zero
// diagonal.
Eigen::MatrixXd recovery_from_sums(const WordSums& sums, const FamilyWeights& family, std::size_t n);

StatisticReport detection_statistic(const Observation& obs, const ModelParams& params,
                                    const StatisticConfig& cfg);
bool detection_test(const StatisticReport& report);
StatisticReport recovery_matrix(const Observation& obs, const ModelParams& params,
                                const StatisticConfig& cfg);

// Fast evaluation of either statistic; detection for cycles, recovery for paths.
StatisticReport transfer_backend(const Observation& obs, const ModelParams& params,
                                 const StatisticConfig& cfg, Topology topology);

}  // namespace cmsbm
