#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cmsbm/params.hpp"

namespace cmsbm {

enum class Topology { Cycle, Path };

// Letter 0 stands for an a-b-a segment through a fresh feature vertex;
// letter l >= 1 for a single edge of layer l. A cycle word has one letter
// per a-vertex; a path word of length aleph spans aleph + 1 a-vertices.
struct ColorWord {
    Topology topology = Topology::Cycle;
    std::vector<std::uint8_t> letters;

    std::size_t size() const { return letters.size(); }
    friend bool operator==(const ColorWord&, const ColorWord&) = default;
    friend auto operator<=>(const ColorWord& a, const ColorWord& b) { return a.letters <=> b.letters; }
};

struct DifCounts {
    int dif0 = 0;  // adjacent letter pairs {0, l}
    int dif = 0;   // adjacent letter pairs {l, l'} with l != l', both nonzero
};

struct FamilyClass {
    ColorWord word;  // canonical
    int aut = 1;
    int dif0 = 0;
    int dif = 0;
    std::vector<int> counts;  // letters of each color 0..L
    double xi = 0.0;
};

struct FamilyWeights {
    Topology topology = Topology::Cycle;
    int aleph = 0;
    int colors = 0;  // L + 1
    std::vector<FamilyClass> classes;
    double beta = 0.0;
};

DifCounts dif_counts(const ColorWord& w);
std::vector<int> color_counts(const ColorWord& w, int colors);
ColorWord canonical_form(const ColorWord& w);
// Size of the stabilizer of w in the dihedral group (cycles) or {id, reverse}.
int automorphism_count(const ColorWord& w);
// Distinct words equivalent to w, in lexicographic order.
std::vector<ColorWord> orbit(const ColorWord& w);

// Walk weight from the closed form: rho^(dif0 + 2 dif) times the square
// roots of the channel strengths, one per letter.
double xi_weight(const ColorWord& w, const ModelParams& params);

// Pairwise decomposition of the walk weight. step(c, c') is the factor for
// letter c' following c; start(c) opens a path.
struct TransferTable {
    Eigen::VectorXd start;
    Eigen::MatrixXd step;
};
TransferTable per_edge_weights(const ModelParams& params);
double xi_from_table(const ColorWord& w, const TransferTable& table);

FamilyWeights enumerate_cycles(int aleph, const ModelParams& params,
                               std::uint64_t word_budget = 10'000'000);
// leaf_restricted is accepted for symmetry with the two path families; in the
// word encoding both leaves are always a-vertices, so it has no effect.
FamilyWeights enumerate_paths(int aleph, const ModelParams& params, bool leaf_restricted = false,
                              std::uint64_t word_budget = 10'000'000);

// Subfamily of classes whose letters all equal color, with its own beta.
FamilyWeights monochromatic(const FamilyWeights& family, int color);

// Mixed-radix index of a word with base `colors`, most significant first.
std::uint64_t word_index(const std::vector<std::uint8_t>& letters, int colors);
std::vector<std::uint8_t> word_from_index(std::uint64_t index, int length, int colors);

std::string word_string(const ColorWord& w);

struct BetaBoundsReport {
    std::vector<int> alephs;
    std::vector<double> ratio;            // beta / sigma_plus^aleph
    std::vector<double> corrected_ratio;  // cycles: ratio * aleph^2; paths: ratio
    double band = 0.0;                    // max / min of corrected_ratio
    double fitted_D = 0.0;
    bool violated = false;
};

// Checks the growth of beta against sigma_plus^aleph along a sequence of
// families of one topology computed from the same params.
BetaBoundsReport beta_bounds_check(std::span<const FamilyWeights> sequence, const ModelParams& params,
                                   double band_limit = 20.0);

}  // namespace cmsbm
