#include "cmsbm/families.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmsbm/error.hpp"
#include "cmsbm/thresholds.hpp"

namespace cmsbm {

namespace {

bool is_cycle(const ColorWord& w) { return w.topology == Topology::Cycle; }

// Every image of w under the symmetry group of its topology, identity first.
std::vector<std::vector<std::uint8_t>> images(const ColorWord& w) {
    std::vector<std::vector<std::uint8_t>> out;
    const auto& a = w.letters;
    const std::size_t m = a.size();
    if (!is_cycle(w)) {
        out.push_back(a);
        out.emplace_back(a.rbegin(), a.rend());
        return out;
    }
    out.reserve(2 * m);
    for (std::size_t r = 0; r < m; ++r) {
        std::vector<std::uint8_t> rot(m), ref(m);
        for (std::size_t i = 0; i < m; ++i) {
            rot[i] = a[(i + r) % m];
            ref[i] = a[(r + m - i) % m];
        }
        out.push_back(std::move(rot));
        out.push_back(std::move(ref));
    }
    return out;
}

double channel_root(std::uint8_t c, const ModelParams& params) {
    return c == 0 ? std::sqrt(params.spike_strength()) : std::sqrt(params.layer_strength(c - 1u));
}

void check_letters(const ColorWord& w, const ModelParams& params) {
    for (auto c : w.letters)
        if (c > params.layers())
            throw Error(ErrorKind::IndexOutOfRange, "letter " + std::to_string(c) + " exceeds L");
}

FamilyWeights enumerate(Topology topo, int aleph, const ModelParams& params, std::uint64_t budget) {
    validate_params(params);
    const int colors = static_cast<int>(params.layers()) + 1;
    double total = 1.0;
    for (int i = 0; i < aleph; ++i) total *= colors;
    if (total > static_cast<double>(budget))
        throw Error(ErrorKind::BudgetExceeded,
                    "(L+1)^aleph = " + std::to_string(static_cast<std::uint64_t>(total)) +
                        " words exceeds the enumeration budget");
    FamilyWeights fam;
    fam.topology = topo;
    fam.aleph = aleph;
    fam.colors = colors;
    const auto count = static_cast<std::uint64_t>(total);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        ColorWord w{topo, word_from_index(idx, aleph, colors)};
        // Words are visited in lexicographic order, so the first member of
        // each orbit is its canonical representative.
        if (canonical_form(w) != w) continue;
        FamilyClass fc;
        fc.aut = automorphism_count(w);
        const DifCounts d = dif_counts(w);
        fc.dif0 = d.dif0;
        fc.dif = d.dif;
        fc.counts = color_counts(w, colors);
        fc.xi = xi_weight(w, params);
        fc.word = std::move(w);
        fam.beta += fc.xi * fc.xi / fc.aut;
        fam.classes.push_back(std::move(fc));
    }
    return fam;
}

}  // namespace

std::uint64_t word_index(const std::vector<std::uint8_t>& letters, int colors) {
    std::uint64_t idx = 0;
    for (auto c : letters) idx = idx * static_cast<std::uint64_t>(colors) + c;
    return idx;
}

std::vector<std::uint8_t> word_from_index(std::uint64_t index, int length, int colors) {
    std::vector<std::uint8_t> w(static_cast<std::size_t>(length));
    for (int i = length - 1; i >= 0; --i) {
        w[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(index % static_cast<std::uint64_t>(colors));
        index /= static_cast<std::uint64_t>(colors);
    }
    return w;
}

std::string word_string(const ColorWord& w) {
    std::string s;
    for (auto c : w.letters) s += std::to_string(c);
    return s;
}

DifCounts dif_counts(const ColorWord& w) {
    DifCounts d;
    const std::size_t m = w.size();
    const std::size_t pairs = is_cycle(w) ? m : (m ? m - 1 : 0);
    for (std::size_t i = 0; i < pairs; ++i) {
        const auto a = w.letters[i], b = w.letters[(i + 1) % m];
        if (a == b) continue;
        if (a == 0 || b == 0) ++d.dif0; else ++d.dif;
    }
    return d;
}

std::vector<int> color_counts(const ColorWord& w, int colors) {
    std::vector<int> c(static_cast<std::size_t>(colors), 0);
    for (auto l : w.letters) ++c.at(l);
    return c;
}

ColorWord canonical_form(const ColorWord& w) {
    auto all = images(w);
    return {w.topology, *std::min_element(all.begin(), all.end())};
}

int automorphism_count(const ColorWord& w) {
    const auto all = images(w);
    return static_cast<int>(std::count(all.begin(), all.end(), w.letters));
}

std::vector<ColorWord> orbit(const ColorWord& w) {
    auto all = images(w);
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    std::vector<ColorWord> out;
    for (auto& a : all) out.push_back({w.topology, std::move(a)});
    return out;
}

double xi_weight(const ColorWord& w, const ModelParams& params) {
    check_letters(w, params);
    const DifCounts d = dif_counts(w);
    double xi = std::pow(params.rho, d.dif0 + 2 * d.dif);
    for (auto c : w.letters) xi *= channel_root(c, params);
    return xi;
}

TransferTable per_edge_weights(const ModelParams& params) {
    validate_params(params);
    const auto colors = static_cast<Eigen::Index>(params.layers() + 1);
    TransferTable t;
    t.start.resize(colors);
    t.step.resize(colors, colors);
    for (Eigen::Index c = 0; c < colors; ++c) t.start(c) = channel_root(static_cast<std::uint8_t>(c), params);
    for (Eigen::Index c = 0; c < colors; ++c)
        for (Eigen::Index d = 0; d < colors; ++d) {
            double corr = 1.0;
            if (c != d) corr = (c == 0 || d == 0) ? params.rho : params.rho * params.rho;
            t.step(c, d) = corr * t.start(d);
        }
    return t;
}

double xi_from_table(const ColorWord& w, const TransferTable& table) {
    const auto& a = w.letters;
    const std::size_t m = a.size();
    if (m == 0) return 1.0;
    if (is_cycle(w)) {
        double xi = 1.0;
        for (std::size_t i = 0; i < m; ++i) xi *= table.step(a[i], a[(i + 1) % m]);
        return xi;
    }
    double xi = table.start(a[0]);
    for (std::size_t i = 0; i + 1 < m; ++i) xi *= table.step(a[i], a[i + 1]);
    return xi;
}

FamilyWeights enumerate_cycles(int aleph, const ModelParams& params, std::uint64_t word_budget) {
    if (aleph < 3)
        throw Error(ErrorKind::InvalidParams, "aleph: cycles need at least 3 a-vertices");
    return enumerate(Topology::Cycle, aleph, params, word_budget);
}

FamilyWeights enumerate_paths(int aleph, const ModelParams& params, bool /*leaf_restricted*/,
                              std::uint64_t word_budget) {
    if (aleph < 1) throw Error(ErrorKind::InvalidParams, "aleph: paths need at least 1 letter");
    return enumerate(Topology::Path, aleph, params, word_budget);
}

FamilyWeights monochromatic(const FamilyWeights& family, int color) {
    FamilyWeights out;
    out.topology = family.topology;
    out.aleph = family.aleph;
    out.colors = family.colors;
    for (const auto& fc : family.classes) {
        if (fc.counts.at(static_cast<std::size_t>(color)) != family.aleph) continue;
        out.classes.push_back(fc);
        out.beta += fc.xi * fc.xi / fc.aut;
    }
    return out;
}

BetaBoundsReport beta_bounds_check(std::span<const FamilyWeights> sequence, const ModelParams& params,
                                   double band_limit) {
    BetaBoundsReport r;
    const double sigma = sigma_plus(params);
    double lo = INFINITY, hi = 0.0, d = 0.0;
    for (const auto& fam : sequence) {
        const double ratio = fam.beta / std::pow(sigma, fam.aleph);
        const double corrected =
            fam.topology == Topology::Cycle ? ratio * fam.aleph * fam.aleph : ratio;
        r.alephs.push_back(fam.aleph);
        r.ratio.push_back(ratio);
        r.corrected_ratio.push_back(corrected);
        lo = std::min(lo, corrected);
        hi = std::max(hi, corrected);
        d = std::max({d, ratio, 1.0 / corrected});
    }
    r.band = sequence.empty() ? 1.0 : hi / lo;
    r.fitted_D = d;
    r.violated = !(r.band <= band_limit);
    return r;
}

}  // namespace cmsbm
