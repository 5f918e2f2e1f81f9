#pragma once

#include <array>
#include <cstdint>

namespace cmsbm {

// Philox4x32 with 10 rounds. Every random quantity in the model is a pure
// function of (seed, entity tag, index), so draws never depend on the order
// in which entities are visited or on how work is split across threads.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block generate(Block counter, Key key);
};

// Entity tags. The low byte names the entity, bits 8..23 carry a layer
// index where relevant, bit 24 separates planted draws from null draws.
namespace entity {
inline constexpr std::uint32_t label = 1;
inline constexpr std::uint32_t flip = 2;
inline constexpr std::uint32_t spike = 3;
inline constexpr std::uint32_t noise = 4;
inline constexpr std::uint32_t edge = 5;
inline constexpr std::uint32_t rounding = 6;
inline constexpr std::uint32_t probe = 7;
}  // namespace entity

enum class Provenance : std::uint32_t { Planted = 0, Null = 1 };

constexpr std::uint32_t make_tag(std::uint32_t ent, std::uint32_t layer = 0,
                                 Provenance prov = Provenance::Planted) {
    return ent | (layer << 8) | (static_cast<std::uint32_t>(prov) << 24);
}

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Uniform on (0, 1), never exactly 0 or 1.
    double uniform(std::uint32_t tag, std::uint64_t index) const;

    double normal(std::uint32_t tag, std::uint64_t index) const;

    bool bernoulli(std::uint32_t tag, std::uint64_t index, double prob) const {
        return uniform(tag, index) < prob;
    }

    int sign(std::uint32_t tag, std::uint64_t index, double prob_plus) const {
        return bernoulli(tag, index, prob_plus) ? 1 : -1;
    }

private:
    Philox4x32::Block block(std::uint32_t tag, std::uint64_t index) const;

    std::uint64_t seed_;
};

}  // namespace cmsbm
