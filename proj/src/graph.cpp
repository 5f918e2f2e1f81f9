#include "cmsbm/graph.hpp"

#include <algorithm>

namespace cmsbm {

Graph::Graph(std::uint32_t n) : n_(n), bits_((static_cast<std::size_t>(n) * n + 63) / 64, 0) {}

void Graph::add_edge(std::uint32_t i, std::uint32_t j) {
    if (i == j || has_edge(i, j)) return;
    if (i > j) std::swap(i, j);
    edges_.emplace_back(i, j);
    const std::size_t a = static_cast<std::size_t>(i) * n_ + j;
    const std::size_t b = static_cast<std::size_t>(j) * n_ + i;
    bits_[a / 64] |= std::uint64_t{1} << (a % 64);
    bits_[b / 64] |= std::uint64_t{1} << (b % 64);
}

bool Graph::has_edge(std::uint32_t i, std::uint32_t j) const {
    const std::size_t a = static_cast<std::size_t>(i) * n_ + j;
    return (bits_[a / 64] >> (a % 64)) & 1u;
}

void Graph::finalize() { std::sort(edges_.begin(), edges_.end()); }

}  // namespace cmsbm
