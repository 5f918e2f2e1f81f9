#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace cmsbm {

// Simple undirected graph on n vertices. Edges are kept sorted with i < j;
// membership queries go through a packed adjacency bitset.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::uint32_t n);

    std::uint32_t size() const { return n_; }
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges() const { return edges_; }

    // Inserts {i, j}; self-loops and duplicates are ignored.
    void add_edge(std::uint32_t i, std::uint32_t j);
    bool has_edge(std::uint32_t i, std::uint32_t j) const;
    void finalize();  // sorts the edge list

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.n_ == b.n_ && a.edges_ == b.edges_;
    }

private:
    std::uint32_t n_ = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
    std::vector<std::uint64_t> bits_;
};

}  // namespace cmsbm
