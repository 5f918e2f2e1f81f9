#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace cmsbm {

// A matrix factor attached to an edge of a tensor network. value(a, b) is
// mat(a, b), or mat(b, a) when transposed. The key is an expression string
// naming the stored matrix; equal keys must mean equal matrices.
struct Operand {
    std::shared_ptr<const Eigen::MatrixXd> mat;
    std::string key;
    bool transposed = false;
    bool symmetric = false;

    Operand flipped() const {
        Operand o = *this;
        o.transposed = !o.transposed;
        return o;
    }
    std::string oriented_key() const {
        return transposed && !symmetric ? "t" + key : key;
    }
};

struct UnaryFactor {
    std::shared_ptr<const Eigen::VectorXd> vec;  // null means all ones
    std::string key;
};

// Cache of intermediate matrices and vectors for one observation.
class ContractionMemo {
public:
    std::shared_ptr<const Eigen::MatrixXd> find_matrix(const std::string& key) const;
    void store_matrix(const std::string& key, std::shared_ptr<const Eigen::MatrixXd> m);
    std::shared_ptr<const Eigen::VectorXd> find_vector(const std::string& key) const;
    void store_vector(const std::string& key, std::shared_ptr<const Eigen::VectorXd> v);

    std::size_t products = 0;  // dense matrix products actually computed
    std::size_t hits = 0;

private:
    std::unordered_map<std::string, std::shared_ptr<const Eigen::MatrixXd>> matrices_;
    std::unordered_map<std::string, std::shared_ptr<const Eigen::VectorXd>> vectors_;
};

// Sum over all index assignments of the product of edge and node factors,
// with output nodes left free. Contraction repeatedly merges parallel edges,
// folds self-loops into node factors, and eliminates nodes of degree at most
// two. If no such node remains, the highest-degree node is summed out by
// explicit branching.
class TensorNetwork {
public:
    int add_node(Eigen::Index dim, bool output = false);
    void add_edge(int a, int b, Operand op);
    void multiply_node(int a, UnaryFactor f);

    // All nodes must be non-output.
    double contract_scalar(ContractionMemo* memo);
    // Exactly two output nodes a != b; returns the dim(a) x dim(b) result.
    Eigen::MatrixXd contract_pair(int a, int b, ContractionMemo* memo);

private:
    struct Edge {
        int a, b;
        Operand op;
    };
    struct Node {
        Eigen::Index dim;
        bool output;
        bool alive = true;
        UnaryFactor unary;
    };

    void normalize(ContractionMemo* memo);
    bool eliminate_one(ContractionMemo* memo);
    // Contracts everything except the outputs; 1x1 when there are none.
    Eigen::MatrixXd finish(ContractionMemo* memo);
    std::vector<std::size_t> incident(int x) const;

    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    double scalar_ = 1.0;
    int out_a_ = -1, out_b_ = -1;
};

}  // namespace cmsbm
