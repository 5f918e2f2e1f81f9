#include "cmsbm/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace cmsbm {

namespace {

using MatPtr = std::shared_ptr<const Eigen::MatrixXd>;
using VecPtr = std::shared_ptr<const Eigen::VectorXd>;

// Dense copy of the oriented value of an operand.
Eigen::MatrixXd dense(const Operand& o) {
    if (o.transposed && !o.symmetric) return o.mat->transpose();
    return *o.mat;
}

bool flipped_view(const Operand& o) { return o.transposed && !o.symmetric; }

// left * diag(u) * right, with each side read through its orientation.
Eigen::MatrixXd product(const Operand& left, const Eigen::VectorXd* u, const Operand& right) {
    const bool lt = flipped_view(left), rt = flipped_view(right);
    const Eigen::MatrixXd& l = *left.mat;
    const Eigen::MatrixXd& r = *right.mat;
    if (u) {
        Eigen::MatrixXd scaled = rt ? Eigen::MatrixXd(u->asDiagonal() * r.transpose())
                                    : Eigen::MatrixXd(u->asDiagonal() * r);
        return lt ? Eigen::MatrixXd(l.transpose() * scaled) : Eigen::MatrixXd(l * scaled);
    }
    if (lt && rt) return l.transpose() * r.transpose();
    if (lt) return l.transpose() * r;
    if (rt) return l * r.transpose();
    return l * r;
}

UnaryFactor combine(const UnaryFactor& a, const UnaryFactor& b) {
    if (!a.vec) return b;
    if (!b.vec) return a;
    auto v = std::make_shared<Eigen::VectorXd>(a.vec->cwiseProduct(*b.vec));
    const auto& [k1, k2] = std::minmax(a.key, b.key);
    return {std::move(v), "m(" + k1 + "," + k2 + ")"};
}

}  // namespace

MatPtr ContractionMemo::find_matrix(const std::string& key) const {
    auto it = matrices_.find(key);
    return it == matrices_.end() ? nullptr : it->second;
}

void ContractionMemo::store_matrix(const std::string& key, MatPtr m) { matrices_.emplace(key, std::move(m)); }

VecPtr ContractionMemo::find_vector(const std::string& key) const {
    auto it = vectors_.find(key);
    return it == vectors_.end() ? nullptr : it->second;
}

void ContractionMemo::store_vector(const std::string& key, VecPtr v) { vectors_.emplace(key, std::move(v)); }

int TensorNetwork::add_node(Eigen::Index dim, bool output) {
    nodes_.push_back({dim, output, true, {}});
    const int id = static_cast<int>(nodes_.size()) - 1;
    if (output) {
        if (out_a_ < 0) out_a_ = id;
        else if (out_b_ < 0) out_b_ = id;
        else throw std::logic_error("at most two output nodes");
    }
    return id;
}

void TensorNetwork::add_edge(int a, int b, Operand op) { edges_.push_back({a, b, std::move(op)}); }

void TensorNetwork::multiply_node(int a, UnaryFactor f) {
    nodes_[static_cast<std::size_t>(a)].unary = combine(nodes_[static_cast<std::size_t>(a)].unary, f);
}

std::vector<std::size_t> TensorNetwork::incident(int x) const {
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < edges_.size(); ++e)
        if (edges_[e].a == x || edges_[e].b == x) out.push_back(e);
    return out;
}

void TensorNetwork::normalize(ContractionMemo* memo) {
    // Self-loops become node factors.
    for (std::size_t e = 0; e < edges_.size();) {
        if (edges_[e].a != edges_[e].b) {
            ++e;
            continue;
        }
        const Operand& op = edges_[e].op;
        const std::string key = "dg(" + op.key + ")";
        VecPtr v = memo ? memo->find_vector(key) : nullptr;
        if (!v) {
            v = std::make_shared<Eigen::VectorXd>(op.mat->diagonal());
            if (memo) memo->store_vector(key, v);
        }
        multiply_node(edges_[e].a, {v, key});
        edges_.erase(edges_.begin() + static_cast<std::ptrdiff_t>(e));
    }
    // Parallel edges become one Hadamard product, oriented low id to high id.
    for (auto& e : edges_)
        if (e.a > e.b) {
            std::swap(e.a, e.b);
            e.op = e.op.flipped();
        }
    std::stable_sort(edges_.begin(), edges_.end(),
                     [](const Edge& x, const Edge& y) { return std::pair(x.a, x.b) < std::pair(y.a, y.b); });
    std::vector<Edge> merged;
    for (std::size_t i = 0; i < edges_.size();) {
        std::size_t j = i + 1;
        while (j < edges_.size() && edges_[j].a == edges_[i].a && edges_[j].b == edges_[i].b) ++j;
        if (j == i + 1) {
            merged.push_back(std::move(edges_[i]));
            i = j;
            continue;
        }
        std::vector<std::string> keys;
        bool symmetric = true;
        for (std::size_t k = i; k < j; ++k) {
            keys.push_back(edges_[k].op.oriented_key());
            symmetric = symmetric && edges_[k].op.symmetric;
        }
        std::sort(keys.begin(), keys.end());
        std::string key = "h(";
        for (std::size_t k = 0; k < keys.size(); ++k) key += (k ? "," : "") + keys[k];
        key += ")";
        MatPtr m = memo ? memo->find_matrix(key) : nullptr;
        if (!m) {
            Eigen::MatrixXd acc = dense(edges_[i].op);
            for (std::size_t k = i + 1; k < j; ++k) acc = acc.cwiseProduct(dense(edges_[k].op));
            m = std::make_shared<Eigen::MatrixXd>(std::move(acc));
            if (memo) memo->store_matrix(key, m);
        } else if (memo) {
            ++memo->hits;
        }
        merged.push_back({edges_[i].a, edges_[i].b, Operand{m, key, false, symmetric}});
        i = j;
    }
    edges_ = std::move(merged);
}

bool TensorNetwork::eliminate_one(ContractionMemo* memo) {
    int best = -1;
    std::size_t best_deg = 3;
    for (int x = 0; x < static_cast<int>(nodes_.size()); ++x) {
        const Node& nd = nodes_[static_cast<std::size_t>(x)];
        if (!nd.alive || nd.output) continue;
        const std::size_t deg = incident(x).size();
        if (deg < best_deg) {
            best = x;
            best_deg = deg;
        }
    }
    if (best < 0) return false;
    Node& nx = nodes_[static_cast<std::size_t>(best)];
    const auto inc = incident(best);
    const Eigen::VectorXd* u = nx.unary.vec.get();
    if (best_deg == 0) {
        scalar_ *= u ? u->sum() : static_cast<double>(nx.dim);
    } else if (best_deg == 1) {
        Edge e = edges_[inc[0]];
        // Orient as (x, y).
        Operand op = e.a == best ? e.op : e.op.flipped();
        const int y = e.a == best ? e.b : e.a;
        const std::string key = "v(" + op.oriented_key() + "|" + nx.unary.key + ")";
        VecPtr v = memo ? memo->find_vector(key) : nullptr;
        if (!v) {
            Eigen::VectorXd w;
            const bool ft = flipped_view(op);
            if (u) w = ft ? Eigen::VectorXd(*op.mat * *u) : Eigen::VectorXd(op.mat->transpose() * *u);
            else w = ft ? Eigen::VectorXd(op.mat->rowwise().sum()) : Eigen::VectorXd(op.mat->colwise().sum().transpose());
            v = std::make_shared<Eigen::VectorXd>(std::move(w));
            if (memo) memo->store_vector(key, v);
        }
        edges_.erase(edges_.begin() + static_cast<std::ptrdiff_t>(inc[0]));
        multiply_node(y, {v, key});
    } else {
        const Edge e1 = edges_[inc[0]], e2 = edges_[inc[1]];
        // left oriented (y, x), right oriented (x, z).
        Operand left = e1.b == best ? e1.op : e1.op.flipped();
        const int y = e1.b == best ? e1.a : e1.b;
        Operand right = e2.a == best ? e2.op : e2.op.flipped();
        const int z = e2.a == best ? e2.b : e2.a;
        std::string key = "(" + left.oriented_key() + "*";
        if (u) key += "d[" + nx.unary.key + "]*";
        key += right.oriented_key() + ")";
        MatPtr m = memo ? memo->find_matrix(key) : nullptr;
        if (!m) {
            m = std::make_shared<Eigen::MatrixXd>(product(left, u, right));
            if (memo) {
                ++memo->products;
                memo->store_matrix(key, m);
            }
        } else if (memo) {
            ++memo->hits;
        }
        edges_.erase(edges_.begin() + static_cast<std::ptrdiff_t>(inc[1]));
        edges_.erase(edges_.begin() + static_cast<std::ptrdiff_t>(inc[0]));
        edges_.push_back({y, z, Operand{m, key, false, false}});
    }
    nx.alive = false;
    return true;
}

Eigen::MatrixXd TensorNetwork::finish(ContractionMemo* memo) {
    for (;;) {
        normalize(memo);
        if (eliminate_one(memo)) continue;
        int hub = -1;
        std::size_t hub_deg = 0;
        for (int x = 0; x < static_cast<int>(nodes_.size()); ++x) {
            const Node& nd = nodes_[static_cast<std::size_t>(x)];
            if (!nd.alive || nd.output) continue;
            const std::size_t deg = incident(x).size();
            if (deg > hub_deg) {
                hub = x;
                hub_deg = deg;
            }
        }
        if (hub < 0) break;
        // Sum the hub out value by value; sub-networks are not memoized
        // because their factors depend on the chosen value.
        const Node& h = nodes_[static_cast<std::size_t>(hub)];
        std::vector<Edge> kept;
        std::vector<std::pair<int, Eigen::MatrixXd>> spokes;
        for (const Edge& e : edges_) {
            if (e.a != hub && e.b != hub) kept.push_back(e);
            else spokes.emplace_back(e.a == hub ? e.b : e.a, dense(e.a == hub ? e.op : e.op.flipped()));
        }
        Eigen::MatrixXd total;
        for (Eigen::Index val = 0; val < h.dim; ++val) {
            const double w = h.unary.vec ? (*h.unary.vec)(val) : 1.0;
            if (w == 0.0) continue;
            TensorNetwork sub = *this;
            sub.nodes_[static_cast<std::size_t>(hub)].alive = false;
            sub.edges_ = kept;
            for (const auto& [y, d] : spokes)
                sub.multiply_node(y, {std::make_shared<Eigen::VectorXd>(d.row(val).transpose()), "#"});
            sub.scalar_ *= w;
            Eigen::MatrixXd r = sub.finish(nullptr);
            if (total.size() == 0) total = std::move(r); else total += r;
        }
        if (total.size() == 0) {
            const Eigen::Index rows = out_a_ >= 0 ? nodes_[static_cast<std::size_t>(out_a_)].dim : 1;
            const Eigen::Index cols = out_b_ >= 0 ? nodes_[static_cast<std::size_t>(out_b_)].dim : 1;
            total = Eigen::MatrixXd::Zero(rows, cols);
        }
        return total;
    }
    if (out_a_ < 0) return Eigen::MatrixXd::Constant(1, 1, scalar_);
    const Node& na = nodes_[static_cast<std::size_t>(out_a_)];
    const Node& nb = nodes_[static_cast<std::size_t>(out_b_)];
    Eigen::MatrixXd r;
    if (edges_.empty()) {
        r = Eigen::MatrixXd::Ones(na.dim, nb.dim);
    } else {
        const Edge& e = edges_.front();
        r = dense(e.a == out_a_ ? e.op : e.op.flipped());
    }
    if (na.unary.vec) r = na.unary.vec->asDiagonal() * r;
    if (nb.unary.vec) r = r * nb.unary.vec->asDiagonal();
    return scalar_ * r;
}

double TensorNetwork::contract_scalar(ContractionMemo* memo) {
    if (out_a_ >= 0) throw std::logic_error("contract_scalar with output nodes");
    return finish(memo)(0, 0);
}

Eigen::MatrixXd TensorNetwork::contract_pair(int a, int b, ContractionMemo* memo) {
    if (a != out_a_ || b != out_b_) throw std::logic_error("contract_pair expects the two output nodes in order");
    return finish(memo);
}

}  // namespace cmsbm
