#include "dffls/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

namespace dffls {

namespace {

// BFS reachability over the edge set {(i,j): M(i,j) > 0}, following rows
// (i reaches j if M(i,j) > 0). Self-loops are irrelevant for reachability.
std::vector<char> reachable_from(const Eigen::MatrixXd& M, int start) {
    const int n = static_cast<int>(M.rows());
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::queue<int> q;
    seen[static_cast<size_t>(start)] = 1;
    q.push(start);
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v = 0; v < n; ++v) {
            if (M(u, v) > 0.0 && !seen[static_cast<size_t>(v)]) {
                seen[static_cast<size_t>(v)] = 1;
                q.push(v);
            }
        }
    }
    return seen;
}

bool strongly_connected_matrix(const Eigen::MatrixXd& M) {
    const auto fwd = reachable_from(M, 0);
    if (std::find(fwd.begin(), fwd.end(), 0) != fwd.end()) return false;
    const Eigen::MatrixXd Mt = M.transpose();
    const auto bwd = reachable_from(Mt, 0);
    return std::find(bwd.begin(), bwd.end(), 0) == bwd.end();
}

// Strongly connected components via Kosaraju, returned as component index
// per node (components are numbered arbitrarily).
std::vector<int> scc_components(const Eigen::MatrixXd& M) {
    const int n = static_cast<int>(M.rows());
    std::vector<int> order;
    order.reserve(static_cast<size_t>(n));
    std::vector<char> seen(static_cast<size_t>(n), 0);
    // iterative DFS recording finish order
    for (int s = 0; s < n; ++s) {
        if (seen[static_cast<size_t>(s)]) continue;
        std::vector<std::pair<int, int>> stack{{s, 0}};
        seen[static_cast<size_t>(s)] = 1;
        while (!stack.empty()) {
            auto& [u, next] = stack.back();
            bool advanced = false;
            for (int v = next; v < n; ++v) {
                if (M(u, v) > 0.0 && !seen[static_cast<size_t>(v)]) {
                    next = v + 1;
                    seen[static_cast<size_t>(v)] = 1;
                    stack.emplace_back(v, 0);
                    advanced = true;
                    break;
                }
            }
            if (!advanced) {
                order.push_back(u);
                stack.pop_back();
            }
        }
    }
    std::vector<int> comp(static_cast<size_t>(n), -1);
    int ncomp = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (comp[static_cast<size_t>(*it)] >= 0) continue;
        std::vector<int> stack{*it};
        comp[static_cast<size_t>(*it)] = ncomp;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < n; ++v) {
                if (M(v, u) > 0.0 && comp[static_cast<size_t>(v)] < 0) {
                    comp[static_cast<size_t>(v)] = ncomp;
                    stack.push_back(v);
                }
            }
        }
        ++ncomp;
    }
    return comp;
}

}  // namespace

WeightedDigraph::WeightedDigraph(Eigen::MatrixXd adjacency)
    : adjacency_(std::move(adjacency)) {
    const int n = static_cast<int>(adjacency_.rows());
    if (n < 1 || adjacency_.cols() != n) {
        throw DimensionMismatch("adjacency matrix must be square and nonempty");
    }
    for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n; ++j) {
            const double a = adjacency_(i, j);
            if (!std::isfinite(a) || a < 0.0) {
                std::ostringstream os;
                os << "adjacency entry (" << i << "," << j << ") = " << a
                   << " must be finite and nonnegative";
                throw PreconditionViolated(os.str());
            }
            row_sum += a;
        }
        if (std::abs(row_sum - 1.0) > kStochasticTol) {
            std::ostringstream os;
            os << "adjacency row " << i << " sums to " << row_sum << ", expected 1";
            throw PreconditionViolated(os.str());
        }
        if (adjacency_(i, i) <= 0.0) {
            std::ostringstream os;
            os << "self-loop weight a_" << i << i << " must be positive";
            throw PreconditionViolated(os.str());
        }
    }
}

bool is_connected_undirected(const WeightedDigraph& g) {
    const Eigen::MatrixXd& A = g.adjacency();
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw AsymmetricAdjacency("adjacency matrix is not symmetric");
    }
    const auto seen = reachable_from(A, 0);
    return std::find(seen.begin(), seen.end(), 0) == seen.end();
}

int diameter(const WeightedDigraph& g) {
    if (!is_connected_undirected(g)) {
        throw Disconnected("diameter requires a connected graph");
    }
    const int n = g.size();
    const Eigen::MatrixXd& A = g.adjacency();
    int diam = 0;
    for (int s = 0; s < n; ++s) {
        std::vector<int> dist(static_cast<size_t>(n), -1);
        std::queue<int> q;
        dist[static_cast<size_t>(s)] = 0;
        q.push(s);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int v = 0; v < n; ++v) {
                if (v != u && A(u, v) > 0.0 && dist[static_cast<size_t>(v)] < 0) {
                    dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
                    q.push(v);
                }
            }
        }
        diam = std::max(diam, *std::max_element(dist.begin(), dist.end()));
    }
    return diam;
}

double matrix_power_min_entry(const WeightedDigraph& g, int k) {
    if (k < 1) throw PreconditionViolated("matrix power exponent must be >= 1");
    Eigen::MatrixXd Ak = g.adjacency();
    for (int i = 1; i < k; ++i) Ak = Ak * g.adjacency();
    return Ak.minCoeff();
}

bool is_balanced(const WeightedDigraph& g) {
    const Eigen::VectorXd col_sums = g.adjacency().colwise().sum();
    return (col_sums.array() - 1.0).abs().maxCoeff() <= 1e-12;
}

bool is_strongly_connected(const WeightedDigraph& g) {
    return strongly_connected_matrix(g.adjacency());
}

WeightedDigraph union_graphs(const std::vector<WeightedDigraph>& gs) {
    if (gs.empty()) throw DimensionMismatch("union of zero graphs");
    const int n = gs.front().size();
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
    for (const auto& g : gs) {
        if (g.size() != n) throw DimensionMismatch("union of graphs with different sizes");
        sum += g.adjacency();
    }
    return WeightedDigraph(sum / static_cast<double>(gs.size()));
}

double product_positivity_check(const std::vector<WeightedDigraph>& gs) {
    if (gs.empty()) throw DimensionMismatch("empty graph list");
    const int n = gs.front().size();
    if (static_cast<int>(gs.size()) != n) {
        throw PreconditionViolated("product positivity check needs exactly n graphs");
    }
    for (size_t k = 0; k < gs.size(); ++k) {
        if (gs[k].size() != n) throw DimensionMismatch("graphs must share the vertex set");
        if (!is_strongly_connected(gs[k])) {
            std::ostringstream os;
            os << "graph " << k << " is not strongly connected";
            throw PreconditionViolated(os.str());
        }
    }
    Eigen::MatrixXd prod = gs.front().adjacency();
    for (size_t k = 1; k < gs.size(); ++k) prod = prod * gs[k].adjacency();
    return prod.minCoeff();
}

MarkovTopology::MarkovTopology(std::vector<WeightedDigraph> graphs,
                               Eigen::MatrixXd transition, Eigen::VectorXd initial_distribution)
    : graphs_(std::move(graphs)),
      transition_(std::move(transition)),
      initial_(std::move(initial_distribution)) {
    if (graphs_.empty()) throw DimensionMismatch("switching set must be nonempty");
    const int s = static_cast<int>(graphs_.size());
    const int n = graphs_.front().size();
    for (const auto& g : graphs_) {
        if (g.size() != n) throw DimensionMismatch("all graphs must share the vertex set");
    }
    if (transition_.rows() != s || transition_.cols() != s) {
        throw DimensionMismatch("transition matrix must be s x s");
    }
    for (int i = 0; i < s; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < s; ++j) {
            if (transition_(i, j) < 0.0) {
                throw PreconditionViolated("transition probabilities must be nonnegative");
            }
            row_sum += transition_(i, j);
        }
        if (std::abs(row_sum - 1.0) > 1e-12) {
            throw PreconditionViolated("transition matrix rows must sum to 1");
        }
    }
    if (initial_.size() != s) throw DimensionMismatch("initial distribution must have s entries");
    if (initial_.minCoeff() < 0.0 || std::abs(initial_.sum() - 1.0) > 1e-12) {
        throw PreconditionViolated("initial distribution must be a probability vector");
    }
}

std::pair<bool, bool> markov_is_irreducible_aperiodic(const MarkovTopology& m) {
    const Eigen::MatrixXd& P = m.transition();
    const int s = m.states();
    const bool irreducible = strongly_connected_matrix(P);

    // Period of each recurrent class via BFS levels: the class period is the
    // gcd over intra-class edges (u,v) of level[u] + 1 - level[v].
    const auto comp = scc_components(P);
    const int ncomp = 1 + *std::max_element(comp.begin(), comp.end());
    std::vector<char> recurrent(static_cast<size_t>(ncomp), 1);
    for (int u = 0; u < s; ++u) {
        for (int v = 0; v < s; ++v) {
            if (P(u, v) > 0.0 && comp[static_cast<size_t>(u)] != comp[static_cast<size_t>(v)]) {
                recurrent[static_cast<size_t>(comp[static_cast<size_t>(u)])] = 0;
            }
        }
    }
    bool aperiodic = true;
    for (int c = 0; c < ncomp; ++c) {
        if (!recurrent[static_cast<size_t>(c)]) continue;
        int root = -1;
        for (int u = 0; u < s; ++u) {
            if (comp[static_cast<size_t>(u)] == c) {
                root = u;
                break;
            }
        }
        std::vector<int> level(static_cast<size_t>(s), -1);
        std::queue<int> q;
        level[static_cast<size_t>(root)] = 0;
        q.push(root);
        int g = 0;
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int v = 0; v < s; ++v) {
                if (P(u, v) <= 0.0 || comp[static_cast<size_t>(v)] != c) continue;
                if (level[static_cast<size_t>(v)] < 0) {
                    level[static_cast<size_t>(v)] = level[static_cast<size_t>(u)] + 1;
                    q.push(v);
                } else {
                    g = std::gcd(g, std::abs(level[static_cast<size_t>(u)] + 1 -
                                             level[static_cast<size_t>(v)]));
                }
            }
        }
        if (g != 1) {
            aperiodic = false;
            break;
        }
    }
    return {irreducible, aperiodic};
}

std::vector<int> markov_sample_path(const MarkovTopology& m, int horizon,
                                    std::mt19937_64& rng) {
    if (horizon < 1) throw PreconditionViolated("horizon must be >= 1");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const auto draw = [&](const auto& weights, int count) {
        double u = unif(rng);
        for (int j = 0; j < count; ++j) {
            u -= weights(j);
            if (u <= 0.0) return j;
        }
        return count - 1;
    };
    std::vector<int> path;
    path.reserve(static_cast<size_t>(horizon));
    int state = draw(m.initial_distribution(), m.states());
    path.push_back(state);
    for (int t = 1; t < horizon; ++t) {
        state = draw(m.transition().row(state), m.states());
        path.push_back(state);
    }
    return path;
}

int markov_positivity_index(const MarkovTopology& m, int limit) {
    Eigen::MatrixXd Pl = m.transition();
    for (int l = 1; l <= limit; ++l) {
        if (Pl.minCoeff() > 0.0) return l;
        Pl = Pl * m.transition();
    }
    return -1;
}

}  // namespace dffls
