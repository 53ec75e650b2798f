#pragma once

#include <Eigen/Dense>
#include <random>
#include <utility>
#include <vector>

#include "dffls/errors.hpp"

namespace dffls {

// Communication topology: a weighted digraph with row-stochastic adjacency
// matrix and positive self-loop weights. Immutable after construction.
//
// An edge (j -> i) exists iff a_ij > 0 exactly; weights are constructed,
// not measured, so no epsilon is applied to existence checks.
class WeightedDigraph {
public:
    explicit WeightedDigraph(Eigen::MatrixXd adjacency);

    int size() const { return static_cast<int>(adjacency_.rows()); }
    const Eigen::MatrixXd& adjacency() const { return adjacency_; }
    double weight(int i, int j) const { return adjacency_(i, j); }

    static constexpr double kStochasticTol = 1e-12;

private:
    Eigen::MatrixXd adjacency_;
};

// True iff the graph on edges {(i,j): a_ij > 0} is connected.
// Requires A symmetric within 1e-12; throws AsymmetricAdjacency otherwise.
bool is_connected_undirected(const WeightedDigraph& g);

// Maximum over node pairs of the unweighted shortest-path hop count,
// self-loops ignored. Requires a connected undirected graph.
int diameter(const WeightedDigraph& g);

// Minimum entry of A^k. For connected undirected g and k >= diameter(g)
// the result is strictly positive.
double matrix_power_min_entry(const WeightedDigraph& g, int k);

// True iff in-degree equals out-degree at every node, i.e. column sums
// equal row sums (= 1) within 1e-12, i.e. A is doubly stochastic.
bool is_balanced(const WeightedDigraph& g);

// True iff there are directed paths from every sensor to all others.
bool is_strongly_connected(const WeightedDigraph& g);

// Union of digraphs on the same vertex set: edge set is the union and
// the adjacency is the average (1/k) * sum A_j, row-stochastic by construction.
WeightedDigraph union_graphs(const std::vector<WeightedDigraph>& gs);

// Minimum entry of the ordered product A_1 A_2 ... A_k. With k = n graphs,
// each strongly connected with positive diagonal, the product is a positive
// matrix; throws PreconditionViolated if some graph is not strongly connected.
double product_positivity_check(const std::vector<WeightedDigraph>& gs);

// A finite set of candidate topologies together with the homogeneous Markov
// chain that selects among them.
class MarkovTopology {
public:
    MarkovTopology(std::vector<WeightedDigraph> graphs, Eigen::MatrixXd transition,
                   Eigen::VectorXd initial_distribution);

    int states() const { return static_cast<int>(graphs_.size()); }
    int sensor_count() const { return graphs_.front().size(); }
    const std::vector<WeightedDigraph>& graphs() const { return graphs_; }
    const WeightedDigraph& graph(int state) const { return graphs_[static_cast<size_t>(state)]; }
    const Eigen::MatrixXd& transition() const { return transition_; }
    const Eigen::VectorXd& initial_distribution() const { return initial_; }

private:
    std::vector<WeightedDigraph> graphs_;
    Eigen::MatrixXd transition_;
    Eigen::VectorXd initial_;
};

// (irreducible, aperiodic). Irreducibility is strong connectivity of the
// digraph on {(i,j): p_ij > 0}. For a reducible chain, the aperiodicity
// flag is the conjunction over its recurrent classes (per-class period 1);
// the irreducible case is the one the theory uses.
std::pair<bool, bool> markov_is_irreducible_aperiodic(const MarkovTopology& m);

// Sample r(0) ~ initial distribution, r(t+1) ~ row r(t) of P. Returns
// `horizon` zero-based state indices; deterministic given the generator state.
std::vector<int> markov_sample_path(const MarkovTopology& m, int horizon,
                                    std::mt19937_64& rng);

// Smallest l >= 1 with all entries of P^l positive (the chain's q_0),
// or -1 if no such l <= limit exists.
int markov_positivity_index(const MarkovTopology& m, int limit = 256);

}  // namespace dffls
