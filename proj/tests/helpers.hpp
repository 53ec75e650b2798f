#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "dffls/graph.hpp"
#include "dffls/scenario.hpp"

namespace dffls::test {

inline Eigen::MatrixXd path3() {
    Eigen::MatrixXd A(3, 3);
    A << 0.5, 0.5, 0.0, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0, 0.5, 0.5;
    return A;
}

inline Eigen::MatrixXd complete_uniform(int n) {
    return Eigen::MatrixXd::Constant(n, n, 1.0 / n);
}

inline Eigen::MatrixXd cycle_graph(int n) {
    // undirected n-cycle with self-loops, symmetric and stochastic
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        A(i, i) = 0.5;
        A(i, (i + 1) % n) = 0.25;
        A(i, (i + n - 1) % n) = 0.25;
    }
    return A;
}

inline Eigen::MatrixXd directed_cycle(int n) {
    // a_ii = 1/2, a_{i,i+1} = 1/2
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        A(i, i) = 0.5;
        A(i, (i + 1) % n) = 0.5;
    }
    return A;
}

// Random row-stochastic matrix with positive diagonal and a directed ring
// backbone, hence strongly connected.
inline Eigen::MatrixXd random_strongly_connected(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    std::bernoulli_distribution extra(0.3);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        A(i, i) = unif(rng);
        A(i, (i + 1) % n) = unif(rng);
        for (int j = 0; j < n; ++j) {
            if (j != i && j != (i + 1) % n && extra(rng)) A(i, j) = unif(rng);
        }
        A.row(i) /= A.row(i).sum();
    }
    return A;
}

inline Eigen::MatrixXd random_spd(int m, std::mt19937_64& rng, double ridge = 0.1) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd G(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) G(i, j) = gauss(rng);
    return G * G.transpose() + ridge * Eigen::MatrixXd::Identity(m, m);
}

inline Eigen::VectorXd random_vec(int m, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) v(i) = gauss(rng);
    return v;
}

// A small fully-excited scenario on a connected graph.
inline Scenario basic_scenario(int n, int m, double alpha, int horizon, std::uint64_t seed,
                               double sigma_w = 0.1) {
    Scenario s;
    s.n = n;
    s.m = m;
    s.alpha = alpha;
    s.horizon = horizon;
    s.seed = seed;
    s.topology = WeightedDigraph(complete_uniform(n));
    s.parameter.kind = ParameterProcess::Kind::Constant;
    s.parameter.theta0 = Eigen::VectorXd::LinSpaced(m, 1.0, static_cast<double>(m));
    RegressorSpec r;
    r.kind = RegressorSpec::Kind::GaussianIid;
    r.covariance = Eigen::MatrixXd::Identity(m, m);
    s.regressors.assign(static_cast<size_t>(n), r);
    s.noise.sigma_w = sigma_w;
    return s;
}

}  // namespace dffls::test
