#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dffls/errors.hpp"
#include "dffls/scenario.hpp"

namespace dffls {

// Closed-form solution of the diffusion forgetting-factor least squares
// problem at one time index, computed without the recursion.
struct BatchSolution {
    std::vector<Eigen::MatrixXd> P;          // per sensor, P_{t+1,i}
    std::vector<Eigen::VectorXd> theta_hat;  // per sensor
};

// Information-vector unrolling. With q_{t,i} = P_{t,i}^{-1} theta_hat_{t,i}
// the combine/adapt recursions stack into
//   Q_{t+1} = C_t (alpha Q_t + b_t),  b_t = col(phi_{t,j} y_{t+1,j}),
// so with M(t+1,k) = C_t C_{t-1} ... C_k (entrywise weights of the data
// from step k as seen at time t+1):
//   P_{t+1,i}^{-1} = sum_j sum_{k=0}^t alpha^{t-k} M(t+1,k)(i,j) phi_{k,j} phi_{k,j}^T
//                  + sum_j alpha^{t+1} M(t+1,0)(i,j) P_{0,j}^{-1}
//   theta_hat_{t+1,i} = P_{t+1,i} [ analogous sums with phi y and P_0^{-1} theta_0 ].
// `combine_weights` holds C_0..C_t (row i = sensor i's weights); for a fixed
// topology all entries are equal and M(t+1,k) = A^{t+1-k}. The switching case
// passes the per-step matrices from the recorded r(t) path.
BatchSolution batch_solve(const std::vector<std::vector<Eigen::VectorXd>>& phi,  // [t+1][n]
                          const std::vector<Eigen::VectorXd>& y,                 // [t+1], each n
                          const std::vector<Eigen::MatrixXd>& combine_weights,   // [t+1], each n x n
                          double alpha, const std::vector<Eigen::MatrixXd>& P0,
                          const std::vector<Eigen::VectorXd>& theta_hat0);

// Convenience overload for a fixed topology: replays the scenario data and
// solves at the given time index (1 <= t_plus_1 <= horizon).
BatchSolution batch_solve(const Scenario& scenario, const std::vector<StepData>& data,
                          const Eigen::MatrixXd& combine_matrix, int t_plus_1);

// Smallest eigenvalue of the realized window matrix
//   (1 / (n (1+h))) sum_i sum_k phi_{k,i} phi_{k,i}^T / (1 + |phi_{k,i}|^2)
// over the supplied window of regressors ([h][n]).
double brute_force_lambda(const std::vector<std::vector<Eigen::VectorXd>>& window, int n, int h);

}  // namespace dffls
