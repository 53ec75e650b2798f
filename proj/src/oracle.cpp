#include "dffls/oracle.hpp"

#include <cmath>

namespace dffls {

BatchSolution batch_solve(const std::vector<std::vector<Eigen::VectorXd>>& phi,
                          const std::vector<Eigen::VectorXd>& y,
                          const std::vector<Eigen::MatrixXd>& combine_weights, double alpha,
                          const std::vector<Eigen::MatrixXd>& P0,
                          const std::vector<Eigen::VectorXd>& theta_hat0) {
    const int steps = static_cast<int>(phi.size());
    if (steps < 1 || y.size() != phi.size() || combine_weights.size() != phi.size()) {
        throw DimensionMismatch("batch_solve: history lengths disagree");
    }
    const int n = static_cast<int>(phi.front().size());
    const int m = static_cast<int>(phi.front().front().size());
    if (static_cast<int>(P0.size()) != n || static_cast<int>(theta_hat0.size()) != n) {
        throw DimensionMismatch("batch_solve: need initial state per sensor");
    }

    // M(t+1, k) = C_t C_{t-1} ... C_k, built right-to-left so each data
    // index k gets the ordered product of all later combine matrices.
    std::vector<Eigen::MatrixXd> M(static_cast<size_t>(steps));
    Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(n, n);
    for (int k = steps - 1; k >= 0; --k) {
        acc = acc * combine_weights[static_cast<size_t>(k)];
        M[static_cast<size_t>(k)] = acc;
    }

    std::vector<Eigen::MatrixXd> P0_inv(static_cast<size_t>(n));
    std::vector<Eigen::VectorXd> q0(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        P0_inv[static_cast<size_t>(j)] =
            P0[static_cast<size_t>(j)].llt().solve(Eigen::MatrixXd::Identity(m, m));
        q0[static_cast<size_t>(j)] = P0_inv[static_cast<size_t>(j)] * theta_hat0[static_cast<size_t>(j)];
    }

    BatchSolution out;
    const double alpha_pow_T = std::pow(alpha, steps);
    for (int i = 0; i < n; ++i) {
        Eigen::MatrixXd info = Eigen::MatrixXd::Zero(m, m);
        Eigen::VectorXd q = Eigen::VectorXd::Zero(m);
        for (int j = 0; j < n; ++j) {
            const double w0 = alpha_pow_T * M[0](i, j);
            info += w0 * P0_inv[static_cast<size_t>(j)];
            q += w0 * q0[static_cast<size_t>(j)];
        }
        for (int k = 0; k < steps; ++k) {
            const double alpha_pow = std::pow(alpha, steps - 1 - k);
            for (int j = 0; j < n; ++j) {
                const double w = alpha_pow * M[static_cast<size_t>(k)](i, j);
                if (w == 0.0) continue;
                const Eigen::VectorXd& ph = phi[static_cast<size_t>(k)][static_cast<size_t>(j)];
                info += w * (ph * ph.transpose());
                q += w * ph * y[static_cast<size_t>(k)](j);
            }
        }
        Eigen::LLT<Eigen::MatrixXd> llt(info);
        Eigen::MatrixXd P = llt.solve(Eigen::MatrixXd::Identity(m, m));
        out.P.push_back(0.5 * (P + P.transpose()));
        out.theta_hat.push_back(llt.solve(q));
    }
    return out;
}

BatchSolution batch_solve(const Scenario& scenario, const std::vector<StepData>& data,
                          const Eigen::MatrixXd& combine_matrix, int t_plus_1) {
    if (t_plus_1 < 1 || t_plus_1 > static_cast<int>(data.size())) {
        throw PreconditionViolated("batch_solve: time index outside the recorded history");
    }
    std::vector<std::vector<Eigen::VectorXd>> phi;
    std::vector<Eigen::VectorXd> y;
    std::vector<Eigen::MatrixXd> C;
    for (int k = 0; k < t_plus_1; ++k) {
        phi.push_back(data[static_cast<size_t>(k)].phi);
        y.push_back(data[static_cast<size_t>(k)].y);
        C.push_back(combine_matrix);
    }
    std::vector<Eigen::MatrixXd> P0(
        static_cast<size_t>(scenario.n),
        scenario.p0_scale * Eigen::MatrixXd::Identity(scenario.m, scenario.m));
    std::vector<Eigen::VectorXd> theta0(static_cast<size_t>(scenario.n),
                                        scenario.initial_estimate());
    return batch_solve(phi, y, C, scenario.alpha, P0, theta0);
}

double brute_force_lambda(const std::vector<std::vector<Eigen::VectorXd>>& window, int n, int h) {
    if (static_cast<int>(window.size()) != h) {
        throw DimensionMismatch("brute_force_lambda: window length must equal h");
    }
    int m = -1;
    Eigen::MatrixXd gram;
    for (const auto& row : window) {
        if (static_cast<int>(row.size()) != n) {
            throw DimensionMismatch("brute_force_lambda: need n regressors per step");
        }
        for (const auto& phi : row) {
            if (m < 0) {
                m = static_cast<int>(phi.size());
                gram = Eigen::MatrixXd::Zero(m, m);
            }
            if (static_cast<int>(phi.size()) != m) {
                throw DimensionMismatch("brute_force_lambda: mixed regressor dimensions");
            }
            gram += (phi * phi.transpose()) / (1.0 + phi.squaredNorm());
        }
    }
    gram /= static_cast<double>(n) * (1.0 + static_cast<double>(h));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    return es.eigenvalues().minCoeff();
}

}  // namespace dffls
