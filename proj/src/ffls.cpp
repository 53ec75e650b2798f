#include "dffls/ffls.hpp"

#include <cmath>
#include <sstream>

namespace dffls {

IntermediateState adapt(const SensorState& state, const Eigen::VectorXd& phi, double y,
                        double alpha) {
    if (!phi.allFinite() || !std::isfinite(y)) {
        throw NonFiniteInput("adapt: regressor or observation is not finite");
    }
    if (phi.size() != state.theta_hat.size() || state.P.rows() != phi.size()) {
        throw DimensionMismatch("adapt: regressor dimension does not match state");
    }
    if (alpha <= 0.0 || alpha > 1.0) {
        throw PreconditionViolated("adapt: forgetting factor must lie in (0,1]");
    }
    const int m = static_cast<int>(phi.size());
    const Eigen::VectorXd P_phi = state.P * phi;
    const double denom = alpha + phi.dot(P_phi);

    IntermediateState out;
    out.theta_bar = state.theta_hat + P_phi * ((y - phi.dot(state.theta_hat)) / denom);
    Eigen::MatrixXd P_bar = (state.P - (P_phi * P_phi.transpose()) / denom) / alpha;
    out.P_bar = 0.5 * (P_bar + P_bar.transpose());

    // Information form via the rank-one update identity; needs P^{-1}.
    Eigen::LLT<Eigen::MatrixXd> llt(state.P);
    if (llt.info() != Eigen::Success) {
        throw PreconditionViolated("adapt: state P is not positive definite");
    }
    Eigen::MatrixXd P_inv = llt.solve(Eigen::MatrixXd::Identity(m, m));
    Eigen::MatrixXd P_bar_inv = alpha * P_inv + phi * phi.transpose();
    out.P_bar_inv = 0.5 * (P_bar_inv + P_bar_inv.transpose());
    out.q_bar = out.P_bar_inv * out.theta_bar;
    return out;
}

SensorState combine(const std::vector<std::pair<const IntermediateState*, double>>& neighbors) {
    if (neighbors.empty()) throw PreconditionViolated("combine: empty neighbor list");
    const int m = static_cast<int>(neighbors.front().first->theta_bar.size());
    double weight_sum = 0.0;
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd q = Eigen::VectorXd::Zero(m);
    for (const auto& [st, a] : neighbors) {
        if (a < 0.0) throw PreconditionViolated("combine: negative weight");
        if (st->theta_bar.size() != m) throw DimensionMismatch("combine: mixed dimensions");
        weight_sum += a;
        info += a * st->P_bar_inv;
        q += a * st->q_bar;
    }
    if (std::abs(weight_sum - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "combine: weights sum to " << weight_sum << ", expected 1";
        throw PreconditionViolated(os.str());
    }
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success) {
        throw SingularCombination("combine: weighted information sum is not invertible");
    }
    SensorState out;
    Eigen::MatrixXd P = llt.solve(Eigen::MatrixXd::Identity(m, m));
    out.P = 0.5 * (P + P.transpose());
    out.theta_hat = llt.solve(q);
    return out;
}

SensorState standard_ffls_step(const SensorState& state, const Eigen::VectorXd& phi, double y,
                               double alpha) {
    const IntermediateState bar = adapt(state, phi, y, alpha);
    return combine({{&bar, 1.0}});
}

Eigen::MatrixXd kron_identity(const Eigen::MatrixXd& weights, int m) {
    const int n = static_cast<int>(weights.rows());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n * m, n * m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            out.block(i * m, j * m, m, m) =
                weights(i, j) * Eigen::MatrixXd::Identity(m, m);
        }
    }
    return out;
}

Eigen::VectorXd error_update(const Eigen::VectorXd& prev_errors, const ErrorUpdateContext& ctx,
                             double alpha) {
    const int mn = static_cast<int>(prev_errors.size());
    const int n = static_cast<int>(ctx.weights.rows());
    if (mn % n != 0 || ctx.P_t.rows() != mn || ctx.P_next.rows() != mn ||
        ctx.P_bar_inv.rows() != mn || ctx.L.rows() != mn || ctx.L.cols() != n ||
        ctx.W_next.size() != n || ctx.delta_Theta.size() != mn) {
        throw DimensionMismatch("error_update: inconsistent block dimensions");
    }
    const int m = mn / n;
    const Eigen::MatrixXd A_kron = kron_identity(ctx.weights, m);
    const Eigen::VectorXd homogeneous =
        alpha * (ctx.P_next * (A_kron * ctx.P_t.partialPivLu().solve(prev_errors)));
    const Eigen::VectorXd forcing =
        ctx.P_next * (A_kron * (ctx.P_bar_inv * (ctx.L * ctx.W_next - ctx.delta_Theta)));
    return homogeneous - forcing;
}

}  // namespace dffls
