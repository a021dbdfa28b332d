#include "model.hpp"

#include <cmath>

namespace rlu {

void MarketModel::validate() const {
    if (num_assets < 1) throw config_error("model.d: need at least one asset");
    if (brownian_dim < num_assets)
        throw config_error("model.m: brownian_dim must satisfy d <= m");
    if (!(eps > 0.0) || !(K > eps))
        throw config_error("model.eps/K: need 0 < eps < K");
    if (drift.pieces() == 0 || volatility.pieces() == 0)
        throw config_error("model: drift/volatility must have at least one piece");
    for (const Vec& b : drift.values())
        if (b.size() != num_assets) throw config_error("model.b: piece has wrong dimension");
    for (const Mat& s : volatility.values())
        if (s.rows() != num_assets || s.cols() != brownian_dim)
            throw config_error("model.sigma: piece has wrong shape");
    EllipticityReport rep = check_ellipticity(*this);
    if (!rep.ok)
        throw config_error("model.sigma: sigma*sigma^T violates ellipticity bounds [eps, K]");
}

void ProblemWeights::validate() const {
    if (!(initial_wealth > 0.0)) throw config_error("weights.x: initial_wealth must be strictly positive");
    if (!(horizon > 0.0)) throw config_error("weights.T: horizon must be positive");
    if (!(alpha_bar > 0.0)) throw config_error("weights.alpha_bar: must be positive");
    if (!(beta > 0.0)) throw config_error("weights.beta: must be positive");
    if (alpha < 0.0) throw config_error("weights.alpha: must be nonnegative");
    for (double d : delta.values())
        if (d < 0.0) throw config_error("weights.delta: discount rate must be nonnegative");
}

Vec market_price_of_risk(const MarketModel& model, double t) {
    const Mat& sigma = model.volatility(t);
    const Vec& b = model.drift(t);
    Mat gram = sigma * sigma.transpose();
    Eigen::LDLT<Mat> ldlt(gram);
    if (ldlt.info() != Eigen::Success)
        throw solver_error("market_price_of_risk: sigma*sigma^T factorization failed");
    Vec mid = ldlt.solve(b);
    double resid = (gram * mid - b).norm();
    double scale = std::max(1.0, b.norm());
    if (!(resid <= 1e-9 * scale) || !mid.allFinite())
        throw solver_error("market_price_of_risk: sigma*sigma^T is numerically singular");
    return sigma.transpose() * mid;
}

EllipticityReport check_ellipticity(const MarketModel& model) {
    EllipticityReport rep;
    rep.worst_eigen_low = std::numeric_limits<double>::infinity();
    rep.worst_eigen_high = 0.0;
    for (const Mat& sigma : model.volatility.values()) {
        Eigen::SelfAdjointEigenSolver<Mat> es(sigma * sigma.transpose());
        rep.worst_eigen_low = std::min(rep.worst_eigen_low, es.eigenvalues().minCoeff());
        rep.worst_eigen_high = std::max(rep.worst_eigen_high, es.eigenvalues().maxCoeff());
    }
    rep.ok = rep.worst_eigen_low >= model.eps - 1e-12 && rep.worst_eigen_high <= model.K + 1e-12;
    return rep;
}

std::vector<double> simulate_wealth(const MarketModel& model, const ProblemWeights& weights,
                                    const Strategy& strategy, const Mat& brownian_increments) {
    const int n = static_cast<int>(brownian_increments.rows());
    if (brownian_increments.cols() != model.brownian_dim)
        throw invalid_error("simulate_wealth: increment columns must equal brownian_dim");
    if (n < 1) throw invalid_error("simulate_wealth: need at least one step");
    const double dt = weights.horizon / n;
    for (double cv : strategy.c.values())
        if (cv < 0.0) throw invalid_error("simulate_wealth: consumption rate must be nonnegative");

    std::vector<double> path(static_cast<std::size_t>(n) + 1);
    const double x = weights.initial_wealth;
    path[0] = x;
    double log_return = 0.0; // cumulative log X_t / x, keeps the path exactly homogeneous in x
    for (int k = 0; k < n; ++k) {
        const double tk = k * dt;
        const RowVec& pi = strategy.pi(tk);
        if (pi.size() != model.num_assets)
            throw invalid_error("simulate_wealth: strategy dimension mismatch");
        const Mat& sigma = model.volatility(tk);
        RowVec pisig = pi * sigma;
        Vec theta = market_price_of_risk(model, tk);
        double c = strategy.c(tk);
        log_return += pisig.dot(brownian_increments.row(k));
        log_return += (pisig.dot(theta) - 0.5 * pisig.squaredNorm() - c) * dt;
        path[static_cast<std::size_t>(k) + 1] = x * std::exp(log_return);
    }
    return path;
}

} // namespace rlu
