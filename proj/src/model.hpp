#ifndef RLU_MODEL_HPP
#define RLU_MODEL_HPP

#include <Eigen/Dense>
#include <vector>

#include "pwconst.hpp"

namespace rlu {

using Vec = Eigen::VectorXd;
using RowVec = Eigen::RowVectorXd;
using Mat = Eigen::MatrixXd;

/// Market primitives: d risky assets driven by an m-dimensional Brownian
/// motion (d <= m), zero-rate bond. Drift and volatility are piecewise
/// constant in time; sigma*sigma^T must stay uniformly elliptic in
/// [eps, K] per piece.
struct MarketModel {
    int num_assets = 1;   // d
    int brownian_dim = 1; // m
    Piecewise<Vec> drift;          // b(t), R^d
    Piecewise<Mat> volatility;     // sigma(t), R^{d x m}
    double eps = 1e-8;
    double K = 1e8;

    void validate() const;
    bool constant_coefficients() const {
        return drift.is_constant() && volatility.is_constant();
    }
};

/// Objective weights and horizon: terminal weight alpha_bar, consumption
/// weight alpha, penalty scale beta, deterministic discount rate delta,
/// horizon T and strictly positive initial wealth.
struct ProblemWeights {
    double alpha = 0.0;
    double alpha_bar = 1.0;
    double beta = 1.0;
    StepFunction delta;
    double horizon = 1.0;
    double initial_wealth = 1.0;

    void validate() const;

    double cum_delta(double t) const { return delta.integral(0.0, t); }
    double discount(double t) const { return std::exp(-cum_delta(t)); }
};

/// Deterministic strategy: portfolio fractions pi(t) in R^{1 x d} and a
/// consumption rate c(t) >= 0, both piecewise constant in time.
struct Strategy {
    Piecewise<RowVec> pi;
    StepFunction c;

    static Strategy constant(RowVec pi_value, double c_value) {
        Strategy s;
        s.pi = Piecewise<RowVec>::constant(std::move(pi_value));
        s.c = StepFunction::constant(c_value);
        return s;
    }
    bool is_constant() const { return pi.is_constant() && c.is_constant(); }
};

struct EllipticityReport {
    bool ok = false;
    double worst_eigen_low = 0.0;
    double worst_eigen_high = 0.0;
};

/// theta(t) = sigma^T (sigma sigma^T)^{-1} b(t); throws a solver error when
/// sigma sigma^T is numerically singular.
Vec market_price_of_risk(const MarketModel& model, double t);

/// Eigenvalue scan of sigma sigma^T across all pieces against [eps, K].
EllipticityReport check_ellipticity(const MarketModel& model);

/// Left-point log-Euler wealth path on the uniform grid with the given
/// Brownian increments (num_steps x m). Exact for piecewise-constant
/// strategies aligned with the grid; wealth stays strictly positive by
/// construction. Rejects c < 0.
std::vector<double> simulate_wealth(const MarketModel& model, const ProblemWeights& weights,
                                    const Strategy& strategy, const Mat& brownian_increments);

} // namespace rlu

#endif
