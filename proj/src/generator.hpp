#ifndef RLU_GENERATOR_HPP
#define RLU_GENERATOR_HPP

#include <memory>

#include "constraints.hpp"
#include "penalty.hpp"

namespace rlu {

/// Orientation of the value-BSDE driver. The paper's displayed equations mix
/// drift signs between sections; both readings are implemented and the
/// default is the one calibrated against the brute-force saddle oracle:
///  - calibrated: f(t,z) = sup_c (a ln c - ah c)/(ah)
///        + sup_{pi in A} [ pi s th - |pi s|^2/2 - g(t, A(z + pi s))/A ],
///    A = ah(t) exp(-int delta);
///  - literal_paper: f(t,z) = exp(-int delta)/(ah) sup_c (...)
///        - inf_{pi in A} [ g(t, A(z + pi s))/(ah) + pi s th ]
/// with g always the first-principles generator
///    g(t,z) = beta exp(-int delta) h*( exp(int delta) z / beta ).
enum class Convention { calibrated, literal_paper };

inline const char* convention_name(Convention c) {
    return c == Convention::calibrated ? "calibrated" : "literal-paper";
}

/// Closed-form solution of a h'(t) = a delta_t h(t) - alpha, h(T) = 1;
/// exact for piecewise-constant delta. Requires 0 <= t <= T.
double h_of_t(const ProblemWeights& weights, double t);

/// rho(t) = alpha / (alpha_bar * h(t)).
double rho_of_t(const ProblemWeights& weights, double t);

struct FResult {
    double value = 0.0;
    RowVec pi;
    double c = 0.0;
    int pi_piece = -1;
    int c_piece = -1;
    bool iteration_cap_hit = false;
};

/// Bundles the market, weights, penalty and constraint sets and evaluates the
/// two BSDE generators g and f together with their pointwise optimizers.
class GeneratorBundle {
public:
    GeneratorBundle(const MarketModel& model, const ProblemWeights& weights,
                    const Penalty& penalty, const ConstraintSet& portfolio_set,
                    const ConstraintSet& consumption_set,
                    Convention convention = Convention::calibrated);

    const MarketModel& model() const { return *model_; }
    const ProblemWeights& weights() const { return *weights_; }
    const Penalty& penalty() const { return *penalty_; }
    const ConstraintSet& portfolio_set() const { return *aset_; }
    const ConstraintSet& consumption_set() const { return *cset_; }
    Convention convention() const { return convention_; }

    double h(double t) const { return h_of_t(*weights_, t); }
    double rho(double t) const { return rho_of_t(*weights_, t); }

    /// First-principles g(t, z); +infinity propagates from the conjugate.
    double g(double t, const Vec& z) const;
    /// g(t, w) = quad * |w|^2 when the penalty is quadratic.
    std::optional<double> g_quad_coeff(double t) const;
    /// The printed entropic form (1/beta) exp(int delta) |z|^2 (twice the
    /// first-principles value); exposed for the literal-paper cross-checks.
    double g_literal_entropic(double t, const Vec& z) const;

    /// Value generator with its pointwise optimizers, per the bundle's
    /// convention.
    FResult f(double t, const Vec& z) const;
    FResult f_with_convention(double t, const Vec& z, Convention which) const;

    /// Closed-form entropic f (quadratic penalty, weight 1, and for alpha > 0
    /// the unconstrained consumption optimum alpha/(a h(t)) must lie in C).
    /// literal_paper evaluates the printed formula verbatim; calibrated is
    /// the completed-square form matching f() under the calibrated convention.
    double f_closed_form_entropic(double t, const Vec& z, Convention which) const;

    /// Raw objective phi(pi) whose inf over A enters f under `which`; used by
    /// optimizer-consistency checks.
    double portfolio_objective(double t, const Vec& z, const RowVec& pi, Convention which) const;
    double consumption_objective(double t, double c) const;

    Vec theta(double t) const;
    const ImageSet& image_set(double t) const;
    const Mat& sigma(double t) const { return model_->volatility(t); }

private:
    const MarketModel* model_;
    const ProblemWeights* weights_;
    const Penalty* penalty_;
    const ConstraintSet* aset_;
    const ConstraintSet* cset_;
    Convention convention_;
    std::vector<ImageSet> images_; // one per volatility piece
};

} // namespace rlu

#endif
