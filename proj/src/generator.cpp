#include "generator.hpp"

#include <cmath>

namespace rlu {

double h_of_t(const ProblemWeights& weights, double t) {
    const double T = weights.horizon;
    if (t < -1e-12 || t > T + 1e-12) throw invalid_error("h_of_t: t outside [0, T]");
    t = std::min(std::max(t, 0.0), T);
    const StepFunction& delta = weights.delta;
    double tail = std::exp(-delta.integral(t, T));
    double running = (weights.alpha / weights.alpha_bar) * std::exp(delta.integral(0.0, t)) *
                     delta.integral_of_exp_neg_cum(t, T);
    return tail + running;
}

double rho_of_t(const ProblemWeights& weights, double t) {
    return weights.alpha / (weights.alpha_bar * h_of_t(weights, t));
}

GeneratorBundle::GeneratorBundle(const MarketModel& model, const ProblemWeights& weights,
                                 const Penalty& penalty, const ConstraintSet& portfolio_set,
                                 const ConstraintSet& consumption_set, Convention convention)
    : model_(&model), weights_(&weights), penalty_(&penalty), aset_(&portfolio_set),
      cset_(&consumption_set), convention_(convention) {
    if (portfolio_set.dim() != model.num_assets)
        throw config_error("constraints.portfolio: dimension must equal the number of assets");
    if (consumption_set.dim() != 1)
        throw config_error("constraints.consumption: must be one-dimensional");
    images_.reserve(model.volatility.pieces());
    for (const Mat& s : model.volatility.values()) images_.emplace_back(portfolio_set, s);
}

Vec GeneratorBundle::theta(double t) const { return market_price_of_risk(*model_, t); }

const ImageSet& GeneratorBundle::image_set(double t) const {
    return images_[model_->volatility.piece_index(t)];
}

double GeneratorBundle::g(double t, const Vec& z) const {
    const double c = weights_->cum_delta(t);
    const double beta = weights_->beta;
    return beta * std::exp(-c) * penalty_->conjugate((std::exp(c) / beta) * z);
}

std::optional<double> GeneratorBundle::g_quad_coeff(double t) const {
    auto w = penalty_->quadratic_weight();
    if (!w) return std::nullopt;
    // beta e^{-c} * |e^{c} z / beta|^2 / (2w) = e^{c} / (2 w beta) * |z|^2
    return std::exp(weights_->cum_delta(t)) / (2.0 * (*w) * weights_->beta);
}

double GeneratorBundle::g_literal_entropic(double t, const Vec& z) const {
    return std::exp(weights_->cum_delta(t)) / weights_->beta * z.squaredNorm();
}

double GeneratorBundle::consumption_objective(double t, double c) const {
    const double ah = weights_->alpha_bar * h(t);
    double lnc = weights_->alpha > 0.0 ? weights_->alpha * std::log(c) : 0.0;
    return lnc - ah * c;
}

FResult GeneratorBundle::f(double t, const Vec& z) const { return f_with_convention(t, z, convention_); }

FResult GeneratorBundle::f_with_convention(double t, const Vec& z, Convention which) const {
    const double ht = h(t);
    const double ah = weights_->alpha_bar * ht;
    const double disc = weights_->discount(t);
    const double A = ah * disc;

    ConsumptionOpt cons = argmax_consumption(*cset_, weights_->alpha, weights_->alpha_bar, ht);

    GeneratorEval geval;
    geval.fn = [this, t](const Vec& w) { return g(t, w); };
    geval.quad_coeff = g_quad_coeff(t);

    const Mat& sig = sigma(t);
    Vec th = theta(t);

    FResult out;
    out.c = cons.c;
    out.c_piece = cons.piece;
    if (which == Convention::calibrated) {
        PortfolioOpt port =
            argmin_portfolio(*aset_, sig, th, geval, A, 1.0 / A, z, /*theta_coeff=*/-1.0,
                             /*pi_quad_coeff=*/0.5);
        out.value = cons.value / ah - port.value;
        out.pi = port.pi;
        out.pi_piece = port.piece;
        out.iteration_cap_hit = port.iteration_cap_hit;
    } else {
        PortfolioOpt port = argmin_portfolio(*aset_, sig, th, geval, A, 1.0 / ah, z,
                                             /*theta_coeff=*/1.0, /*pi_quad_coeff=*/0.0);
        out.value = disc * cons.value / ah - port.value;
        out.pi = port.pi;
        out.pi_piece = port.piece;
        out.iteration_cap_hit = port.iteration_cap_hit;
    }
    return out;
}

double GeneratorBundle::portfolio_objective(double t, const Vec& z, const RowVec& pi,
                                            Convention which) const {
    const double ht = h(t);
    const double ah = weights_->alpha_bar * ht;
    const double A = ah * weights_->discount(t);
    Vec v = (pi * sigma(t)).transpose();
    double gval = g(t, A * (z + v));
    if (which == Convention::calibrated)
        return gval / A - v.dot(theta(t)) + 0.5 * v.squaredNorm();
    return gval / ah + v.dot(theta(t));
}

double GeneratorBundle::f_closed_form_entropic(double t, const Vec& z, Convention which) const {
    auto w = penalty_->quadratic_weight();
    if (!w || std::abs(*w - 1.0) > 1e-12)
        throw solver_error("entropic closed form: requires the quadratic penalty with weight 1");
    const double ht = h(t);
    const double ah = weights_->alpha_bar * ht;
    const double alpha = weights_->alpha;
    const double beta = weights_->beta;
    const double disc = weights_->discount(t);
    const double ec = 1.0 / disc; // e^{int_0^t delta}
    if (alpha > 0.0) {
        Vec chat(1);
        chat << alpha / ah;
        if (!cset_->contains(chat))
            throw solver_error(
                "entropic closed form: alpha/(alpha_bar h(t)) must lie in the consumption set");
    }
    const ImageSet& img = image_set(t);
    Vec th = theta(t);

    double term1_core = alpha > 0.0 ? alpha * std::log(alpha / ah) - alpha : 0.0;
    if (which == Convention::literal_paper) {
        Vec shifted = z + (beta * ec / (2.0 * ah)) * th;
        return disc / ah * term1_core - (ah / beta) * disc * img.distance_sq(shifted) -
               z.dot(th) - beta * ec / (4.0 * ah) * th.squaredNorm();
    }
    const double kappa = ah / (2.0 * beta);
    const double coef = 0.5 + kappa;
    Vec wbar = (beta * th - ah * z) / (beta + ah);
    return term1_core / ah - coef * img.distance_sq(wbar) + coef * wbar.squaredNorm() -
           kappa * z.squaredNorm();
}

} // namespace rlu
