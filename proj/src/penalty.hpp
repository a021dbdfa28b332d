#ifndef RLU_PENALTY_HPP
#define RLU_PENALTY_HPP

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "model.hpp"

namespace rlu {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct GrowthReport {
    bool ok = false;
    double kappa1_observed = 0.0;
    double kappa2_observed = 0.0;
};

/// Convex scenario-penalty integrand h with h(0) = 0, h >= 0, and the growth
/// floor h(x) >= kappa1*|x|^2 - kappa2. All supported kinds are radial, so
/// evaluation and conjugation reduce to a scalar profile of |x|.
class Penalty {
public:
    enum class Kind { quadratic, norm, tabulated };

    static Penalty quadratic(double weight, double kappa1, double kappa2);
    static Penalty norm(double kappa1, double kappa2);
    /// Tabulated radial profile (radius, value); strictly increasing radii
    /// starting at 0 with value 0. Convexity is repaired at load time by
    /// pooling adjacent slope violators, then clamping slopes at 0 so that
    /// h >= 0 and h(0) = 0 hold whatever the input noise.
    static Penalty tabulated(std::vector<double> radii, std::vector<double> values,
                             double kappa1, double kappa2);
    static Penalty tabulated_from_csv(const std::string& path, double kappa1, double kappa2);

    Kind kind() const { return kind_; }
    double weight() const { return weight_; }
    double kappa1() const { return kappa1_; }
    double kappa2() const { return kappa2_; }
    double effective_domain_radius() const { return domain_radius_; }

    /// h(eta); +infinity outside the effective domain (never happens for the
    /// supported kinds, which are finite everywhere).
    double value(const Vec& eta) const;
    double value_radial(double r) const;

    /// Legendre-Fenchel conjugate h*(y) = sup_x { <y,x> - h(x) }. Closed form
    /// for quadratic and norm kinds; numeric for tabulated profiles.
    double conjugate(const Vec& y) const;

    /// Numeric conjugation path (golden section per ray for m <= 2, projected
    /// gradient ascent for m = 3), exposed so the closed forms can be
    /// cross-checked against it.
    double conjugate_numeric(const Vec& y) const;

    /// If h is quadratic w/2 |x|^2, h*(y) = |y|^2 / (2w); returns w.
    std::optional<double> quadratic_weight() const {
        if (kind_ == Kind::quadratic) return weight_;
        return std::nullopt;
    }

    /// Checks h(x) >= kappa1 |x|^2 - kappa2 on a deterministic radial grid and
    /// reports the tightest constants observed on that grid.
    GrowthReport check_growth(int ambient_dim = 1, double radius = 5.0, int num_radii = 101) const;

    /// Fenchel-Young residual h(x) + h*(y) - <x,y> (always >= 0).
    double fenchel_young_residual(const Vec& x, const Vec& y) const {
        return value(x) + conjugate(y) - x.dot(y);
    }

private:
    Penalty() = default;
    double tail_slope() const;
    double conjugate_radial_numeric(double ynorm) const;

    Kind kind_ = Kind::quadratic;
    double weight_ = 1.0;
    double kappa1_ = 0.5;
    double kappa2_ = 0.0;
    double domain_radius_ = kInf;
    std::vector<double> radii_;
    std::vector<double> table_;
};

} // namespace rlu

#endif
