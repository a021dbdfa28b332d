#include "penalty.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace rlu {

namespace {

// Pool-adjacent-violators on the slope sequence (weights = radial widths),
// producing the closest nondecreasing slope profile; a nondecreasing slope
// profile is exactly a convex piecewise-linear interpolant.
std::vector<double> isotonic_slopes(const std::vector<double>& slopes,
                                    const std::vector<double>& widths) {
    struct Block {
        double mean;
        double weight;
        int count;
    };
    std::vector<Block> stack;
    for (std::size_t i = 0; i < slopes.size(); ++i) {
        Block b{slopes[i], widths[i], 1};
        while (!stack.empty() && stack.back().mean > b.mean + 0.0) {
            const Block& p = stack.back();
            b.mean = (p.mean * p.weight + b.mean * b.weight) / (p.weight + b.weight);
            b.weight += p.weight;
            b.count += p.count;
            stack.pop_back();
        }
        stack.push_back(b);
    }
    std::vector<double> out;
    out.reserve(slopes.size());
    for (const Block& b : stack)
        for (int i = 0; i < b.count; ++i) out.push_back(b.mean);
    return out;
}

} // namespace

Penalty Penalty::quadratic(double weight, double kappa1, double kappa2) {
    if (!(weight > 0.0)) throw config_error("penalty.w: quadratic weight must be positive");
    Penalty p;
    p.kind_ = Kind::quadratic;
    p.weight_ = weight;
    p.kappa1_ = kappa1;
    p.kappa2_ = kappa2;
    return p;
}

Penalty Penalty::norm(double kappa1, double kappa2) {
    Penalty p;
    p.kind_ = Kind::norm;
    p.kappa1_ = kappa1;
    p.kappa2_ = kappa2;
    return p;
}

Penalty Penalty::tabulated(std::vector<double> radii, std::vector<double> values, double kappa1,
                           double kappa2) {
    if (radii.size() < 2 || radii.size() != values.size())
        throw config_error("penalty.table: need at least two (radius, value) rows");
    if (radii.front() != 0.0 || values.front() != 0.0)
        throw config_error("penalty.table: first row must be (0, 0)");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1]))
            throw config_error("penalty.table: radii must be strictly increasing");

    std::vector<double> slopes(radii.size() - 1), widths(radii.size() - 1);
    for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
        widths[i] = radii[i + 1] - radii[i];
        slopes[i] = (values[i + 1] - values[i]) / widths[i];
    }
    slopes = isotonic_slopes(slopes, widths);
    for (double& s : slopes) s = std::max(s, 0.0); // keeps h >= 0 with h(0) = 0

    Penalty p;
    p.kind_ = Kind::tabulated;
    p.kappa1_ = kappa1;
    p.kappa2_ = kappa2;
    p.radii_ = std::move(radii);
    p.table_.assign(p.radii_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < p.radii_.size(); ++i)
        p.table_[i + 1] = p.table_[i] + slopes[i] * widths[i];
    return p;
}

Penalty Penalty::tabulated_from_csv(const std::string& path, double kappa1, double kappa2) {
    std::ifstream in(path);
    if (!in) throw config_error("penalty.csv: cannot open " + path);
    std::vector<double> radii, values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        // tolerate a header row
        if (line.find_first_not_of("0123456789+-.eE, \t\r") != std::string::npos) continue;
        std::istringstream ls(line);
        std::string a, b;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ','))
            throw config_error("penalty.csv: expected two comma-separated columns in " + path);
        radii.push_back(std::stod(a));
        values.push_back(std::stod(b));
    }
    return tabulated(std::move(radii), std::move(values), kappa1, kappa2);
}

double Penalty::value_radial(double r) const {
    switch (kind_) {
    case Kind::quadratic:
        return 0.5 * weight_ * r * r;
    case Kind::norm:
        return r;
    case Kind::tabulated: {
        if (r >= radii_.back()) {
            // linear continuation with the final slope keeps h convex and lsc
            double s = tail_slope();
            return table_.back() + s * (r - radii_.back());
        }
        auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
        std::size_t i = static_cast<std::size_t>(it - radii_.begin()) - 1;
        double w = (r - radii_[i]) / (radii_[i + 1] - radii_[i]);
        return table_[i] + w * (table_[i + 1] - table_[i]);
    }
    }
    return 0.0;
}

double Penalty::value(const Vec& eta) const { return value_radial(eta.norm()); }

double Penalty::tail_slope() const {
    std::size_t n = radii_.size();
    return (table_[n - 1] - table_[n - 2]) / (radii_[n - 1] - radii_[n - 2]);
}

double Penalty::conjugate(const Vec& y) const {
    switch (kind_) {
    case Kind::quadratic:
        return y.squaredNorm() / (2.0 * weight_);
    case Kind::norm:
        return y.norm() <= 1.0 + 1e-12 ? 0.0 : kInf;
    case Kind::tabulated:
        return conjugate_numeric(y);
    }
    return 0.0;
}

// sup_{r >= 0} { |y| r - H(r) } for a convex radial profile H: the objective
// is concave in r, so golden-section search is exact up to bracketing width.
double Penalty::conjugate_radial_numeric(double ynorm) const {
    if (!(kappa1_ > 0.0) && kind_ == Kind::tabulated) {
        // without a quadratic floor the search radius comes from the linear
        // tail; a slope below |y| means the supremum is +infinity
        double s = tail_slope();
        if (ynorm > s + 1e-12) return kInf;
        if (ynorm > s - 1e-12 && s == 0.0) return 0.0;
    } else if (!(kappa1_ > 0.0)) {
        throw solver_error("penalty.conjugate: numeric conjugation needs kappa1 > 0 (unbounded search radius)");
    }

    double hi;
    if (kind_ == Kind::tabulated) {
        double s = tail_slope();
        if (ynorm > s + 1e-12) return kInf;
        hi = radii_.back(); // beyond the table the objective is nonincreasing for |y| <= tail slope
        if (kappa1_ > 0.0)
            hi = std::min(hi, (ynorm + std::sqrt(ynorm * ynorm + 4.0 * kappa1_ * kappa2_)) /
                                      (2.0 * kappa1_) +
                                  1.0);
        hi = std::max(hi, 1e-8);
    } else {
        hi = (ynorm + std::sqrt(ynorm * ynorm + 4.0 * kappa1_ * kappa2_)) / (2.0 * kappa1_) + 1.0;
    }

    auto obj = [&](double r) { return ynorm * r - value_radial(r); };
    double lo = 0.0;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = obj(c), fd = obj(d);
    for (int it = 0; it < 200 && (b - a) > 1e-12 * (1.0 + hi); ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = obj(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = obj(d);
        }
    }
    double r = 0.5 * (a + b);
    return std::max({obj(r), obj(lo), obj(hi), 0.0});
}

double Penalty::conjugate_numeric(const Vec& y) const {
    if (y.size() <= 2) return conjugate_radial_numeric(y.norm());

    // m == 3: projected gradient ascent on x -> <y,x> - h(x) over the ball
    // |x| <= rmax given by the growth bound. h is radial, so the gradient of
    // h at x is H'(|x|) x/|x| with a central-difference slope.
    if (!(kappa1_ > 0.0))
        throw solver_error("penalty.conjugate: numeric conjugation needs kappa1 > 0 (unbounded search radius)");
    double ynorm = y.norm();
    double rmax = (ynorm + std::sqrt(ynorm * ynorm + 4.0 * kappa1_ * kappa2_)) / (2.0 * kappa1_) + 1.0;
    Vec x = Vec::Zero(y.size());
    if (ynorm > 0.0) x = y * std::min(0.5 * rmax / ynorm, 1.0);
    auto objective = [&](const Vec& p) { return y.dot(p) - value(p); };
    double step = 0.5;
    double best = objective(x);
    for (int it = 0; it < 10000; ++it) {
        double r = x.norm();
        Vec grad = y;
        if (r > 1e-12) {
            double eps = 1e-6 * (1.0 + r);
            double slope = (value_radial(r + eps) - value_radial(std::max(r - eps, 0.0))) /
                           (eps + std::min(eps, r));
            grad -= slope * (x / r);
        }
        if (grad.norm() <= 1e-10) break;
        Vec trial = x + step * grad;
        if (trial.norm() > rmax) trial *= rmax / trial.norm();
        double val = objective(trial);
        if (val > best) {
            x = trial;
            best = val;
            step *= 1.2;
        } else {
            step *= 0.5;
            if (step < 1e-14) break;
        }
    }
    return std::max(best, 0.0);
}

GrowthReport Penalty::check_growth(int ambient_dim, double radius, int num_radii) const {
    (void)ambient_dim; // all supported kinds are radial
    GrowthReport rep;
    rep.ok = true;
    rep.kappa1_observed = kInf;
    rep.kappa2_observed = 0.0;
    for (int i = 0; i < num_radii; ++i) {
        double r = radius * static_cast<double>(i) / (num_radii - 1);
        double h = value_radial(r);
        double slack = h - (kappa1_ * r * r - kappa2_);
        if (slack < -1e-12) rep.ok = false;
        rep.kappa2_observed = std::max(rep.kappa2_observed, kappa1_ * r * r - h);
        if (r > 0.0) rep.kappa1_observed = std::min(rep.kappa1_observed, (h + kappa2_) / (r * r));
    }
    if (!std::isfinite(rep.kappa1_observed)) rep.kappa1_observed = kappa1_;
    return rep;
}

} // namespace rlu
