#ifndef RLU_PWCONST_HPP
#define RLU_PWCONST_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"

namespace rlu {

/// Piecewise-constant right-open step function on [0, inf): value(t) = values[i]
/// for t in [times[i], times[i+1]). times[0] must be 0. Integrals are exact,
/// which keeps the discount factors and the h(t) closed form quadrature-free.
template <typename T>
class Piecewise {
public:
    Piecewise() = default;

    Piecewise(std::vector<double> times, std::vector<T> values)
        : times_(std::move(times)), values_(std::move(values)) {
        if (times_.empty() || times_.size() != values_.size())
            throw config_error("piecewise process: times/values size mismatch or empty");
        if (times_.front() != 0.0)
            throw config_error("piecewise process: first breakpoint must be 0");
        for (std::size_t i = 1; i < times_.size(); ++i)
            if (!(times_[i] > times_[i - 1]))
                throw config_error("piecewise process: breakpoints must be strictly increasing");
    }

    static Piecewise constant(T v) { return Piecewise({0.0}, {std::move(v)}); }

    std::size_t pieces() const { return values_.size(); }
    const std::vector<double>& times() const { return times_; }
    const std::vector<T>& values() const { return values_; }

    std::size_t piece_index(double t) const {
        if (t < 0.0) throw invalid_error("piecewise process queried at t < 0");
        auto it = std::upper_bound(times_.begin(), times_.end(), t);
        return static_cast<std::size_t>(it - times_.begin()) - 1;
    }

    const T& operator()(double t) const { return values_[piece_index(t)]; }

    bool is_constant() const { return values_.size() == 1; }

private:
    std::vector<double> times_{0.0};
    std::vector<T> values_{};
};

/// Scalar step function with exact integration helpers used for the discount
/// rate delta.
class StepFunction : public Piecewise<double> {
public:
    StepFunction() : Piecewise<double>({0.0}, {0.0}) {}
    StepFunction(std::vector<double> times, std::vector<double> values)
        : Piecewise<double>(std::move(times), std::move(values)) {}
    static StepFunction constant(double v) { return StepFunction({0.0}, {v}); }

    /// Exact integral over [a, b], a <= b.
    double integral(double a, double b) const {
        if (b < a) throw invalid_error("StepFunction::integral: b < a");
        double acc = 0.0;
        const auto& ts = times();
        const auto& vs = values();
        for (std::size_t i = 0; i < vs.size(); ++i) {
            double lo = std::max(a, ts[i]);
            double hi = (i + 1 < ts.size()) ? std::min(b, ts[i + 1]) : b;
            if (hi > lo) acc += vs[i] * (hi - lo);
        }
        return acc;
    }

    /// Exact integral of u -> exp(-integral(0, u)) over [a, b]. Used by the
    /// h(t) closed form.
    double integral_of_exp_neg_cum(double a, double b) const {
        if (b < a) throw invalid_error("StepFunction::integral_of_exp_neg_cum: b < a");
        double acc = 0.0;
        const auto& ts = times();
        const auto& vs = values();
        for (std::size_t i = 0; i < vs.size(); ++i) {
            double lo = std::max(a, ts[i]);
            double hi = (i + 1 < ts.size()) ? std::min(b, ts[i + 1]) : b;
            if (hi <= lo) continue;
            double c = integral(0.0, lo);
            double d = vs[i];
            if (d == 0.0)
                acc += std::exp(-c) * (hi - lo);
            else
                acc += std::exp(-c) * (1.0 - std::exp(-d * (hi - lo))) / d;
        }
        return acc;
    }

    std::vector<double> breakpoints_in(double a, double b) const {
        std::vector<double> out;
        for (double t : times())
            if (t > a && t < b) out.push_back(t);
        return out;
    }
};

} // namespace rlu

#endif
