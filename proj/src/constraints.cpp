#include "constraints.hpp"

#include <cmath>

namespace rlu {

namespace {

bool lex_less(const Vec& a, const Vec& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] < b[i] - 1e-15) return true;
        if (a[i] > b[i] + 1e-15) return false;
    }
    return false;
}

// Minimize q(pi) = pi G pi^T - 2 pi.g0 + c0 over one convex piece in pi-space.
// G must be positive definite. Returns the minimizer; empty optional means the
// piece is infeasible (only possible for polytopes).
std::optional<Vec> minimize_quadratic_over_piece(const Piece& piece, const Mat& G, const Vec& g0) {
    const int d = static_cast<int>(G.rows());
    auto qval = [&](const Vec& p) { return p.dot(G * p) - 2.0 * p.dot(g0); };

    if (std::holds_alternative<WholeSpace>(piece)) {
        return Vec(G.ldlt().solve(g0));
    }
    if (const auto* s = std::get_if<SingletonPiece>(&piece)) {
        return s->point;
    }
    if (const auto* box = std::get_if<BoxPiece>(&piece)) {
        // Enumerate face configurations (free / at lo / at hi per coordinate):
        // the exact optimum has one of them, and every candidate is clamped
        // feasible, so the best candidate is the exact minimizer.
        int configs = 1;
        for (int i = 0; i < d; ++i) configs *= 3;
        std::optional<Vec> best;
        double best_q = 0.0;
        for (int cfg = 0; cfg < configs; ++cfg) {
            int code = cfg;
            std::vector<int> state(d); // 0 free, 1 lo, 2 hi
            std::vector<int> free_idx;
            Vec cand = Vec::Zero(d);
            for (int i = 0; i < d; ++i) {
                state[i] = code % 3;
                code /= 3;
                if (state[i] == 0)
                    free_idx.push_back(i);
                else
                    cand[i] = state[i] == 1 ? box->lo[i] : box->hi[i];
            }
            if (!free_idx.empty()) {
                const int nf = static_cast<int>(free_idx.size());
                Mat Gff(nf, nf);
                Vec rhs(nf);
                for (int a = 0; a < nf; ++a) {
                    rhs[a] = g0[free_idx[a]];
                    for (int b = 0; b < nf; ++b) Gff(a, b) = G(free_idx[a], free_idx[b]);
                    for (int i = 0; i < d; ++i)
                        if (state[i] != 0) rhs[a] -= G(free_idx[a], i) * cand[i];
                }
                Vec sol = Gff.ldlt().solve(rhs);
                if (!sol.allFinite()) continue;
                for (int a = 0; a < nf; ++a) cand[free_idx[a]] = sol[a];
            }
            for (int i = 0; i < d; ++i) cand[i] = std::min(std::max(cand[i], box->lo[i]), box->hi[i]);
            double q = qval(cand);
            if (!best || q < best_q - 1e-15 || (q <= best_q + 1e-15 && lex_less(cand, *best))) {
                best = cand;
                best_q = q;
            }
        }
        return best;
    }
    if (const auto* ball = std::get_if<BallPiece>(&piece)) {
        Vec unconstrained = G.ldlt().solve(g0);
        if ((unconstrained - ball->center).norm() <= ball->radius + 1e-14) return unconstrained;
        // boundary solution: (G + lambda I) pi = g0 + lambda c, |pi - c| = r;
        // the residual radius is strictly decreasing in lambda, so bisect.
        auto radius_at = [&](double lambda) {
            Mat M = G + lambda * Mat::Identity(d, d);
            Vec p = M.ldlt().solve(g0 + lambda * ball->center);
            return std::make_pair((p - ball->center).norm(), p);
        };
        double lo = 0.0, hi = 1.0;
        while (radius_at(hi).first > ball->radius && hi < 1e16) hi *= 2.0;
        Vec p = ball->center;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            auto [r, pm] = radius_at(mid);
            p = pm;
            if (r > ball->radius)
                lo = mid;
            else
                hi = mid;
        }
        return p;
    }
    const auto& poly = std::get<PolytopePiece>(piece);
    const int rows = static_cast<int>(poly.normals.rows());
    auto feasible = [&](const Vec& p, double tol) {
        for (int r = 0; r < rows; ++r)
            if (poly.normals.row(r).dot(p) > poly.offsets[r] + tol) return false;
        return true;
    };
    std::optional<Vec> best;
    double best_q = 0.0;
    auto consider = [&](const Vec& cand) {
        if (!cand.allFinite() || !feasible(cand, 1e-9)) return;
        double q = qval(cand);
        if (!best || q < best_q - 1e-15 || (q <= best_q + 1e-15 && lex_less(cand, *best))) {
            best = cand;
            best_q = q;
        }
    };
    consider(G.ldlt().solve(g0));
    // KKT systems over all active subsets up to size d; complete because the
    // optimum of a PD quadratic over a polyhedron has an active set of at
    // most d independent rows.
    std::vector<int> subset;
    std::function<void(int)> enumerate = [&](int start) {
        if (!subset.empty()) {
            const int k = static_cast<int>(subset.size());
            Mat kkt = Mat::Zero(d + k, d + k);
            Vec rhs(d + k);
            kkt.topLeftCorner(d, d) = G;
            rhs.head(d) = g0;
            for (int a = 0; a < k; ++a) {
                kkt.block(0, d + a, d, 1) = 0.5 * poly.normals.row(subset[a]).transpose();
                kkt.block(d + a, 0, 1, d) = poly.normals.row(subset[a]);
                rhs[d + a] = poly.offsets[subset[a]];
            }
            Eigen::FullPivLU<Mat> lu(kkt);
            if (lu.isInvertible()) {
                Vec sol = lu.solve(rhs);
                bool dual_ok = true;
                for (int a = 0; a < k; ++a)
                    if (sol[d + a] < -1e-9) dual_ok = false;
                if (dual_ok) consider(sol.head(d));
            }
        }
        if (static_cast<int>(subset.size()) == d) return;
        for (int r = start; r < rows; ++r) {
            subset.push_back(r);
            enumerate(r + 1);
            subset.pop_back();
        }
    };
    enumerate(0);
    return best;
}

} // namespace

ConstraintSet::ConstraintSet(int dim, std::vector<Piece> pieces)
    : dim_(dim), pieces_(std::move(pieces)) {
    if (dim_ < 1) throw config_error("constraints: ambient dimension must be >= 1");
    if (pieces_.empty()) throw config_error("constraints: piece list must be nonempty");
    for (const Piece& p : pieces_) validate_piece(p);
}

void ConstraintSet::validate_piece(const Piece& p) const {
    if (const auto* box = std::get_if<BoxPiece>(&p)) {
        if (box->lo.size() != dim_ || box->hi.size() != dim_)
            throw config_error("constraints.box: lo/hi dimension mismatch");
        for (int i = 0; i < dim_; ++i)
            if (!(box->lo[i] <= box->hi[i])) throw config_error("constraints.box: lo > hi");
    } else if (const auto* ball = std::get_if<BallPiece>(&p)) {
        if (ball->center.size() != dim_) throw config_error("constraints.ball: center dimension mismatch");
        if (!(ball->radius >= 0.0)) throw config_error("constraints.ball: radius must be >= 0");
    } else if (const auto* poly = std::get_if<PolytopePiece>(&p)) {
        if (poly->normals.cols() != dim_ || poly->normals.rows() != poly->offsets.size())
            throw config_error("constraints.polytope: normals/offsets shape mismatch");
        if (poly->normals.rows() > 16)
            throw config_error("constraints.polytope: at most 16 halfspaces supported");
        // nonemptiness: project the origin; the exhaustive KKT enumeration
        // finds a feasible point iff one exists
        Mat I = Mat::Identity(dim_, dim_);
        if (!minimize_quadratic_over_piece(p, I, Vec::Zero(dim_)))
            throw config_error("constraints.polytope: piece is empty");
    } else if (const auto* s = std::get_if<SingletonPiece>(&p)) {
        if (s->point.size() != dim_) throw config_error("constraints.singleton: point dimension mismatch");
    }
}

ConstraintSet ConstraintSet::singleton(Vec p) {
    int d = static_cast<int>(p.size());
    return ConstraintSet(d, {SingletonPiece{std::move(p)}});
}

ConstraintSet ConstraintSet::box(Vec lo, Vec hi) {
    int d = static_cast<int>(lo.size());
    return ConstraintSet(d, {BoxPiece{std::move(lo), std::move(hi)}});
}

ConstraintSet ConstraintSet::interval(double lo, double hi) {
    Vec l(1), h(1);
    l << lo;
    h << hi;
    return box(l, h);
}

ConstraintSet::OwnProjection ConstraintSet::project(const Vec& x) const {
    if (x.size() != dim_) throw invalid_error("constraints.project: dimension mismatch");
    Mat I = Mat::Identity(dim_, dim_);
    OwnProjection best;
    bool first = true;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        auto cand = minimize_quadratic_over_piece(pieces_[i], I, x);
        if (!cand) continue;
        double d2 = (*cand - x).squaredNorm();
        if (first || d2 < best.dist_sq - 1e-15) {
            best.point = *cand;
            best.piece = static_cast<int>(i);
            best.dist_sq = d2;
            first = false;
        }
    }
    if (first) throw invalid_error("constraints.project: no feasible piece");
    return best;
}

double ConstraintSet::distance(const Vec& x) const { return std::sqrt(project(x).dist_sq); }

bool ConstraintSet::contains(const Vec& x, double tol) const {
    return project(x).dist_sq <= tol * tol;
}

ConstraintSet::Interval ConstraintSet::piece_interval(int idx) const {
    if (dim_ != 1) throw invalid_error("constraints.piece_interval: 1-d sets only");
    const Piece& p = pieces_.at(static_cast<std::size_t>(idx));
    Interval out{-kInf, kInf, false};
    if (std::holds_alternative<WholeSpace>(p)) return out;
    if (const auto* s = std::get_if<SingletonPiece>(&p)) {
        out.lo = out.hi = s->point[0];
        return out;
    }
    if (const auto* box = std::get_if<BoxPiece>(&p)) {
        out.lo = box->lo[0];
        out.hi = box->hi[0];
        return out;
    }
    if (const auto* ball = std::get_if<BallPiece>(&p)) {
        out.lo = ball->center[0] - ball->radius;
        out.hi = ball->center[0] + ball->radius;
        return out;
    }
    const auto& poly = std::get<PolytopePiece>(p);
    for (int r = 0; r < poly.normals.rows(); ++r) {
        double a = poly.normals(r, 0), b = poly.offsets[r];
        if (a > 0.0)
            out.hi = std::min(out.hi, b / a);
        else if (a < 0.0)
            out.lo = std::max(out.lo, b / a);
        else if (b < 0.0)
            out.empty = true;
    }
    if (out.lo > out.hi) out.empty = true;
    return out;
}

ImageSet::ImageSet(const ConstraintSet& base, Mat sigma) : base_(&base), sigma_(std::move(sigma)) {
    if (sigma_.rows() != base.dim())
        throw invalid_error("image set: sigma rows must match the portfolio dimension");
    gram_ = sigma_ * sigma_.transpose();
}

ImageSet::Projection ImageSet::project(const Vec& p) const {
    if (p.size() != sigma_.cols()) throw invalid_error("image set: point dimension mismatch");
    Vec g0 = sigma_ * p;
    Projection best;
    bool first = true;
    for (std::size_t i = 0; i < base_->pieces().size(); ++i) {
        auto pi = minimize_quadratic_over_piece(base_->pieces()[i], gram_, g0);
        if (!pi) continue;
        Vec v = (pi->transpose() * sigma_).transpose();
        double d2 = (p - v).squaredNorm();
        if (first || d2 < best.dist_sq - 1e-15) {
            best.point = v;
            best.pi = pi->transpose();
            best.piece = static_cast<int>(i);
            best.dist_sq = d2;
            first = false;
        }
    }
    if (first) throw invalid_error("image set: no feasible piece");
    return best;
}

double ImageSet::distance_sq(const Vec& p) const { return project(p).dist_sq; }

ConsumptionOpt argmax_consumption(const ConstraintSet& cset, double alpha, double alpha_bar,
                                  double h_t) {
    if (cset.dim() != 1) throw invalid_error("argmax_consumption: consumption set must be 1-d");
    if (!(alpha_bar * h_t > 0.0)) throw invalid_error("argmax_consumption: need alpha_bar*h > 0");
    const double ah = alpha_bar * h_t;
    ConsumptionOpt best;
    bool found = false;
    for (int i = 0; i < static_cast<int>(cset.pieces().size()); ++i) {
        auto iv = cset.piece_interval(i);
        if (iv.empty) continue;
        double lo = std::max(iv.lo, 0.0);
        double hi = iv.hi;
        if (lo > hi) continue;
        double c, value;
        if (alpha > 0.0) {
            if (hi <= 0.0) continue; // ln c needs c > 0
            double chat = alpha / ah;
            c = std::min(std::max(chat, lo), hi);
            if (c <= 0.0) continue;
            value = alpha * std::log(c) - ah * c;
        } else {
            c = lo; // pure cost minimization
            value = -ah * c;
        }
        if (!found || value > best.value + 1e-15) {
            best.c = c;
            best.value = value;
            best.piece = i;
            found = true;
        }
    }
    if (!found) throw solver_error("argmax_consumption: consumption set has no admissible point");
    return best;
}

PortfolioOpt argmin_portfolio(const ConstraintSet& aset, const Mat& sigma, const Vec& theta,
                              const GeneratorEval& g, double scale_a, double scale_b, const Vec& z,
                              double theta_coeff, double pi_quad_coeff) {
    if (aset.pieces().empty()) throw solver_error("argmin_portfolio: portfolio set is empty");
    const Mat gram = sigma * sigma.transpose();
    const int d = static_cast<int>(sigma.rows());

    PortfolioOpt best;
    bool first = true;
    auto consider = [&](const RowVec& pi, double value, int piece, bool cap) {
        if (first || value < best.value - 1e-15) {
            best.pi = pi;
            best.value = value;
            best.piece = piece;
            best.iteration_cap_hit = cap;
            first = false;
        }
    };

    if (g.quad_coeff) {
        // phi(v) = keff |v + w|^2 - keff |w|^2 + k |z|^2 in v = pi sigma with
        // w = (2 k z + theta_coeff * theta) / (2 keff): minimizing over the
        // image of a piece is a plain Euclidean projection of -w.
        const double k = scale_b * (*g.quad_coeff) * scale_a * scale_a;
        const double keff = k + pi_quad_coeff;
        if (keff > 1e-14) {
            const Vec target = -(2.0 * k * z + theta_coeff * theta) / (2.0 * keff);
            const double offset = k * z.squaredNorm() - keff * target.squaredNorm();
            Vec g0 = sigma * target;
            for (std::size_t i = 0; i < aset.pieces().size(); ++i) {
                auto pi = minimize_quadratic_over_piece(aset.pieces()[i], gram, g0);
                if (!pi) continue;
                Vec v = (pi->transpose() * sigma).transpose();
                double value = keff * (v - target).squaredNorm() + offset;
                consider(pi->transpose(), value, static_cast<int>(i), false);
            }
            if (first) throw solver_error("argmin_portfolio: portfolio set has no feasible piece");
            return best;
        }
    }

    auto objective = [&](const Vec& pi) {
        Vec v = sigma.transpose() * pi;
        return scale_b * g.fn(scale_a * (z + v)) + theta_coeff * v.dot(theta) +
               pi_quad_coeff * v.squaredNorm();
    };
    // per-piece projected gradient descent with a numeric gradient
    Mat I = Mat::Identity(d, d);
    for (std::size_t i = 0; i < aset.pieces().size(); ++i) {
        auto project_piece = [&](const Vec& p) {
            return minimize_quadratic_over_piece(aset.pieces()[i], I, p);
        };
        Vec init = gram.ldlt().solve(sigma * (-z));
        auto start = project_piece(init);
        if (!start) continue;
        Vec pi = *start;
        double fval = objective(pi);
        double step = 0.5;
        bool cap = true;
        for (int it = 0; it < 10000; ++it) {
            Vec grad(d);
            for (int a = 0; a < d; ++a) {
                Vec e = Vec::Zero(d);
                double hstep = 1e-6 * (1.0 + std::abs(pi[a]));
                e[a] = hstep;
                grad[a] = (objective(pi + e) - objective(pi - e)) / (2.0 * hstep);
            }
            auto trial_opt = project_piece(pi - step * grad);
            if (!trial_opt) break;
            Vec trial = *trial_opt;
            if ((trial - pi).norm() <= 1e-12 && grad.norm() <= 1e-10) {
                cap = false;
                break;
            }
            double ftrial = objective(trial);
            if (ftrial < fval - 1e-18) {
                pi = trial;
                fval = ftrial;
                step = std::min(step * 1.5, 1e3);
            } else {
                step *= 0.5;
                if (step < 1e-14) {
                    cap = false;
                    break;
                }
            }
        }
        consider(pi.transpose(), fval, static_cast<int>(i), cap);
    }
    if (first) throw solver_error("argmin_portfolio: portfolio set has no feasible piece");
    return best;
}

} // namespace rlu
