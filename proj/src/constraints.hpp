#ifndef RLU_CONSTRAINTS_HPP
#define RLU_CONSTRAINTS_HPP

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "model.hpp"

namespace rlu {

struct WholeSpace {};
struct BoxPiece {
    Vec lo, hi;
};
struct BallPiece {
    Vec center;
    double radius;
};
struct PolytopePiece {
    Mat normals; // rows a_i with a_i . x <= offsets_i
    Vec offsets;
};
struct SingletonPiece {
    Vec point;
};

using Piece = std::variant<WholeSpace, BoxPiece, BallPiece, PolytopePiece, SingletonPiece>;

/// Closed constraint set represented as a finite union of convex primitives.
/// Nonconvexity only enters through the union; every per-piece subproblem is
/// solved exactly.
class ConstraintSet {
public:
    ConstraintSet() = default;
    ConstraintSet(int dim, std::vector<Piece> pieces);

    static ConstraintSet whole_space(int dim) { return ConstraintSet(dim, {WholeSpace{}}); }
    static ConstraintSet singleton(Vec p);
    static ConstraintSet box(Vec lo, Vec hi);
    static ConstraintSet interval(double lo, double hi); // dim 1 box

    int dim() const { return dim_; }
    const std::vector<Piece>& pieces() const { return pieces_; }

    struct OwnProjection {
        Vec point;
        int piece = -1;
        double dist_sq = 0.0;
    };
    /// Euclidean projection in the set's own space; lowest-index piece wins ties.
    OwnProjection project(const Vec& x) const;
    double distance(const Vec& x) const;
    bool contains(const Vec& x, double tol = 1e-10) const;

    /// Interval hull of one piece for dim-1 sets: [lo, hi] (hi may be +inf).
    struct Interval {
        double lo, hi;
        bool empty = false;
    };
    Interval piece_interval(int idx) const; // dim() == 1 only

private:
    void validate_piece(const Piece& p) const;
    int dim_ = 0;
    std::vector<Piece> pieces_;
};

/// Image sigma*A = { pi sigma : pi in A } of a portfolio set under the
/// volatility matrix. Distances in R^m are computed by minimizing
/// |p - pi sigma|^2 over each piece in pi-space with the Gram matrix
/// sigma sigma^T, so ellipsoidal images never need an explicit representation.
class ImageSet {
public:
    ImageSet(const ConstraintSet& base, Mat sigma);

    struct Projection {
        Vec point;  // nearest point of sigma*A in R^m
        RowVec pi;  // a pi attaining it
        int piece = -1;
        double dist_sq = 0.0;
    };
    Projection project(const Vec& p) const;
    double distance_sq(const Vec& p) const;

    const Mat& sigma() const { return sigma_; }

private:
    const ConstraintSet* base_;
    Mat sigma_;
    Mat gram_; // sigma sigma^T
};

struct ConsumptionOpt {
    double c = 0.0;
    double value = 0.0;
    int piece = -1;
};

/// sup_{c in C, c admissible} alpha ln(c) - alpha_bar h_t c, solved exactly
/// per interval piece (the objective is concave in c). With alpha = 0 the
/// optimum is the cheapest feasible consumption, so C = {0} stays well posed.
ConsumptionOpt argmax_consumption(const ConstraintSet& cset, double alpha, double alpha_bar,
                                  double h_t);

/// Generator evaluation handle for the portfolio optimizer; when the
/// generator is a pure quadratic quad_coeff*|w|^2 the per-piece problem is
/// solved exactly by projection, otherwise by projected gradient descent.
struct GeneratorEval {
    std::function<double(const Vec&)> fn;
    std::optional<double> quad_coeff;
};

struct PortfolioOpt {
    RowVec pi;
    double value = 0.0;
    int piece = -1;
    bool iteration_cap_hit = false;
};

/// min over pi in A of
///   scale_b * g(scale_a * (z + pi sigma)) + theta_coeff * pi sigma theta
///     + pi_quad_coeff * |pi sigma|^2.
/// The defaults reproduce the plain objective
///   scale_b * g(scale_a (z + pi sigma)) + pi sigma theta.
PortfolioOpt argmin_portfolio(const ConstraintSet& aset, const Mat& sigma, const Vec& theta,
                              const GeneratorEval& g, double scale_a, double scale_b, const Vec& z,
                              double theta_coeff = 1.0, double pi_quad_coeff = 0.0);

} // namespace rlu

#endif
