#pragma once

#include <optional>
#include <vector>

#include "field.hpp"

// Constrained TV denoising of a complex observation b:
//
//     min_x  1/2 ||x - b||_F^2 + lambda * tv(x) + indicator_C(x)
//
// solved through its dual. The dual variable q lives on the difference grid
// and is constrained to a product S of balls that depends on the TV variant.
// The dual objective h(q) = ||w||^2 - ||w - P_C(w)||^2 with w = b - lambda L^T q
// is smooth with Lipschitz constant at most 16 lambda^2, so a projected
// gradient iteration with step 1/(16 lambda^2) decreases it monotonically;
// the fast variant adds FISTA-style momentum on the dual iterates. The primal
// solution is recovered as x = P_C(b - lambda L^T q).

namespace ctv {

enum class DenoiseMode { Fgp, Gp };

struct DenoiseParams {
    double lambda = 0.0;  // regularization weight, > 0
    TvVariant variant;
    ConstraintSet constraint = ConstraintSet::FullSpace;
    int iterations = 50;
    DenoiseMode mode = DenoiseMode::Fgp;
    std::optional<DualField> warm_start;  // cold start (q = 0) when absent
    bool record_trace = true;
};

struct DenoiseResult {
    ComplexField x;
    DualField q;
    std::vector<double> dual_objective_trace;
};

// ---------------------------------------------------------------------------
// Projection onto the dual set S

inline void project_dual_in_place(DualField& q, const TvVariant& variant) {
    const std::size_t m = q.rows(), n = q.cols();

    // Scales a pair into the ball of the given radius; radius 0 zeroes it.
    auto scale_pair = [](double& a, double& b, double radius) {
        const double nrm = std::hypot(a, b);
        const double den = std::max(radius, nrm);
        if (den > 0.0) {
            a = radius * a / den;
            b = radius * b / den;
        }
    };

    switch (variant.kind) {
        case TvKind::TypeIIsotropic: {
            // Interior quadruples into the unit 4-ball, boundary pairs into
            // unit 2-balls. The last column of (r1,s1) has no horizontal
            // partner and the last row of (r2,s2) no vertical one.
            for (std::size_t i = 0; i + 1 < m; ++i)
                for (std::size_t j = 0; j + 1 < n; ++j) {
                    double &a = q.r1(i, j), &b = q.r2(i, j), &c = q.s1(i, j), &d = q.s2(i, j);
                    const double nrm = std::sqrt(a * a + b * b + c * c + d * d);
                    if (nrm > 1.0) {
                        a /= nrm;
                        b /= nrm;
                        c /= nrm;
                        d /= nrm;
                    }
                }
            for (std::size_t i = 0; i + 1 < m; ++i) scale_pair(q.r1(i, n - 1), q.s1(i, n - 1), 1.0);
            for (std::size_t j = 0; j + 1 < n; ++j) scale_pair(q.r2(m - 1, j), q.s2(m - 1, j), 1.0);
            break;
        }
        case TvKind::TypeIAnisotropic: {
            for (std::size_t k = 0; k < q.r1.size(); ++k)
                scale_pair(q.r1.data()[k], q.s1.data()[k], 1.0);
            for (std::size_t k = 0; k < q.r2.size(); ++k)
                scale_pair(q.r2.data()[k], q.s2.data()[k], 1.0);
            break;
        }
        case TvKind::TypeIIIsotropic: {
            const double a = variant.alpha, b = 1.0 - variant.alpha;
            for (std::size_t i = 0; i + 1 < m; ++i)
                for (std::size_t j = 0; j + 1 < n; ++j) {
                    scale_pair(q.r1(i, j), q.r2(i, j), a);
                    scale_pair(q.s1(i, j), q.s2(i, j), b);
                }
            for (std::size_t i = 0; i + 1 < m; ++i) {
                q.r1(i, n - 1) = std::clamp(q.r1(i, n - 1), -a, a);
                q.s1(i, n - 1) = std::clamp(q.s1(i, n - 1), -b, b);
            }
            for (std::size_t j = 0; j + 1 < n; ++j) {
                q.r2(m - 1, j) = std::clamp(q.r2(m - 1, j), -a, a);
                q.s2(m - 1, j) = std::clamp(q.s2(m - 1, j), -b, b);
            }
            break;
        }
        case TvKind::TypeIIAnisotropic: {
            const double a = variant.alpha, b = 1.0 - variant.alpha;
            for (double& x : q.r1) x = std::clamp(x, -a, a);
            for (double& x : q.r2) x = std::clamp(x, -a, a);
            for (double& x : q.s1) x = std::clamp(x, -b, b);
            for (double& x : q.s2) x = std::clamp(x, -b, b);
            break;
        }
    }
}

inline DualField project_dual(const DualField& q, const TvVariant& variant) {
    DualField out = q;
    project_dual_in_place(out, variant);
    return out;
}

// ---------------------------------------------------------------------------
// Dual objective and gradient

namespace detail {

/// w = b - lambda * L^T(q)
inline void dual_to_primal_point(const DualField& q, const ComplexField& b, double lambda,
                                 ComplexField& w) {
    adjoint_diff(q, w);
    for (std::size_t k = 0; k < w.u.size(); ++k) {
        w.u.data()[k] = b.u.data()[k] - lambda * w.u.data()[k];
        w.v.data()[k] = b.v.data()[k] - lambda * w.v.data()[k];
    }
}

/// Writes scale * L(x) into a dual-shaped output.
inline void forward_diff_scaled(const ComplexField& x, double scale, DualField& out) {
    const std::size_t m = x.rows(), n = x.cols();
    for (std::size_t i = 0; i + 1 < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            out.r1(i, j) = scale * (x.u(i, j) - x.u(i + 1, j));
            out.s1(i, j) = scale * (x.v(i, j) - x.v(i + 1, j));
        }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j + 1 < n; ++j) {
            out.r2(i, j) = scale * (x.u(i, j) - x.u(i, j + 1));
            out.s2(i, j) = scale * (x.v(i, j) - x.v(i, j + 1));
        }
}

inline double dual_objective_at(const ComplexField& w, ConstraintSet constraint) {
    if (constraint == ConstraintSet::FullSpace) return sum_squares(w);
    // ||w||^2 - ||w - P_C(w)||^2, accumulated entrywise without forming P_C(w).
    double acc = 0.0;
    const double* pu = w.u.data();
    const double* pv = w.v.data();
    for (std::size_t k = 0; k < w.u.size(); ++k) {
        const double sq = pu[k] * pu[k] + pv[k] * pv[k];
        const double r = std::sqrt(sq);
        if (r > 1.0) {
            const double excess = r - 1.0;  // distance to the unit disk
            acc += sq - excess * excess;
        } else {
            acc += sq;
        }
    }
    return acc;
}

}  // namespace detail

inline double dual_objective(const DualField& q, const ComplexField& b, double lambda,
                             ConstraintSet constraint) {
    if (!(lambda > 0.0)) throw std::invalid_argument("dual_objective: lambda must be positive");
    ComplexField w = ComplexField::zeros(b.rows(), b.cols());
    detail::dual_to_primal_point(q, b, lambda, w);
    return detail::dual_objective_at(w, constraint);
}

inline DualField dual_gradient(const DualField& q, const ComplexField& b, double lambda,
                               ConstraintSet constraint) {
    if (!(lambda > 0.0)) throw std::invalid_argument("dual_gradient: lambda must be positive");
    ComplexField w = ComplexField::zeros(b.rows(), b.cols());
    detail::dual_to_primal_point(q, b, lambda, w);
    project_constraint_in_place(w, constraint);
    DualField g = DualField::zeros(b.rows(), b.cols());
    detail::forward_diff_scaled(w, -2.0 * lambda, g);
    return g;
}

// ---------------------------------------------------------------------------
// Gradient projection solvers

inline DenoiseResult denoise(const ComplexField& b, const DenoiseParams& params) {
    if (!(params.lambda > 0.0)) throw std::invalid_argument("denoise: lambda must be positive");
    if (params.iterations < 1) throw std::invalid_argument("denoise: iterations must be >= 1");
    if (!b.u.all_finite() || !b.v.all_finite())
        throw std::invalid_argument("denoise: non-finite observation");

    const std::size_t m = b.rows(), n = b.cols();
    const double lambda = params.lambda;
    const double step_over_grad = 1.0 / (8.0 * lambda);  // (1/16lambda^2) * 2lambda

    DualField q = DualField::zeros(m, n);
    if (params.warm_start) {
        if (params.warm_start->rows() != m || params.warm_start->cols() != n)
            throw std::invalid_argument("denoise: warm start shape mismatch");
        q = *params.warm_start;
    }
    DualField point = q;  // gradient evaluation point (r_k for FGP, q_k for GP)

    ComplexField w = ComplexField::zeros(m, n);
    DenoiseResult result;
    if (params.record_trace) {
        result.dual_objective_trace.reserve(static_cast<std::size_t>(params.iterations) + 1);
        detail::dual_to_primal_point(q, b, lambda, w);
        result.dual_objective_trace.push_back(detail::dual_objective_at(w, params.constraint));
    }

    double t = 1.0;

    for (int k = 1; k <= params.iterations; ++k) {
        // q_next = P_S(point + (1/8lambda) L(P_C(b - lambda L^T(point))))
        detail::dual_to_primal_point(point, b, lambda, w);
        project_constraint_in_place(w, params.constraint);

        DualField q_next = point;
        for (std::size_t i = 0; i + 1 < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                q_next.r1(i, j) += step_over_grad * (w.u(i, j) - w.u(i + 1, j));
                q_next.s1(i, j) += step_over_grad * (w.v(i, j) - w.v(i + 1, j));
            }
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j + 1 < n; ++j) {
                q_next.r2(i, j) += step_over_grad * (w.u(i, j) - w.u(i, j + 1));
                q_next.s2(i, j) += step_over_grad * (w.v(i, j) - w.v(i, j + 1));
            }
        project_dual_in_place(q_next, params.variant);

        if (params.mode == DenoiseMode::Gp) {
            q = std::move(q_next);
            point = q;
        } else {
            const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
            const double beta = (t - 1.0) / t_next;
            // point <- q_k + beta (q_k - q_{k-1}); q still holds q_{k-1} here
            auto extrapolate = [beta](Matrix& dst, const Matrix& cur, const Matrix& old) {
                for (std::size_t idx = 0; idx < dst.size(); ++idx)
                    dst.data()[idx] = cur.data()[idx] + beta * (cur.data()[idx] - old.data()[idx]);
            };
            extrapolate(point.r1, q_next.r1, q.r1);
            extrapolate(point.r2, q_next.r2, q.r2);
            extrapolate(point.s1, q_next.s1, q.s1);
            extrapolate(point.s2, q_next.s2, q.s2);
            q = std::move(q_next);
            t = t_next;
        }

        if (params.record_trace) {
            detail::dual_to_primal_point(q, b, lambda, w);
            result.dual_objective_trace.push_back(
                detail::dual_objective_at(w, params.constraint));
        }
    }

    detail::dual_to_primal_point(q, b, lambda, w);
    project_constraint_in_place(w, params.constraint);
    result.x = std::move(w);
    result.q = std::move(q);
    return result;
}

}  // namespace ctv
