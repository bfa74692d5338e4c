#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "field.hpp"
#include "random.hpp"

// Proximal gradient machinery for composite problems F(x) + R(x) with smooth
// F and prox-accessible R, over complex fields. ista runs the basic forward-
// backward iteration; fista adds Nesterov momentum with the gradient taken at
// the extrapolated point.

namespace ctv {

struct SmoothOracle {
    std::function<double(const ComplexField&)> value;
    std::function<ComplexField(const ComplexField&)> gradient;
};

struct ProxOracle {
    /// Computes prox_{gamma R}(x).
    std::function<ComplexField(const ComplexField&, double gamma)> apply;
    /// Finite part of R, used only for objective traces. Null means R = 0.
    std::function<double(const ComplexField&)> value;

    static ProxOracle identity() {
        ProxOracle p;
        p.apply = [](const ComplexField& x, double) { return x; };
        return p;
    }
};

struct LineSearchPolicy {
    double gamma_init = 1.0;
    bool backtracking = true;
    double shrink = 0.5;
    double gamma_min = 1e-12;

    static LineSearchPolicy fixed(double gamma) { return {gamma, false, 0.5, 1e-12}; }
    static LineSearchPolicy backtrack(double gamma0 = 1.0) { return {gamma0, true, 0.5, 1e-12}; }
};

struct SolveResult {
    ComplexField x;
    std::vector<double> objective_trace;  // F + R at the initial point and each iterate
    double final_step = 0.0;
};

using IterateObserver = std::function<void(int iteration, const ComplexField& x)>;

namespace detail {

inline double composite_value(const SmoothOracle& smooth, const ProxOracle& prox,
                              const ComplexField& x) {
    double val = smooth.value(x);
    if (prox.value) val += prox.value(x);
    return val;
}

}  // namespace detail

/// One backtracking step from z: halves gamma until the prox-gradient
/// candidate passes the quadratic majorizer test
///   F(x+) <= F(z) + <grad F(z), x+ - z> + ||x+ - z||^2 / (2 gamma).
/// Returns the candidate and the accepted gamma. Throws if gamma falls below
/// policy.gamma_min without acceptance.
inline std::pair<ComplexField, double> backtrack_step(const ComplexField& z,
                                                      const SmoothOracle& smooth,
                                                      const ProxOracle& prox, double gamma_init,
                                                      const LineSearchPolicy& policy = {}) {
    if (!(gamma_init > 0.0)) throw std::invalid_argument("backtrack_step: gamma_init must be > 0");
    const double fz = smooth.value(z);
    const ComplexField grad = smooth.gradient(z);
    double gamma = gamma_init;
    ComplexField shifted = ComplexField::zeros(z.rows(), z.cols());
    while (true) {
        add_scaled(z, -gamma, grad, shifted);
        ComplexField candidate = prox.apply(shifted, gamma);
        const ComplexField diff = candidate - z;
        const double bound = fz + inner(grad, diff) + sum_squares(diff) / (2.0 * gamma);
        if (smooth.value(candidate) <= bound) return {std::move(candidate), gamma};
        gamma *= policy.shrink;
        if (gamma < policy.gamma_min)
            throw std::runtime_error("backtrack_step: step size collapsed below gamma_min");
    }
}

namespace detail {

inline SolveResult proximal_gradient(const ComplexField& x0, const SmoothOracle& smooth,
                                     const ProxOracle& prox, int iterations,
                                     const LineSearchPolicy& policy, bool accelerated,
                                     const IterateObserver& observer) {
    if (iterations < 1) throw std::invalid_argument("proximal gradient: iterations must be >= 1");

    SolveResult result;
    result.objective_trace.reserve(static_cast<std::size_t>(iterations) + 1);
    result.objective_trace.push_back(composite_value(smooth, prox, x0));

    ComplexField x = x0;
    ComplexField z = x0;
    ComplexField shifted = ComplexField::zeros(x0.rows(), x0.cols());
    double t = 1.0;
    double gamma = policy.gamma_init;

    for (int k = 1; k <= iterations; ++k) {
        const ComplexField& eval_point = accelerated ? z : x;
        ComplexField next;
        if (policy.backtracking) {
            // Carry gamma across iterations, probing upward once per step.
            auto [cand, accepted] = backtrack_step(eval_point, smooth, prox, 2.0 * gamma, policy);
            gamma = accepted;
            next = std::move(cand);
        } else {
            add_scaled(eval_point, -gamma, smooth.gradient(eval_point), shifted);
            next = prox.apply(shifted, gamma);
        }

        if (accelerated) {
            const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
            const double beta = (t - 1.0) / t_next;
            // z_{k+1} = x_k + beta (x_k - x_{k-1}); x still holds x_{k-1}
            for (std::size_t i = 0; i < z.u.size(); ++i) {
                z.u.data()[i] = next.u.data()[i] + beta * (next.u.data()[i] - x.u.data()[i]);
                z.v.data()[i] = next.v.data()[i] + beta * (next.v.data()[i] - x.v.data()[i]);
            }
            t = t_next;
        }
        x = std::move(next);

        result.objective_trace.push_back(composite_value(smooth, prox, x));
        if (observer) observer(k, x);
    }
    result.x = std::move(x);
    result.final_step = gamma;
    return result;
}

}  // namespace detail

/// Basic proximal gradient iteration x_{k+1} = prox_{gamma R}(x_k - gamma grad F(x_k)).
inline SolveResult ista(const ComplexField& x0, const SmoothOracle& smooth, const ProxOracle& prox,
                        int iterations, const LineSearchPolicy& policy = {},
                        const IterateObserver& observer = {}) {
    return detail::proximal_gradient(x0, smooth, prox, iterations, policy, false, observer);
}

/// Accelerated variant: gradient at the extrapolated point z_k, momentum
/// t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2, z_{k+1} = x_k + ((t_k-1)/t_{k+1})(x_k - x_{k-1}).
inline SolveResult fista(const ComplexField& x0, const SmoothOracle& smooth,
                         const ProxOracle& prox, int iterations,
                         const LineSearchPolicy& policy = {},
                         const IterateObserver& observer = {}) {
    return detail::proximal_gradient(x0, smooth, prox, iterations, policy, true, observer);
}

/// Central-difference check of a smooth oracle's gradient at x over a few
/// seeded coordinates. Returns the worst value of |fd - g| / (1 + |fd|).
inline double gradient_check(const SmoothOracle& smooth, const ComplexField& x, int coords = 10,
                             double h = 1e-6, std::uint64_t seed = 7) {
    Rng rng(seed);
    const ComplexField grad = smooth.gradient(x);
    double worst = 0.0;
    for (int c = 0; c < coords; ++c) {
        const std::size_t i = rng.next_u64() % x.rows();
        const std::size_t j = rng.next_u64() % x.cols();
        const bool imag_part = (rng.next_u64() & 1) != 0;
        ComplexField probe = x;
        double& entry = imag_part ? probe.v(i, j) : probe.u(i, j);
        const double saved = entry;
        entry = saved + h;
        const double fp = smooth.value(probe);
        entry = saved - h;
        const double fm = smooth.value(probe);
        entry = saved;
        const double fd = (fp - fm) / (2.0 * h);
        const double g = imag_part ? grad.v(i, j) : grad.u(i, j);
        worst = std::max(worst, std::abs(fd - g) / (1.0 + std::abs(fd)));
    }
    return worst;
}

}  // namespace ctv
