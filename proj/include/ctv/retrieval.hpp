#pragma once

#include <chrono>
#include <cstdint>
#include <optional>

#include "propagation.hpp"
#include "prox.hpp"
#include "random.hpp"
#include "tv_denoise.hpp"

// End-to-end single-shot phase retrieval: measurement simulation,
// back-propagated initialization, TV-regularized reconstruction via
// ISTA/FISTA with the dual denoiser as prox, the iterative-projection
// baseline, and the global-phase-invariant error metric.

namespace ctv {

enum class NoiseKind { None, IntensityGaussian, PhaseGaussian };

struct NoiseModel {
    NoiseKind kind = NoiseKind::None;
    double level = 0.0;  // std as a fraction of mean intensity, or radians

    static NoiseModel none() { return {}; }
    static NoiseModel intensity_gaussian(double level) {
        if (level < 0.0) throw std::invalid_argument("NoiseModel: negative level");
        return {NoiseKind::IntensityGaussian, level};
    }
    static NoiseModel phase_gaussian(double sigma) {
        if (sigma < 0.0) throw std::invalid_argument("NoiseModel: negative sigma");
        return {NoiseKind::PhaseGaussian, sigma};
    }
};

enum class RetrievalAlgorithm { Fista, Ista, Ip };

struct RetrievalParams {
    double tau = 0.0;  // TV weight in the outer objective; ignored by Ip
    TvVariant variant;
    ConstraintSet constraint = ConstraintSet::UnitDisk;
    int outer_iters = 150;
    int inner_iters = 10;  // FGP iterations per prox call
    RetrievalAlgorithm algorithm = RetrievalAlgorithm::Fista;
    bool warm_start_dual = true;
    std::uint64_t seed = 0;
    double gamma_init = 1.0;
};

struct RetrievalReport {
    ComplexField x_hat;
    std::vector<double> rmse_trace;       // empty unless a reference was supplied
    std::vector<double> objective_trace;  // F + tau*tv (FISTA/ISTA) or F (IP)
    double wall_time = 0.0;               // seconds; not part of the determinism contract
};

/// Rotates each pixel's argument by a zero-mean Gaussian draw, keeping moduli.
inline ComplexField add_phase_noise(const ComplexField& x, double sigma, std::uint64_t seed) {
    Rng rng(seed);
    ComplexField out = x;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double mag = x.modulus(i, j);
            const double arg = x.argument(i, j) + sigma * rng.normal();
            out.u(i, j) = mag * std::cos(arg);
            out.v(i, j) = mag * std::sin(arg);
        }
    return out;
}

inline Intensity simulate_measurement(const ComplexField& x_true, const PropagatorConfig& cfg,
                                      const NoiseModel& noise, std::uint64_t seed) {
    switch (noise.kind) {
        case NoiseKind::None:
            return forward_intensity(x_true, cfg);
        case NoiseKind::PhaseGaussian:
            return forward_intensity(add_phase_noise(x_true, noise.level, seed), cfg);
        case NoiseKind::IntensityGaussian: {
            Intensity clean = forward_intensity(x_true, cfg);
            Matrix y = std::move(clean.values);
            const double sd = noise.level * sum(y) / static_cast<double>(y.size());
            Rng rng(seed);
            for (double& value : y) value = std::max(0.0, value + sd * rng.normal());
            return Intensity(std::move(y));
        }
    }
    return forward_intensity(x_true, cfg);
}

/// Sensor-plane field with modulus sqrt(y) and zero phase, propagated back
/// by -d. The missing sensor phase is what produces the twin image.
inline ComplexField backpropagate_init(const Intensity& y, const PropagatorConfig& cfg) {
    if (y.rows() != cfg.rows || y.cols() != cfg.cols)
        throw std::invalid_argument("backpropagate_init: intensity does not match grid");
    ComplexField sensor = ComplexField::zeros(y.rows(), y.cols());
    for (std::size_t k = 0; k < y.values.size(); ++k)
        sensor.u.data()[k] = std::sqrt(y.values.data()[k]);
    return propagate(sensor, cfg.with_distance(-cfg.distance));
}

/// RMSE of the wrapped phase difference after removing the optimal global
/// rotation. Pixels with exactly zero modulus in either field are excluded;
/// throws if nothing remains.
inline double phase_rmse(const ComplexField& x_hat, const ComplexField& x_ref) {
    if (!x_hat.same_shape(x_ref)) throw std::invalid_argument("phase_rmse: shape mismatch");
    // phi* = arg sum x_hat conj(x_ref), the minimizer of ||x_hat e^{-i phi} - x_ref||.
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < x_hat.u.size(); ++k) {
        const double a = x_hat.u.data()[k], b = x_hat.v.data()[k];
        const double c = x_ref.u.data()[k], d = x_ref.v.data()[k];
        re += a * c + b * d;
        im += b * c - a * d;
    }
    const double phi = std::atan2(im, re);

    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < x_hat.rows(); ++i)
        for (std::size_t j = 0; j < x_hat.cols(); ++j) {
            if ((x_hat.u(i, j) == 0.0 && x_hat.v(i, j) == 0.0) ||
                (x_ref.u(i, j) == 0.0 && x_ref.v(i, j) == 0.0))
                continue;  // undefined phase
            const double d = std::remainder(x_hat.argument(i, j) - x_ref.argument(i, j) - phi,
                                            2.0 * std::numbers::pi);
            acc += d * d;
            ++count;
        }
    if (count == 0) throw std::invalid_argument("phase_rmse: no pixels with defined phase");
    return std::sqrt(acc / static_cast<double>(count));
}

/// Iterative projection baseline: alternate the sensor modulus constraint
/// with the object-domain unit disk.
inline RetrievalReport ip_retrieve(const Intensity& y, const PropagatorConfig& cfg, int iters,
                                   const ComplexField* x_ref = nullptr,
                                   const ComplexField* x0 = nullptr) {
    if (iters < 1) throw std::invalid_argument("ip_retrieve: iters must be >= 1");
    const auto start = std::chrono::steady_clock::now();
    constexpr double kModulusGuard = 1e-12;

    ComplexField x = x0 ? *x0 : backpropagate_init(y, cfg);
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw std::invalid_argument("ip_retrieve: start shape mismatch");

    RetrievalReport report;
    report.objective_trace.push_back(fidelity_value(x, y, cfg));
    if (x_ref) report.rmse_trace.push_back(phase_rmse(x, *x_ref));

    const PropagatorConfig back = cfg.with_distance(-cfg.distance);
    for (int k = 1; k <= iters; ++k) {
        ComplexField sensor = propagate(x, cfg);
        for (std::size_t idx = 0; idx < sensor.u.size(); ++idx) {
            const double a = sensor.u.data()[idx], b = sensor.v.data()[idx];
            const double mod = std::sqrt(a * a + b * b);
            const double factor = std::sqrt(y.values.data()[idx]) / std::max(mod, kModulusGuard);
            sensor.u.data()[idx] = a * factor;
            sensor.v.data()[idx] = b * factor;
        }
        x = propagate(sensor, back);
        project_constraint_in_place(x, ConstraintSet::UnitDisk);

        report.objective_trace.push_back(fidelity_value(x, y, cfg));
        if (x_ref) report.rmse_trace.push_back(phase_rmse(x, *x_ref));
    }
    report.x_hat = std::move(x);
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

/// TV-regularized retrieval: FISTA or ISTA on the amplitude fidelity with the
/// dual FGP denoiser as the prox (lambda = tau * gamma per call). Supplying
/// x_ref adds a per-iteration phase RMSE trace.
inline RetrievalReport retrieve(const Intensity& y, const PropagatorConfig& cfg,
                                const RetrievalParams& params,
                                const ComplexField* x_ref = nullptr,
                                const ComplexField* x0 = nullptr) {
    if (y.rows() != cfg.rows || y.cols() != cfg.cols)
        throw std::invalid_argument("retrieve: intensity does not match grid");
    if (x_ref && (x_ref->rows() != y.rows() || x_ref->cols() != y.cols()))
        throw std::invalid_argument("retrieve: reference shape mismatch");

    if (params.algorithm == RetrievalAlgorithm::Ip)
        return ip_retrieve(y, cfg, params.outer_iters, x_ref, x0);

    if (!(params.tau > 0.0)) throw std::invalid_argument("retrieve: tau must be positive");
    if (params.inner_iters < 1) throw std::invalid_argument("retrieve: inner_iters must be >= 1");

    const auto start = std::chrono::steady_clock::now();
    const ComplexField init = x0 ? *x0 : backpropagate_init(y, cfg);

    SmoothOracle smooth;
    smooth.value = [&y, &cfg](const ComplexField& x) { return fidelity_value(x, y, cfg); };
    smooth.gradient = [&y, &cfg](const ComplexField& x) { return fidelity_gradient(x, y, cfg); };

    std::optional<DualField> warm;
    ProxOracle prox;
    prox.apply = [&params, &warm](const ComplexField& z, double gamma) {
        DenoiseParams dp;
        dp.lambda = params.tau * gamma;
        dp.variant = params.variant;
        dp.constraint = params.constraint;
        dp.iterations = params.inner_iters;
        dp.mode = DenoiseMode::Fgp;
        dp.record_trace = false;
        if (params.warm_start_dual) dp.warm_start = warm;
        DenoiseResult res = denoise(z, dp);
        if (params.warm_start_dual) warm = std::move(res.q);
        return std::move(res.x);
    };
    prox.value = [&params](const ComplexField& x) {
        return params.tau * tv_seminorm(x, params.variant);
    };

    RetrievalReport report;
    if (x_ref) {
        report.rmse_trace.reserve(static_cast<std::size_t>(params.outer_iters) + 1);
        report.rmse_trace.push_back(phase_rmse(init, *x_ref));
    }
    IterateObserver observer;
    if (x_ref)
        observer = [&report, x_ref](int, const ComplexField& x) {
            report.rmse_trace.push_back(phase_rmse(x, *x_ref));
        };

    const LineSearchPolicy policy = LineSearchPolicy::backtrack(params.gamma_init);
    SolveResult solved = (params.algorithm == RetrievalAlgorithm::Fista)
                             ? fista(init, smooth, prox, params.outer_iters, policy, observer)
                             : ista(init, smooth, prox, params.outer_iters, policy, observer);

    report.x_hat = std::move(solved.x);
    report.objective_trace = std::move(solved.objective_trace);
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace ctv
