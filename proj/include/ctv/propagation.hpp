#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "field.hpp"

// Angular spectrum free-space propagation and the intensity forward model.
// The transform pair is unitary (1/sqrt(mn) each way), so the transfer
// filter with |H| in {0, 1} makes propagation with -d both the adjoint and
// the inverse on the propagating band.

namespace ctv {

struct PropagatorConfig {
    double wavelength = 0.0;   // meters, > 0
    double distance = 0.0;     // meters, signed; negative back-propagates
    double pixel_pitch = 0.0;  // meters, > 0
    std::size_t rows = 0;
    std::size_t cols = 0;

    void validate() const {
        if (!(wavelength > 0.0)) throw std::invalid_argument("PropagatorConfig: wavelength <= 0");
        if (!(pixel_pitch > 0.0)) throw std::invalid_argument("PropagatorConfig: pixel_pitch <= 0");
        if (rows < 1 || cols < 1) throw std::invalid_argument("PropagatorConfig: empty grid");
        if (!std::isfinite(distance)) throw std::invalid_argument("PropagatorConfig: bad distance");
    }

    PropagatorConfig with_distance(double d) const {
        PropagatorConfig c = *this;
        c.distance = d;
        return c;
    }
};

/// Nonnegative intensity measurement |A(x)|^2.
struct Intensity {
    Matrix values;

    Intensity() = default;
    explicit Intensity(Matrix y) : values(std::move(y)) {
        if (!values.all_finite()) throw std::invalid_argument("Intensity: non-finite entries");
        for (double x : values)
            if (x < 0.0) throw std::invalid_argument("Intensity: negative entry");
    }

    std::size_t rows() const { return values.rows(); }
    std::size_t cols() const { return values.cols(); }
};

namespace detail {

// Signed frequency index of the unshifted spectrum: 0..N-1 -> centered range.
inline std::ptrdiff_t signed_freq_index(std::size_t k, std::size_t n) {
    return (k <= (n - 1) / 2) ? static_cast<std::ptrdiff_t>(k)
                              : static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(n);
}

struct FftPlan {
    std::size_t rows = 0, cols = 0;
    fftw_complex* buf = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    FftPlan(std::size_t m, std::size_t n) : rows(m), cols(n) {
        buf = fftw_alloc_complex(m * n);
        if (!buf) throw std::bad_alloc();
        fwd = fftw_plan_dft_2d(static_cast<int>(m), static_cast<int>(n), buf, buf, FFTW_FORWARD,
                               FFTW_ESTIMATE);
        bwd = fftw_plan_dft_2d(static_cast<int>(m), static_cast<int>(n), buf, buf, FFTW_BACKWARD,
                               FFTW_ESTIMATE);
        if (!fwd || !bwd) throw std::runtime_error("FFTW plan creation failed");
    }
    ~FftPlan() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (buf) fftw_free(buf);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
};

// Transfer function H in unshifted spectral order. Frequencies sample
// k/(N*pitch) over the centered index range; evanescent components
// (negative argument under the root) are cut to zero.
inline std::vector<std::complex<double>> make_transfer(const PropagatorConfig& cfg) {
    const std::size_t m = cfg.rows, n = cfg.cols;
    std::vector<std::complex<double>> h(m * n);
    const double phase_scale = 2.0 * std::numbers::pi / cfg.wavelength * cfg.distance;
    for (std::size_t i = 0; i < m; ++i) {
        const double fr =
            static_cast<double>(signed_freq_index(i, m)) / (static_cast<double>(m) * cfg.pixel_pitch);
        const double ar = cfg.wavelength * fr;
        for (std::size_t j = 0; j < n; ++j) {
            const double fc = static_cast<double>(signed_freq_index(j, n)) /
                              (static_cast<double>(n) * cfg.pixel_pitch);
            const double ac = cfg.wavelength * fc;
            const double arg = 1.0 - ar * ar - ac * ac;
            if (arg < 0.0) {
                h[i * n + j] = 0.0;
            } else {
                const double phase = phase_scale * std::sqrt(arg);
                h[i * n + j] = {std::cos(phase), std::sin(phase)};
            }
        }
    }
    return h;
}

// Plans and transfer filters are cached per shape / configuration behind one
// lock; FFTW_ESTIMATE planning keeps the cached plans deterministic.
struct PropagatorCache {
    std::mutex mutex;
    std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<FftPlan>> plans;
    std::map<std::tuple<std::size_t, std::size_t, double, double, double>,
             std::vector<std::complex<double>>>
        transfers;
};

inline PropagatorCache& propagator_cache() {
    static PropagatorCache cache;
    return cache;
}

}  // namespace detail

inline ComplexField propagate(const ComplexField& x, const PropagatorConfig& cfg) {
    cfg.validate();
    if (x.rows() != cfg.rows || x.cols() != cfg.cols)
        throw std::invalid_argument("propagate: field does not match configured grid");

    const std::size_t m = cfg.rows, n = cfg.cols, total = m * n;
    ComplexField out = ComplexField::zeros(m, n);

    auto& cache = detail::propagator_cache();
    std::lock_guard<std::mutex> lock(cache.mutex);

    auto& plan = cache.plans[{m, n}];
    if (!plan) plan = std::make_unique<detail::FftPlan>(m, n);

    const auto key = std::make_tuple(m, n, cfg.wavelength, cfg.pixel_pitch, cfg.distance);
    auto it = cache.transfers.find(key);
    if (it == cache.transfers.end())
        it = cache.transfers.emplace(key, detail::make_transfer(cfg)).first;
    const auto& transfer = it->second;

    const double* pu = x.u.data();
    const double* pv = x.v.data();
    for (std::size_t k = 0; k < total; ++k) {
        plan->buf[k][0] = pu[k];
        plan->buf[k][1] = pv[k];
    }
    fftw_execute(plan->fwd);
    for (std::size_t k = 0; k < total; ++k) {
        const std::complex<double> value(plan->buf[k][0], plan->buf[k][1]);
        const std::complex<double> filtered = value * transfer[k];
        plan->buf[k][0] = filtered.real();
        plan->buf[k][1] = filtered.imag();
    }
    fftw_execute(plan->bwd);

    const double scale = 1.0 / static_cast<double>(total);
    double* ou = out.u.data();
    double* ov = out.v.data();
    for (std::size_t k = 0; k < total; ++k) {
        ou[k] = plan->buf[k][0] * scale;
        ov[k] = plan->buf[k][1] * scale;
    }
    return out;
}

inline Intensity forward_intensity(const ComplexField& x, const PropagatorConfig& cfg) {
    const ComplexField field = propagate(x, cfg);
    Matrix y(field.rows(), field.cols());
    const double* pu = field.u.data();
    const double* pv = field.v.data();
    for (std::size_t k = 0; k < y.size(); ++k) y.data()[k] = pu[k] * pu[k] + pv[k] * pv[k];
    return Intensity(std::move(y));
}

/// Amplitude fidelity 1/2 || |A(x)| - sqrt(y) ||_F^2.
inline double fidelity_value(const ComplexField& x, const Intensity& y,
                             const PropagatorConfig& cfg) {
    if (y.rows() != cfg.rows || y.cols() != cfg.cols)
        throw std::invalid_argument("fidelity_value: intensity does not match configured grid");
    const ComplexField field = propagate(x, cfg);
    const double* pu = field.u.data();
    const double* pv = field.v.data();
    const double* py = y.values.data();
    double acc = 0.0;
    for (std::size_t k = 0; k < y.values.size(); ++k) {
        const double resid = std::sqrt(pu[k] * pu[k] + pv[k] * pv[k]) - std::sqrt(py[k]);
        acc += resid * resid;
    }
    return 0.5 * acc;
}

/// Gradient of fidelity_value with respect to the real pair (u, v):
/// A* applied to the unit-phase residual field. Zero-modulus samples get a
/// zero phase factor through the epsilon guard.
inline ComplexField fidelity_gradient(const ComplexField& x, const Intensity& y,
                                      const PropagatorConfig& cfg) {
    if (y.rows() != cfg.rows || y.cols() != cfg.cols)
        throw std::invalid_argument("fidelity_gradient: intensity does not match configured grid");
    constexpr double kModulusGuard = 1e-12;
    ComplexField sensor = propagate(x, cfg);
    const double* py = y.values.data();
    double* su = sensor.u.data();
    double* sv = sensor.v.data();
    for (std::size_t k = 0; k < y.values.size(); ++k) {
        const double mod = std::sqrt(su[k] * su[k] + sv[k] * sv[k]);
        const double factor = (mod - std::sqrt(py[k])) / std::max(mod, kModulusGuard);
        su[k] *= factor;
        sv[k] *= factor;
    }
    return propagate(sensor, cfg.with_distance(-cfg.distance));
}

}  // namespace ctv
