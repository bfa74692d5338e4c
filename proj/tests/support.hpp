#pragma once

// Shared helpers for the test suites: seeded random inputs, reference
// implementations used as oracles, and small synthetic images. Everything
// here stays independent of the solver paths it is used to check.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>

#include "ctv/ctv.hpp"

namespace support {

inline ctv::ComplexField random_field(ctv::Rng& rng, std::size_t m, std::size_t n,
                                      double amplitude = 1.0) {
    ctv::ComplexField x = ctv::ComplexField::zeros(m, n);
    for (double& v : x.u) v = rng.uniform(-amplitude, amplitude);
    for (double& v : x.v) v = rng.uniform(-amplitude, amplitude);
    return x;
}

/// Random field with modulus in [lo, hi] and uniform random phase; keeps the
/// fidelity term smooth by staying away from zero modulus.
inline ctv::ComplexField random_ring_field(ctv::Rng& rng, std::size_t m, std::size_t n,
                                           double lo = 0.5, double hi = 1.5) {
    ctv::ComplexField x = ctv::ComplexField::zeros(m, n);
    for (std::size_t k = 0; k < x.u.size(); ++k) {
        const double mag = rng.uniform(lo, hi);
        const double phase = rng.uniform(-std::numbers::pi, std::numbers::pi);
        x.u.data()[k] = mag * std::cos(phase);
        x.v.data()[k] = mag * std::sin(phase);
    }
    return x;
}

inline ctv::DualField random_dual(ctv::Rng& rng, std::size_t m, std::size_t n,
                                  double amplitude = 1.0) {
    ctv::DualField q = ctv::DualField::zeros(m, n);
    for (double& v : q.r1) v = rng.uniform(-amplitude, amplitude);
    for (double& v : q.r2) v = rng.uniform(-amplitude, amplitude);
    for (double& v : q.s1) v = rng.uniform(-amplitude, amplitude);
    for (double& v : q.s2) v = rng.uniform(-amplitude, amplitude);
    return q;
}

// ---------------------------------------------------------------------------
// Reference real TV seminorms, written directly from the defining sums over
// the image (no shared difference code).

inline double reference_real_tv_iso(const ctv::Matrix& x) {
    const std::size_t m = x.rows(), n = x.cols();
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < m; ++j)
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double dv = x(j, k) - x(j + 1, k);
            const double dh = x(j, k) - x(j, k + 1);
            acc += std::sqrt(dv * dv + dh * dh);
        }
    for (std::size_t j = 0; j + 1 < m; ++j) acc += std::abs(x(j, n - 1) - x(j + 1, n - 1));
    for (std::size_t k = 0; k + 1 < n; ++k) acc += std::abs(x(m - 1, k) - x(m - 1, k + 1));
    return acc;
}

inline double reference_real_tv_aniso(const ctv::Matrix& x) {
    const std::size_t m = x.rows(), n = x.cols();
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < m; ++j)
        for (std::size_t k = 0; k + 1 < n; ++k)
            acc += std::abs(x(j, k) - x(j + 1, k)) + std::abs(x(j, k) - x(j, k + 1));
    for (std::size_t j = 0; j + 1 < m; ++j) acc += std::abs(x(j, n - 1) - x(j + 1, n - 1));
    for (std::size_t k = 0; k + 1 < n; ++k) acc += std::abs(x(m - 1, k) - x(m - 1, k + 1));
    return acc;
}

// ---------------------------------------------------------------------------
// Independent plain gradient-projection denoiser. Re-implements the dual
// iteration directly from the formulas (differences, adjoint, both
// projections) so it shares no code with the library solver it checks.

struct OracleDenoiseResult {
    ctv::ComplexField x;
    std::size_t iterations_used = 0;
};

inline OracleDenoiseResult oracle_gp_denoise(const ctv::ComplexField& b, double lambda,
                                             const ctv::TvVariant& variant,
                                             ctv::ConstraintSet constraint,
                                             std::size_t max_iters = 1000000,
                                             double step_tol = 1e-12) {
    const std::size_t m = b.rows(), n = b.cols();
    ctv::Matrix r1(m - 1, n), r2(m, n - 1), s1(m - 1, n), s2(m, n - 1);
    ctv::Matrix wu(m, n), wv(m, n);

    auto compute_primal = [&]() {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double du = 0.0, dv = 0.0;
                if (i + 1 < m) { du += r1(i, j); dv += s1(i, j); }
                if (i > 0) { du -= r1(i - 1, j); dv -= s1(i - 1, j); }
                if (j + 1 < n) { du += r2(i, j); dv += s2(i, j); }
                if (j > 0) { du -= r2(i, j - 1); dv -= s2(i, j - 1); }
                wu(i, j) = b.u(i, j) - lambda * du;
                wv(i, j) = b.v(i, j) - lambda * dv;
            }
        if (constraint == ctv::ConstraintSet::UnitDisk)
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    const double mod = std::sqrt(wu(i, j) * wu(i, j) + wv(i, j) * wv(i, j));
                    if (mod > 1.0) {
                        wu(i, j) /= mod;
                        wv(i, j) /= mod;
                    }
                }
    };

    const double coeff = 1.0 / (8.0 * lambda);
    const double a = variant.alpha, bb = 1.0 - variant.alpha;
    std::size_t used = max_iters;

    for (std::size_t iter = 1; iter <= max_iters; ++iter) {
        compute_primal();

        ctv::Matrix nr1 = r1, nr2 = r2, ns1 = s1, ns2 = s2;
        for (std::size_t i = 0; i + 1 < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                nr1(i, j) += coeff * (wu(i, j) - wu(i + 1, j));
                ns1(i, j) += coeff * (wv(i, j) - wv(i + 1, j));
            }
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j + 1 < n; ++j) {
                nr2(i, j) += coeff * (wu(i, j) - wu(i, j + 1));
                ns2(i, j) += coeff * (wv(i, j) - wv(i, j + 1));
            }

        auto ball2 = [](double& x, double& y, double radius) {
            const double nrm = std::sqrt(x * x + y * y);
            if (nrm > radius) {
                const double f = radius > 0.0 ? radius / nrm : 0.0;
                x *= f;
                y *= f;
            }
        };
        auto clamp1 = [](double& x, double radius) {
            if (x > radius) x = radius;
            if (x < -radius) x = -radius;
        };

        switch (variant.kind) {
            case ctv::TvKind::TypeIIsotropic:
                for (std::size_t i = 0; i + 1 < m; ++i)
                    for (std::size_t j = 0; j + 1 < n; ++j) {
                        const double nrm =
                            std::sqrt(nr1(i, j) * nr1(i, j) + nr2(i, j) * nr2(i, j) +
                                      ns1(i, j) * ns1(i, j) + ns2(i, j) * ns2(i, j));
                        if (nrm > 1.0) {
                            nr1(i, j) /= nrm;
                            nr2(i, j) /= nrm;
                            ns1(i, j) /= nrm;
                            ns2(i, j) /= nrm;
                        }
                    }
                for (std::size_t i = 0; i + 1 < m; ++i) ball2(nr1(i, n - 1), ns1(i, n - 1), 1.0);
                for (std::size_t j = 0; j + 1 < n; ++j) ball2(nr2(m - 1, j), ns2(m - 1, j), 1.0);
                break;
            case ctv::TvKind::TypeIAnisotropic:
                for (std::size_t i = 0; i + 1 < m; ++i)
                    for (std::size_t j = 0; j < n; ++j) ball2(nr1(i, j), ns1(i, j), 1.0);
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j + 1 < n; ++j) ball2(nr2(i, j), ns2(i, j), 1.0);
                break;
            case ctv::TvKind::TypeIIIsotropic:
                for (std::size_t i = 0; i + 1 < m; ++i)
                    for (std::size_t j = 0; j + 1 < n; ++j) {
                        ball2(nr1(i, j), nr2(i, j), a);
                        ball2(ns1(i, j), ns2(i, j), bb);
                    }
                for (std::size_t i = 0; i + 1 < m; ++i) {
                    clamp1(nr1(i, n - 1), a);
                    clamp1(ns1(i, n - 1), bb);
                }
                for (std::size_t j = 0; j + 1 < n; ++j) {
                    clamp1(nr2(m - 1, j), a);
                    clamp1(ns2(m - 1, j), bb);
                }
                break;
            case ctv::TvKind::TypeIIAnisotropic:
                for (double& v : nr1) clamp1(v, a);
                for (double& v : nr2) clamp1(v, a);
                for (double& v : ns1) clamp1(v, bb);
                for (double& v : ns2) clamp1(v, bb);
                break;
        }

        double step_sq = 0.0;
        auto accumulate = [&step_sq](const ctv::Matrix& next, const ctv::Matrix& prev) {
            for (std::size_t k = 0; k < next.size(); ++k) {
                const double d = next.data()[k] - prev.data()[k];
                step_sq += d * d;
            }
        };
        accumulate(nr1, r1);
        accumulate(nr2, r2);
        accumulate(ns1, s1);
        accumulate(ns2, s2);

        r1 = std::move(nr1);
        r2 = std::move(nr2);
        s1 = std::move(ns1);
        s2 = std::move(ns2);

        if (std::sqrt(step_sq) < step_tol) {
            used = iter;
            break;
        }
    }

    compute_primal();
    OracleDenoiseResult result;
    result.x = ctv::ComplexField(std::move(wu), std::move(wv));
    result.iterations_used = used;
    return result;
}

// ---------------------------------------------------------------------------
// Random feasible points of the dual set S, by rejection sampling per block.

inline ctv::DualField random_feasible_dual(ctv::Rng& rng, std::size_t m, std::size_t n,
                                           const ctv::TvVariant& variant) {
    ctv::DualField q = ctv::DualField::zeros(m, n);
    auto pair_in_ball = [&rng](double& x, double& y, double radius) {
        if (radius <= 0.0) {
            x = y = 0.0;
            return;
        }
        do {
            x = rng.uniform(-radius, radius);
            y = rng.uniform(-radius, radius);
        } while (x * x + y * y > radius * radius);
    };
    const double a = variant.alpha, b = 1.0 - variant.alpha;

    switch (variant.kind) {
        case ctv::TvKind::TypeIIsotropic:
            for (std::size_t i = 0; i + 1 < m; ++i)
                for (std::size_t j = 0; j + 1 < n; ++j) {
                    double w, x, y, z;
                    do {
                        w = rng.uniform(-1.0, 1.0);
                        x = rng.uniform(-1.0, 1.0);
                        y = rng.uniform(-1.0, 1.0);
                        z = rng.uniform(-1.0, 1.0);
                    } while (w * w + x * x + y * y + z * z > 1.0);
                    q.r1(i, j) = w;
                    q.r2(i, j) = x;
                    q.s1(i, j) = y;
                    q.s2(i, j) = z;
                }
            for (std::size_t i = 0; i + 1 < m; ++i) pair_in_ball(q.r1(i, n - 1), q.s1(i, n - 1), 1.0);
            for (std::size_t j = 0; j + 1 < n; ++j) pair_in_ball(q.r2(m - 1, j), q.s2(m - 1, j), 1.0);
            break;
        case ctv::TvKind::TypeIAnisotropic:
            for (std::size_t i = 0; i + 1 < m; ++i)
                for (std::size_t j = 0; j < n; ++j) pair_in_ball(q.r1(i, j), q.s1(i, j), 1.0);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j + 1 < n; ++j) pair_in_ball(q.r2(i, j), q.s2(i, j), 1.0);
            break;
        case ctv::TvKind::TypeIIIsotropic:
            for (std::size_t i = 0; i + 1 < m; ++i)
                for (std::size_t j = 0; j + 1 < n; ++j) {
                    pair_in_ball(q.r1(i, j), q.r2(i, j), a);
                    pair_in_ball(q.s1(i, j), q.s2(i, j), b);
                }
            for (std::size_t i = 0; i + 1 < m; ++i) {
                q.r1(i, n - 1) = rng.uniform(-a, a);
                q.s1(i, n - 1) = rng.uniform(-b, b);
            }
            for (std::size_t j = 0; j + 1 < n; ++j) {
                q.r2(m - 1, j) = rng.uniform(-a, a);
                q.s2(m - 1, j) = rng.uniform(-b, b);
            }
            break;
        case ctv::TvKind::TypeIIAnisotropic:
            for (double& v : q.r1) v = rng.uniform(-a, a);
            for (double& v : q.r2) v = rng.uniform(-a, a);
            for (double& v : q.s1) v = rng.uniform(-b, b);
            for (double& v : q.s2) v = rng.uniform(-b, b);
            break;
    }
    return q;
}

/// Worst violation of the variant's dual constraints (0 when feasible).
inline double dual_feasibility_violation(const ctv::DualField& q, const ctv::TvVariant& variant) {
    const std::size_t m = q.rows(), n = q.cols();
    double worst = 0.0;
    auto check = [&worst](double value, double radius) {
        worst = std::max(worst, value - radius);
    };
    const double a = variant.alpha, b = 1.0 - variant.alpha;
    switch (variant.kind) {
        case ctv::TvKind::TypeIIsotropic:
            for (std::size_t i = 0; i + 1 < m; ++i)
                for (std::size_t j = 0; j + 1 < n; ++j)
                    check(std::sqrt(q.r1(i, j) * q.r1(i, j) + q.r2(i, j) * q.r2(i, j) +
                                    q.s1(i, j) * q.s1(i, j) + q.s2(i, j) * q.s2(i, j)),
                          1.0);
            for (std::size_t i = 0; i + 1 < m; ++i)
                check(std::hypot(q.r1(i, n - 1), q.s1(i, n - 1)), 1.0);
            for (std::size_t j = 0; j + 1 < n; ++j)
                check(std::hypot(q.r2(m - 1, j), q.s2(m - 1, j)), 1.0);
            break;
        case ctv::TvKind::TypeIAnisotropic:
            for (std::size_t i = 0; i + 1 < m; ++i)
                for (std::size_t j = 0; j < n; ++j) check(std::hypot(q.r1(i, j), q.s1(i, j)), 1.0);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j + 1 < n; ++j)
                    check(std::hypot(q.r2(i, j), q.s2(i, j)), 1.0);
            break;
        case ctv::TvKind::TypeIIIsotropic:
            for (std::size_t i = 0; i + 1 < m; ++i)
                for (std::size_t j = 0; j + 1 < n; ++j) {
                    check(std::hypot(q.r1(i, j), q.r2(i, j)), a);
                    check(std::hypot(q.s1(i, j), q.s2(i, j)), b);
                }
            for (std::size_t i = 0; i + 1 < m; ++i) {
                check(std::abs(q.r1(i, n - 1)), a);
                check(std::abs(q.s1(i, n - 1)), b);
            }
            for (std::size_t j = 0; j + 1 < n; ++j) {
                check(std::abs(q.r2(m - 1, j)), a);
                check(std::abs(q.s2(m - 1, j)), b);
            }
            break;
        case ctv::TvKind::TypeIIAnisotropic:
            for (double v : q.r1) check(std::abs(v), a);
            for (double v : q.r2) check(std::abs(v), a);
            for (double v : q.s1) check(std::abs(v), b);
            for (double v : q.s2) check(std::abs(v), b);
            break;
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Synthetic piecewise-smooth test image in [0, 1] and the matching pure
// phase object (phase = pi * image).

inline ctv::Matrix test_image(std::size_t m, std::size_t n) {
    ctv::Matrix img(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double y = static_cast<double>(i) / static_cast<double>(m);
            const double x = static_cast<double>(j) / static_cast<double>(n);
            double value = 0.15 + 0.2 * x;
            const double dx = x - 0.35, dy = y - 0.4;
            if (dx * dx + dy * dy < 0.04) value = 0.85;
            if (x > 0.55 && x < 0.85 && y > 0.55 && y < 0.8) value = 0.65;
            const double r = std::sqrt((x - 0.7) * (x - 0.7) + (y - 0.25) * (y - 0.25));
            if (r > 0.1 && r < 0.14) value = 0.95;
            img(i, j) = value;
        }
    return img;
}

inline ctv::ComplexField phase_object(const ctv::Matrix& image01) {
    ctv::ComplexField x = ctv::ComplexField::zeros(image01.rows(), image01.cols());
    for (std::size_t k = 0; k < image01.size(); ++k) {
        const double phase = std::numbers::pi * image01.data()[k];
        x.u.data()[k] = std::cos(phase);
        x.v.data()[k] = std::sin(phase);
    }
    return x;
}

/// Benchmark physics: 5 um pitch, 500 nm illumination, 5 mm distance.
inline ctv::PropagatorConfig benchmark_config(std::size_t rows, std::size_t cols) {
    ctv::PropagatorConfig cfg;
    cfg.wavelength = 500e-9;
    cfg.distance = 5e-3;
    cfg.pixel_pitch = 5e-6;
    cfg.rows = rows;
    cfg.cols = cols;
    return cfg;
}

/// Validates a smooth oracle against central differences on construction,
/// standing in for a registration-time consistency check in test builds.
inline ctv::SmoothOracle make_checked_oracle(ctv::SmoothOracle oracle,
                                             const ctv::ComplexField& probe,
                                             double tolerance = 1e-5) {
    const double err = ctv::gradient_check(oracle, probe, 10, 1e-6, 1234);
    if (err > tolerance)
        throw std::logic_error("smooth oracle failed finite-difference check: error " +
                               std::to_string(err));
    return oracle;
}

/// Scratch directory for file-format and CLI tests.
inline std::filesystem::path test_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("ctv_test_" + name);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace support
