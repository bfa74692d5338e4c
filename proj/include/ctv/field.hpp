#pragma once

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <utility>

#include "matrix.hpp"

namespace ctv {

/// Complex m x n image stored as a pair of real matrices: u holds the real
/// part, v the imaginary part. Construction rejects shape mismatches and
/// non-finite entries.
struct ComplexField {
    Matrix u;
    Matrix v;

    ComplexField() = default;
    ComplexField(Matrix real_part, Matrix imag_part)
        : u(std::move(real_part)), v(std::move(imag_part)) {
        if (!u.same_shape(v)) throw std::invalid_argument("ComplexField: real/imag shape mismatch");
        if (u.rows() < 1 || u.cols() < 1) throw std::invalid_argument("ComplexField: empty field");
        if (!u.all_finite() || !v.all_finite())
            throw std::invalid_argument("ComplexField: non-finite entries");
    }

    static ComplexField zeros(std::size_t rows, std::size_t cols) {
        return ComplexField(Matrix(rows, cols), Matrix(rows, cols));
    }
    static ComplexField constant(std::size_t rows, std::size_t cols, double re, double im = 0.0) {
        return ComplexField(Matrix(rows, cols, re), Matrix(rows, cols, im));
    }

    std::size_t rows() const { return u.rows(); }
    std::size_t cols() const { return u.cols(); }
    bool same_shape(const ComplexField& other) const { return u.same_shape(other.u); }

    std::complex<double> at(std::size_t i, std::size_t j) const { return {u(i, j), v(i, j)}; }
    double modulus(std::size_t i, std::size_t j) const { return std::hypot(u(i, j), v(i, j)); }
    double argument(std::size_t i, std::size_t j) const { return std::atan2(v(i, j), u(i, j)); }
};

/// Vertical and horizontal finite differences of a field: u1, v1 are
/// (m-1) x n, u2, v2 are m x (n-1).
struct DiffField {
    Matrix u1, u2, v1, v2;

    DiffField() = default;
    DiffField(Matrix u1_, Matrix u2_, Matrix v1_, Matrix v2_)
        : u1(std::move(u1_)), u2(std::move(u2_)), v1(std::move(v1_)), v2(std::move(v2_)) {
        check_shapes(u1, u2, v1, v2, "DiffField");
    }

    static DiffField zeros(std::size_t rows, std::size_t cols) {
        if (rows < 1 || cols < 1) throw std::invalid_argument("DiffField: empty source grid");
        DiffField p;
        p.u1 = Matrix(rows - 1, cols);
        p.u2 = Matrix(rows, cols - 1);
        p.v1 = Matrix(rows - 1, cols);
        p.v2 = Matrix(rows, cols - 1);
        return p;
    }

    // Source image dimensions; valid even when a difference matrix is empty.
    std::size_t rows() const { return u2.rows(); }
    std::size_t cols() const { return u1.cols(); }

    static void check_shapes(const Matrix& a1, const Matrix& a2, const Matrix& b1,
                             const Matrix& b2, const char* what) {
        const std::size_t m = a2.rows();
        const std::size_t n = a1.cols();
        if (m < 1 || n < 1 || a1.rows() + 1 != m || a2.cols() + 1 != n || !b1.same_shape(a1) ||
            !b2.same_shape(a2))
            throw std::invalid_argument(std::string(what) + ": inconsistent component shapes");
    }
};

/// Dual variable living on the difference grid: r1, s1 are (m-1) x n,
/// r2, s2 are m x (n-1). Feasibility with respect to a dual ball set is not
/// a type invariant; it is enforced by projection.
struct DualField {
    Matrix r1, r2, s1, s2;

    DualField() = default;
    DualField(Matrix r1_, Matrix r2_, Matrix s1_, Matrix s2_)
        : r1(std::move(r1_)), r2(std::move(r2_)), s1(std::move(s1_)), s2(std::move(s2_)) {
        DiffField::check_shapes(r1, r2, s1, s2, "DualField");
    }

    static DualField zeros(std::size_t rows, std::size_t cols) {
        if (rows < 1 || cols < 1) throw std::invalid_argument("DualField: empty source grid");
        DualField q;
        q.r1 = Matrix(rows - 1, cols);
        q.r2 = Matrix(rows, cols - 1);
        q.s1 = Matrix(rows - 1, cols);
        q.s2 = Matrix(rows, cols - 1);
        return q;
    }

    std::size_t rows() const { return r2.rows(); }
    std::size_t cols() const { return r1.cols(); }
    bool same_shape(const DualField& other) const {
        return r1.same_shape(other.r1) && r2.same_shape(other.r2);
    }
};

enum class TvKind { TypeIIsotropic, TypeIAnisotropic, TypeIIIsotropic, TypeIIAnisotropic };

/// Seminorm selector. alpha weights the real-part term of the type-II
/// seminorms and is ignored for type-I.
struct TvVariant {
    TvKind kind = TvKind::TypeIAnisotropic;
    double alpha = 0.5;

    static TvVariant type1_iso() { return {TvKind::TypeIIsotropic, 0.5}; }
    static TvVariant type1_aniso() { return {TvKind::TypeIAnisotropic, 0.5}; }
    static TvVariant type2_iso(double alpha) { return checked(TvKind::TypeIIIsotropic, alpha); }
    static TvVariant type2_aniso(double alpha) { return checked(TvKind::TypeIIAnisotropic, alpha); }

    bool is_type2() const {
        return kind == TvKind::TypeIIIsotropic || kind == TvKind::TypeIIAnisotropic;
    }

private:
    static TvVariant checked(TvKind kind, double alpha) {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw std::invalid_argument("TvVariant: alpha must lie in [0,1]");
        return {kind, alpha};
    }
};

/// Object-domain constraint set: either no constraint or the elementwise
/// unit disk u^2 + v^2 <= 1.
enum class ConstraintSet { FullSpace, UnitDisk };

// ---------------------------------------------------------------------------
// Finite differences and their adjoint

inline void forward_diff(const ComplexField& x, DiffField& out) {
    const std::size_t m = x.rows(), n = x.cols();
    for (std::size_t i = 0; i + 1 < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            out.u1(i, j) = x.u(i, j) - x.u(i + 1, j);
            out.v1(i, j) = x.v(i, j) - x.v(i + 1, j);
        }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j + 1 < n; ++j) {
            out.u2(i, j) = x.u(i, j) - x.u(i, j + 1);
            out.v2(i, j) = x.v(i, j) - x.v(i, j + 1);
        }
}

inline DiffField forward_diff(const ComplexField& x) {
    DiffField out = DiffField::zeros(x.rows(), x.cols());
    forward_diff(x, out);
    return out;
}

/// Adjoint of forward_diff under the elementwise inner product: a discrete
/// negative divergence with zero boundary terms.
inline void adjoint_diff(const DualField& q, ComplexField& out) {
    const std::size_t m = q.rows(), n = q.cols();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double a = 0.0, b = 0.0;
            if (i + 1 < m) {
                a += q.r1(i, j);
                b += q.s1(i, j);
            }
            if (i > 0) {
                a -= q.r1(i - 1, j);
                b -= q.s1(i - 1, j);
            }
            if (j + 1 < n) {
                a += q.r2(i, j);
                b += q.s2(i, j);
            }
            if (j > 0) {
                a -= q.r2(i, j - 1);
                b -= q.s2(i, j - 1);
            }
            out.u(i, j) = a;
            out.v(i, j) = b;
        }
}

inline ComplexField adjoint_diff(const DualField& q) {
    ComplexField out = ComplexField::zeros(q.rows(), q.cols());
    adjoint_diff(q, out);
    return out;
}

// ---------------------------------------------------------------------------
// TV seminorms

namespace detail {

// Real seminorms over a precomputed difference pair d1: (m-1) x n, d2: m x (n-1).
inline double real_tv_iso(const Matrix& d1, const Matrix& d2) {
    const std::size_t m = d2.rows(), n = d1.cols();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i)
        for (std::size_t j = 0; j + 1 < n; ++j) acc += std::hypot(d1(i, j), d2(i, j));
    for (std::size_t i = 0; i + 1 < m; ++i) acc += std::abs(d1(i, n - 1));
    for (std::size_t j = 0; j + 1 < n; ++j) acc += std::abs(d2(m - 1, j));
    return acc;
}

inline double real_tv_aniso(const Matrix& d1, const Matrix& d2) {
    double acc = 0.0;
    for (double x : d1) acc += std::abs(x);
    for (double x : d2) acc += std::abs(x);
    return acc;
}

}  // namespace detail

inline double tv_seminorm(const DiffField& p, const TvVariant& variant) {
    const std::size_t m = p.rows(), n = p.cols();
    double acc = 0.0;
    switch (variant.kind) {
        case TvKind::TypeIIsotropic:
            for (std::size_t i = 0; i + 1 < m; ++i)
                for (std::size_t j = 0; j + 1 < n; ++j)
                    acc += std::sqrt(p.u1(i, j) * p.u1(i, j) + p.v1(i, j) * p.v1(i, j) +
                                     p.u2(i, j) * p.u2(i, j) + p.v2(i, j) * p.v2(i, j));
            for (std::size_t i = 0; i + 1 < m; ++i) acc += std::hypot(p.u1(i, n - 1), p.v1(i, n - 1));
            for (std::size_t j = 0; j + 1 < n; ++j) acc += std::hypot(p.u2(m - 1, j), p.v2(m - 1, j));
            return acc;
        case TvKind::TypeIAnisotropic:
            // Interior and boundary terms together cover every difference once.
            for (std::size_t k = 0; k < p.u1.size(); ++k)
                acc += std::hypot(p.u1.data()[k], p.v1.data()[k]);
            for (std::size_t k = 0; k < p.u2.size(); ++k)
                acc += std::hypot(p.u2.data()[k], p.v2.data()[k]);
            return acc;
        case TvKind::TypeIIIsotropic:
            return variant.alpha * detail::real_tv_iso(p.u1, p.u2) +
                   (1.0 - variant.alpha) * detail::real_tv_iso(p.v1, p.v2);
        case TvKind::TypeIIAnisotropic:
            return variant.alpha * detail::real_tv_aniso(p.u1, p.u2) +
                   (1.0 - variant.alpha) * detail::real_tv_aniso(p.v1, p.v2);
    }
    return acc;
}

inline double tv_seminorm(const ComplexField& x, const TvVariant& variant) {
    return tv_seminorm(forward_diff(x), variant);
}

// ---------------------------------------------------------------------------
// Constraint projection

inline void project_constraint_in_place(ComplexField& x, ConstraintSet set) {
    if (set == ConstraintSet::FullSpace) return;
    double* pu = x.u.data();
    double* pv = x.v.data();
    for (std::size_t k = 0; k < x.u.size(); ++k) {
        const double r = std::sqrt(pu[k] * pu[k] + pv[k] * pv[k]);
        if (r > 1.0) {
            pu[k] /= r;
            pv[k] /= r;
        }
    }
}

inline ComplexField project_constraint(const ComplexField& x, ConstraintSet set) {
    ComplexField out = x;
    project_constraint_in_place(out, set);
    return out;
}

// ---------------------------------------------------------------------------
// Inner products and norms over fields and matrix groups

inline double inner(const ComplexField& a, const ComplexField& b) {
    return dot(a.u, b.u) + dot(a.v, b.v);
}

inline double inner(const DiffField& p, const DualField& q) {
    return dot(p.u1, q.r1) + dot(p.u2, q.r2) + dot(p.v1, q.s1) + dot(p.v2, q.s2);
}

inline double inner(const DualField& a, const DualField& b) {
    return dot(a.r1, b.r1) + dot(a.r2, b.r2) + dot(a.s1, b.s1) + dot(a.s2, b.s2);
}

inline double norm_f(const ComplexField& a) { return std::sqrt(inner(a, a)); }
inline double norm_f(const DualField& a) { return std::sqrt(inner(a, a)); }

inline double sum_squares(const ComplexField& a) {
    return sum_squares(a.u) + sum_squares(a.v);
}

// ---------------------------------------------------------------------------
// Field arithmetic (value semantics; hot loops use the in-place kernels)

inline ComplexField& operator+=(ComplexField& a, const ComplexField& b) {
    for (std::size_t k = 0; k < a.u.size(); ++k) {
        a.u.data()[k] += b.u.data()[k];
        a.v.data()[k] += b.v.data()[k];
    }
    return a;
}

inline ComplexField& operator-=(ComplexField& a, const ComplexField& b) {
    for (std::size_t k = 0; k < a.u.size(); ++k) {
        a.u.data()[k] -= b.u.data()[k];
        a.v.data()[k] -= b.v.data()[k];
    }
    return a;
}

inline ComplexField& operator*=(ComplexField& a, double c) {
    for (double& x : a.u) x *= c;
    for (double& x : a.v) x *= c;
    return a;
}

inline ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
inline ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
inline ComplexField operator*(double c, ComplexField a) { return a *= c; }

/// out = a + c * b
inline void add_scaled(const ComplexField& a, double c, const ComplexField& b, ComplexField& out) {
    for (std::size_t k = 0; k < a.u.size(); ++k) {
        out.u.data()[k] = a.u.data()[k] + c * b.u.data()[k];
        out.v.data()[k] = a.v.data()[k] + c * b.v.data()[k];
    }
}

}  // namespace ctv
