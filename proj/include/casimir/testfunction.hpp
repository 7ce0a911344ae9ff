#pragma once

/**
 * @brief Product bump test functions with Fourier access, plus the cached 1D
 *        reductions (cross-correlations, convolutions, transverse polar
 *        average) that collapse smeared 4D integrals to low dimension.
 */

#include <casimir/geometry.hpp>
#include <casimir/quadrature.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace casimir {

/// One-axis bump b(u) = amplitude * exp(1 - 1/(1-s^2)), s = (u-center)/radius.
struct Bump1D {
    double center = 0.0;
    double radius = 1.0;

    double value(double u) const {
        const double s = (u - center) / radius;
        if (std::abs(s) >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - s * s));
    }
    /// d/du of the (peak-1) profile.
    double derivative(double u) const {
        const double s = (u - center) / radius;
        if (std::abs(s) >= 1.0) return 0.0;
        const double g = 1.0 - s * s;
        return value(u) * (-2.0 * s / (g * g)) / radius;
    }
    double lo() const { return center - radius; }
    double hi() const { return center + radius; }
};

namespace detail {

/// Cached table of G(q) = int_{-1}^1 exp(1 - 1/(1-s^2)) cos(q s) ds.
/// G is even, smooth, and decays faster than any power; beyond the table the
/// value is below 1e-13 and is taken as 0.
inline double bump_profile_ft(double q) {
    static const double step = 0.02;
    static const int count = 12001;  // covers q in [0, 240]; |G| < 1e-17 beyond
    static const std::vector<double> table = [] {
        std::vector<double> t(count);
        for (int i = 0; i < count; ++i) {
            const double q_i = i * step;
            AdaptiveOptions opt;
            opt.abs_tol = 1e-14;
            opt.rel_tol = 1e-13;
            t[i] = adaptive_integrate(
                       [q_i](double s) {
                           double g = 1.0 - s * s;
                           return std::exp(1.0 - 1.0 / g) * std::cos(q_i * s);
                       },
                       -1.0, 1.0, opt)
                       .value;
        }
        return t;
    }();
    const double aq = std::abs(q);
    if (aq >= (count - 6) * step) return 0.0;
    // 6-point Lagrange interpolation on the uniform grid
    int i0 = static_cast<int>(aq / step) - 2;
    i0 = std::max(0, std::min(i0, count - 6));
    double r = 0.0;
    for (int j = 0; j < 6; ++j) {
        double lj = 1.0;
        const double qj = (i0 + j) * step;
        for (int k = 0; k < 6; ++k) {
            if (k == j) continue;
            lj *= (aq - (i0 + k) * step) / (qj - (i0 + k) * step);
        }
        r += lj * table[i0 + j];
    }
    return r;
}

}  // namespace detail

/// Fourier transform of the bump, convention b^(k) = int b(u) e^{-iku} du.
inline std::complex<double> bump_ft(const Bump1D& b, double k) {
    const double g = detail::bump_profile_ft(k * b.radius);
    return std::exp(std::complex<double>(0.0, -k * b.center)) * (b.radius * g);
}

/**
 * @brief Factorized test function f = amplitude * b_t b_x b_y b_z.
 *
 * Peak value at the center is `amplitude`; support is the product of the
 * per-axis intervals and evaluation outside it is exactly zero.
 */
struct TestFunction {
    Bump1D bt, bx, by, bz;
    double amplitude = 1.0;

    double value(const Point4& p) const {
        return amplitude * bt.value(p.t) * bx.value(p.x) * by.value(p.y) * bz.value(p.z);
    }
    double operator()(const Point4& p) const { return value(p); }

    /// Partial derivative along one axis (0..3).
    double partial(int axis, const Point4& p) const {
        const Bump1D* bs[4] = {&bt, &bx, &by, &bz};
        const double us[4] = {p.t, p.x, p.y, p.z};
        double r = amplitude;
        for (int a = 0; a < 4; ++a)
            r *= (a == axis) ? bs[a]->derivative(us[a]) : bs[a]->value(us[a]);
        return r;
    }

    Box4 support() const {
        return {{bt.lo(), bx.lo(), by.lo(), bz.lo()}, {bt.hi(), bx.hi(), by.hi(), bz.hi()}};
    }

    const Bump1D& axis(int a) const {
        const Bump1D* bs[4] = {&bt, &bx, &by, &bz};
        return *bs[a];
    }

    /// One-axis Fourier factor (without the overall amplitude).
    std::complex<double> ft_axis(int a, double k) const { return bump_ft(axis(a), k); }
};

inline TestFunction make_bump(const Point4& center, const std::array<double, 4>& radii,
                              double amplitude = 1.0) {
    for (double r : radii)
        if (!(r > 0.0)) throw std::invalid_argument("make_bump: radii must be positive");
    return TestFunction{{center.t, radii[0]},
                        {center.x, radii[1]},
                        {center.y, radii[2]},
                        {center.z, radii[3]},
                        amplitude};
}

enum class IsometryKind { ReflectZ, TranslateZ };

/// f -> f∘iota_z (new value at (xbar,z) is f(xbar,-z)) or f∘iota_{-s}.
inline TestFunction isometry_apply(IsometryKind kind, const TestFunction& f, double s = 0.0) {
    TestFunction g = f;
    if (kind == IsometryKind::ReflectZ)
        g.bz.center = -f.bz.center;
    else
        g.bz.center = f.bz.center + s;
    return g;
}

/// Finite linear combination of factorized bumps; evaluation is linear.
struct SumFunction {
    std::vector<std::pair<double, TestFunction>> terms;

    double value(const Point4& p) const {
        double r = 0.0;
        for (const auto& [c, f] : terms) r += c * f.value(p);
        return r;
    }
    double operator()(const Point4& p) const { return value(p); }

    Box4 support() const {
        if (terms.empty()) return {};
        Box4 h = terms.front().second.support();
        for (const auto& [c, f] : terms) {
            Box4 s = f.support();
            for (int a = 0; a < 4; ++a) {
                h.lo[a] = std::min(h.lo[a], s.lo[a]);
                h.hi[a] = std::max(h.hi[a], s.hi[a]);
            }
        }
        return h;
    }
};

/**
 * @brief Uniform-grid sample table with 6-point Lagrange interpolation.
 *        Exact zero outside [a, b]; interpolation error ~ (span/n)^6.
 */
class CachedFunction1D {
  public:
    CachedFunction1D() = default;

    template <class F>
    static CachedFunction1D build(F&& f, double a, double b, int n = 1025) {
        CachedFunction1D c;
        c.a_ = a;
        c.b_ = b;
        c.vals_.resize(n);
        const double h = (b - a) / (n - 1);
        for (int i = 0; i < n; ++i) c.vals_[i] = f(a + i * h);
        return c;
    }

    double operator()(double u) const {
        if (vals_.empty() || u < a_ || u > b_) return 0.0;
        const int n = static_cast<int>(vals_.size());
        const double h = (b_ - a_) / (n - 1);
        int i0 = static_cast<int>((u - a_) / h) - 2;
        i0 = std::max(0, std::min(i0, n - 6));
        double r = 0.0;
        for (int j = 0; j < 6; ++j) {
            double lj = 1.0;
            const double uj = a_ + (i0 + j) * h;
            for (int k = 0; k < 6; ++k) {
                if (k == j) continue;
                lj *= (u - (a_ + (i0 + k) * h)) / (uj - (a_ + (i0 + k) * h));
            }
            r += lj * vals_[i0 + j];
        }
        return r;
    }

    double lo() const { return a_; }
    double hi() const { return b_; }
    bool empty() const { return vals_.empty(); }

    /// Tight band [support_lo, support_hi] outside which the table is zero;
    /// collapses to [lo, lo] for an all-zero table.
    double support_lo() const {
        const int n = static_cast<int>(vals_.size());
        const double h = (b_ - a_) / (n - 1);
        for (int i = 0; i < n; ++i)
            if (vals_[i] != 0.0) return a_ + std::max(0, i - 1) * h;
        return a_;
    }
    double support_hi() const {
        const int n = static_cast<int>(vals_.size());
        const double h = (b_ - a_) / (n - 1);
        for (int i = n - 1; i >= 0; --i)
            if (vals_[i] != 0.0) return a_ + std::min(n - 1, i + 1) * h;
        return a_;
    }

  private:
    double a_ = 0.0, b_ = 0.0;
    std::vector<double> vals_;
};

/// Cross-correlation X(u) = int f(v) g(v-u) dv of two bumps.
inline CachedFunction1D correlate(const Bump1D& f, const Bump1D& g, int n = 1025) {
    const double lo = (f.center - g.center) - (f.radius + g.radius);
    const double hi = (f.center - g.center) + (f.radius + g.radius);
    return CachedFunction1D::build(
        [&](double u) {
            const double a = std::max(f.lo(), g.lo() + u);
            const double b = std::min(f.hi(), g.hi() + u);
            if (a >= b) return 0.0;
            AdaptiveOptions opt;
            opt.abs_tol = 1e-14;
            opt.rel_tol = 1e-13;
            return adaptive_integrate([&](double v) { return f.value(v) * g.value(v - u); },
                                      a, b, opt)
                .value;
        },
        lo, hi, n);
}

/// Convolution C(w) = int f(v) g(w-v) dv of two bumps.
inline CachedFunction1D convolve(const Bump1D& f, const Bump1D& g, int n = 1025) {
    const double lo = (f.center + g.center) - (f.radius + g.radius);
    const double hi = (f.center + g.center) + (f.radius + g.radius);
    return CachedFunction1D::build(
        [&](double w) {
            const double a = std::max(f.lo(), w - g.hi());
            const double b = std::min(f.hi(), w - g.lo());
            if (a >= b) return 0.0;
            AdaptiveOptions opt;
            opt.abs_tol = 1e-14;
            opt.rel_tol = 1e-13;
            return adaptive_integrate([&](double v) { return f.value(v) * g.value(w - v); },
                                      a, b, opt)
                .value;
        },
        lo, hi, n);
}

/**
 * @brief Transverse polar average Psi(rho) = int_0^{2pi} Xx(rho cos) Xy(rho sin) dphi
 *        for the two transverse correlation tables.
 */
inline CachedFunction1D polar_average(const CachedFunction1D& Xx, const CachedFunction1D& Xy,
                                      int n = 1025) {
    const double mx = std::max(std::abs(Xx.lo()), std::abs(Xx.hi()));
    const double my = std::max(std::abs(Xy.lo()), std::abs(Xy.hi()));
    const double rho_max = std::hypot(mx, my);
    return CachedFunction1D::build(
        [&](double rho) {
            AdaptiveOptions opt;
            opt.abs_tol = 1e-13;
            opt.rel_tol = 1e-11;
            return adaptive_integrate(
                       [&](double phi) {
                           return Xx(rho * std::cos(phi)) * Xy(rho * std::sin(phi));
                       },
                       0.0, 2.0 * M_PI, opt)
                .value;
        },
        0.0, rho_max, n);
}

}  // namespace casimir
