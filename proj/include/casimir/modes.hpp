#pragma once

/**
 * @brief Mode-space representation of the slab two-point function: transverse
 *        mode weights, the positive quadratic form of the vacuum state, and
 *        the thermal hypothesis checks on the mode weight of the remainder.
 *
 * The image sum over 2nd shifts Poisson-resums to a Dirac comb on k_z with
 * spacing pi/d.  For factorized f, g the smeared two-point function becomes
 *   omega2(f, g) = sum_{n>=1} w(n pi/d) (f_n - f_{-n}) conj(g_n - g_{-n}),
 * where f_n are Fourier coefficients of the z profile on [-d, d] and
 *   w(xi) = ampl_f ampl_g (d/(2pi)^2) int_0^inf k dk P(k) Theta(kappa)/kappa,
 * kappa = sqrt(k^2 + xi^2), P the angular transverse product and Theta the
 * time-profile product carrying the state's thermal weight.
 */

#include <casimir/kernels.hpp>
#include <casimir/quadrature.hpp>
#include <casimir/testfunction.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace casimir {

/// Transverse mode weights w(n pi / d) for n = 1..N.
struct ModeCoefficients {
    double d = 1.0;
    std::vector<complexd> w;
};

namespace detail {

/// In-place radix-2 Cooley-Tukey transform, sign convention e^{-2 pi i jk/M}.
inline void fft_pow2(std::vector<complexd>& a) {
    const std::size_t M = a.size();
    if (M == 0 || (M & (M - 1)) != 0)
        throw std::invalid_argument("fft_pow2: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < M; ++i) {
        std::size_t bit = M >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= M; len <<= 1) {
        const double ang = -2.0 * M_PI / static_cast<double>(len);
        const complexd wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < M; i += len) {
            complexd w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const complexd u = a[i + j];
                const complexd v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

/// Angular transverse product P_fg(k) = int_0^{2pi} x- and y-profile Fourier
/// products at (k cos, k sin); real and nonnegative when f = g.
inline complexd transverse_angular(const TestFunction& f, const TestFunction& g, double k) {
    auto integrand = [&](double phi) {
        const double u = k * std::cos(phi);
        const double v = k * std::sin(phi);
        return bump_ft(f.bx, u) * std::conj(bump_ft(g.bx, u)) * bump_ft(f.by, v) *
               std::conj(bump_ft(g.by, v));
    };
    AdaptiveOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-16;
    const double re =
        adaptive_integrate([&](double p) { return integrand(p).real(); }, 0.0, 2.0 * M_PI,
                           opt)
            .value;
    const double im =
        adaptive_integrate([&](double p) { return integrand(p).imag(); }, 0.0, 2.0 * M_PI,
                           opt)
            .value;
    return {re, im};
}

/// Tabulated P_fg(k) on [0, k_cut]; the angular integral is xi independent,
/// so one table serves every mode weight of the pair.  P is real for every
/// pair: the half turn phi -> phi + pi conjugates the integrand.
struct TransverseCache {
    CachedFunction1D tab;
    double k_cut = 0.0;
    double t_cut = 0.0;  ///< frequency beyond which the time product vanishes

    double operator()(double k) const { return tab(k); }
};

inline TransverseCache build_transverse_cache(const TestFunction& f, const TestFunction& g) {
    TransverseCache c;
    // the bump transform table vanishes beyond q = 240, per factor
    const double tu = 240.0 / std::max(f.bx.radius, g.bx.radius);
    const double tv = 240.0 / std::max(f.by.radius, g.by.radius);
    c.k_cut = std::hypot(tu, tv);
    c.t_cut = 240.0 / std::max(f.bt.radius, g.bt.radius);
    // per-axis profile products U(u) = x_f^(u) conj(x_g^(u)) tabulated on
    // u >= 0, extended by U(-u) = conj(U(u))
    auto axis_tab = [](const Bump1D& a, const Bump1D& b, bool imag_part) {
        return CachedFunction1D::build(
            [&](double u) {
                const complexd p = bump_ft(a, u) * std::conj(bump_ft(b, u));
                return imag_part ? p.imag() : p.real();
            },
            0.0, 240.0 / std::max(a.radius, b.radius), 4097);
    };
    const auto Ure = axis_tab(f.bx, g.bx, false);
    const auto Vre = axis_tab(f.by, g.by, false);
    AdaptiveOptions opt;
    opt.rel_tol = 1e-9;
    opt.abs_tol = 1e-16;
    const bool diag = f.bx.center == g.bx.center && f.bx.radius == g.bx.radius &&
                      f.by.center == g.by.center && f.by.radius == g.by.radius;
    if (diag) {
        // U, V real, even, and nonnegative: a quarter turn carries the circle
        c.tab = CachedFunction1D::build(
            [&](double k) {
                if (k >= c.k_cut) return 0.0;
                return 4.0 *
                       adaptive_integrate(
                           [&](double phi) {
                               return Ure(k * std::cos(phi)) * Vre(k * std::sin(phi));
                           },
                           0.0, M_PI / 2.0, opt)
                           .value;
            },
            0.0, c.k_cut, 4097);
        return c;
    }
    const auto Uim = axis_tab(f.bx, g.bx, true);
    const auto Vim = axis_tab(f.by, g.by, true);
    c.tab = CachedFunction1D::build(
        [&](double k) {
            if (k >= c.k_cut) return 0.0;
            // upper half turn doubled; the lower half conjugates
            return 2.0 *
                   adaptive_integrate(
                       [&](double phi) {
                           const double u = k * std::cos(phi);
                           const double su = u < 0.0 ? -1.0 : 1.0;
                           const double au = su * u;
                           const double v = k * std::sin(phi);
                           return Ure(au) * Vre(v) - su * Uim(au) * Vim(v);
                       },
                       0.0, M_PI, opt)
                       .value;
        },
        0.0, c.k_cut, 4097);
    return c;
}

/// Time-profile product with the state's thermal weight at frequency kappa.
inline complexd time_weight(StateSpec state, const TestFunction& f, const TestFunction& g,
                            double kappa) {
    const complexd T = bump_ft(f.bt, kappa) * std::conj(bump_ft(g.bt, kappa));
    if (state.kind == StateKind::Vacuum) return T;
    const double x = state.beta * kappa;
    const double n = x > 700.0 ? 0.0 : 1.0 / std::expm1(x);
    return T + 2.0 * n * T.real();
}

/// One transverse weight w(xi) from a prebuilt angular table; `thermal_only`
/// keeps just the remainder part (the KMS weight minus the vacuum one).
inline complexd mode_weight_cached(StateSpec state, const TestFunction& f,
                                   const TestFunction& g, double xi, double d,
                                   const TransverseCache& cache,
                                   bool thermal_only = false) {
    if (std::abs(xi) >= cache.t_cut) return {};  // time product dead at kappa >= |xi|
    auto integrand = [&](double k) -> complexd {
        const double kappa = std::hypot(k, xi);
        complexd theta = time_weight(state, f, g, kappa);
        if (thermal_only) theta -= bump_ft(f.bt, kappa) * std::conj(bump_ft(g.bt, kappa));
        if (theta == complexd(0.0, 0.0)) return {};
        return k / kappa * theta * cache(k);
    };
    AdaptiveOptions opt;
    opt.rel_tol = 1e-9;
    opt.abs_tol = 1e-18;
    auto part = [&](double a, double b, bool real_part) {
        return adaptive_integrate(
                   [&](double k) {
                       const complexd v = integrand(k);
                       return real_part ? v.real() : v.imag();
                   },
                   a, b, opt)
            .value;
    };
    const bool complex_path = f.bt.center != g.bt.center || f.bt.radius != g.bt.radius;
    // the thermal remainder peaks on the scale k ~ |xi|; resolve it explicitly
    const double split = (thermal_only || state.kind == StateKind::KMS)
                             ? std::min(20.0 * std::abs(xi), cache.k_cut)
                             : cache.k_cut;
    complexd sum{part(0.0, split, true), complex_path ? part(0.0, split, false) : 0.0};
    if (split < cache.k_cut)
        sum += complexd{part(split, cache.k_cut, true),
                        complex_path ? part(split, cache.k_cut, false) : 0.0};
    return f.amplitude * g.amplitude * d / (4.0 * M_PI * M_PI) * sum;
}

/// Convenience wrapper building a fresh angular table per call.
inline complexd mode_weight(StateSpec state, const TestFunction& f, const TestFunction& g,
                            double xi, double d, bool thermal_only = false) {
    return mode_weight_cached(state, f, g, xi, d, build_transverse_cache(f, g),
                              thermal_only);
}

}  // namespace detail

/// Mode weights of the slab two-point function for n = 1..N.
inline ModeCoefficients mode_coefficients(StateSpec base, const TestFunction& f,
                                          const TestFunction& g, int N, double d) {
    if (!(d > 0)) throw std::invalid_argument("mode_coefficients: d must be positive");
    if (N < 1) throw std::invalid_argument("mode_coefficients: N must be >= 1");
    ModeCoefficients mc;
    mc.d = d;
    mc.w.reserve(N);
    const auto cache = detail::build_transverse_cache(f, g);
    for (int n = 1; n <= N; ++n)
        mc.w.push_back(detail::mode_weight_cached(base, f, g, n * M_PI / d, d, cache));
    return mc;
}

/// Fourier coefficients of the z profile on [-d, d]: c[k] holds f_{k} for
/// k = 0..N and c[k] with negative index accessed via the companion vector.
struct FourierZ {
    std::vector<complexd> pos;  ///< f_n, n = 0..N
    std::vector<complexd> neg;  ///< f_{-n}, n = 0..N
};

/// f_n = (1/2d) int f_z(z) e^{-i n pi z / d} dz by FFT on a 2^k grid; the
/// profile is smooth and interior to [-d, d], so aliasing dies with the table
/// cutoff of the bump transform.
inline FourierZ fourier_z_coefficients(const Bump1D& bz, double d, int N,
                                       std::size_t grid = 4096) {
    if (!(d > 0)) throw std::invalid_argument("fourier_z_coefficients: d must be positive");
    std::vector<complexd> a(grid);
    const double h = 2.0 * d / static_cast<double>(grid);
    for (std::size_t j = 0; j < grid; ++j) a[j] = bz.value(-d + h * static_cast<double>(j));
    detail::fft_pow2(a);
    FourierZ out;
    out.pos.resize(N + 1);
    out.neg.resize(N + 1);
    const double inv = 1.0 / static_cast<double>(grid);
    for (int n = 0; n <= N; ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;  // e^{+i n pi} grid offset
        out.pos[n] = sign * inv * a[static_cast<std::size_t>(n) % grid];
        out.neg[n] = sign * inv * a[(grid - static_cast<std::size_t>(n) % grid) % grid];
    }
    return out;
}

/// Positive quadratic form of the slab state with its natural scale.
struct PositivityForm {
    double value = 0.0;
    double scale = 0.0;  ///< envelope sum w_n (|f_n|^2 + |f_{-n}|^2)
    int n_used = 0;
};

/**
 * @brief Mode-space evaluation of omega2(f, f) for factorized f supported in
 *        the open slab: sum_{n>=1} w(n pi/d) |f_n - f_{-n}|^2, manifestly
 *        nonnegative for the vacuum and KMS weights.
 */
inline PositivityForm positivity_form(StateSpec base, double d, const TestFunction& f,
                                      int n_cap = 512) {
    // the form lives on the periodization cell; physical slab profiles sit in
    // (0, d), and cell-even profiles realize the vanishing example
    if (!(f.bz.lo() > -d && f.bz.hi() < d))
        throw std::invalid_argument("positivity_form: z support must lie in (-d, d)");
    const auto fz = fourier_z_coefficients(f.bz, d, n_cap);
    const auto cache = detail::build_transverse_cache(f, f);
    PositivityForm out;
    int quiet = 0;
    for (int n = 1; n <= n_cap; ++n) {
        const double w =
            detail::mode_weight_cached(base, f, f, n * M_PI / d, d, cache).real();
        const complexd diff = fz.pos[n] - fz.neg[n];
        const double term = w * std::norm(diff);
        out.value += term;
        out.scale += std::abs(w) * (std::norm(fz.pos[n]) + std::norm(fz.neg[n]));
        out.n_used = n;
        quiet = (std::abs(term) <= 1e-15 * (out.scale + 1e-300)) ? quiet + 1 : 0;
        if (quiet >= 8) break;
    }
    return out;
}

/// Grid sample (xi, w) of the thermal-remainder mode weight.
struct WeightSample {
    double xi = 0.0;
    double w = 0.0;
};

/// Report of the thermal-hypothesis checks on the remainder weight.
struct HypothesisReport {
    std::vector<WeightSample> large_xi;   ///< xi >= pi/d, remainder weight
    std::vector<WeightSample> small_xi;   ///< xi << pi/d, values of xi*w(xi)
    double fit_a = 0.0;                   ///< coefficient of xi log xi
    double fit_b = 0.0;                   ///< coefficient of xi
    double fit_a_refined = 0.0;           ///< same fit on a doubled grid
    bool bounded_large = false;           ///< finite, bounded on xi >= pi/d
    bool decreasing_small = false;        ///< xi*w(xi) -> 0 monotonically
    bool vacuum_trivial = false;          ///< base was vacuum: remainder == 0
};

namespace detail {

/// Least-squares fit y = a xi log xi + b xi over the samples.
inline std::pair<double, double> fit_xi_log(const std::vector<WeightSample>& s) {
    double m11 = 0, m12 = 0, m22 = 0, r1 = 0, r2 = 0;
    for (const auto& p : s) {
        const double u = p.xi * std::log(p.xi);
        const double v = p.xi;
        m11 += u * u;
        m12 += u * v;
        m22 += v * v;
        r1 += u * p.w;
        r2 += v * p.w;
    }
    const double det = m11 * m22 - m12 * m12;
    return {(r1 * m22 - r2 * m12) / det, (m11 * r2 - m12 * r1) / det};
}

}  // namespace detail

/**
 * @brief Checks the thermal hypotheses on the mode weight of the remainder
 *        W^T = omega2^T - omega2^0: boundedness above the gap pi/d and the
 *        logarithmic law xi w^T(xi) ~ a xi log xi + b xi below it.
 */
inline HypothesisReport hypothesis_check(StateSpec base, const TestFunction& f, double d) {
    HypothesisReport rep;
    const double gap = M_PI / d;
    if (base.kind == StateKind::Vacuum) {
        rep.vacuum_trivial = true;
        rep.bounded_large = true;
        rep.decreasing_small = true;
        for (double m : {1.0, 2.0, 4.0, 8.0}) rep.large_xi.push_back({m * gap, 0.0});
        return rep;
    }
    const auto cache = detail::build_transverse_cache(f, f);
    auto wT = [&](double xi) {
        return detail::mode_weight_cached(base, f, f, xi, d, cache, /*thermal_only=*/true)
            .real();
    };
    rep.bounded_large = true;
    double prev = 0.0;
    bool have_prev = false;
    for (double m : {1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0}) {
        const double w = wT(m * gap);
        rep.large_xi.push_back({m * gap, w});
        if (!std::isfinite(w)) rep.bounded_large = false;
        if (have_prev && std::abs(w) > std::abs(prev) * 1.5 + 1e-300)
            rep.bounded_large = false;  // decay above the gap, no blow-up
        prev = w;
        have_prev = true;
    }
    auto sample_small = [&](int count) {
        std::vector<WeightSample> s;
        for (int i = 0; i < count; ++i) {
            const double t = static_cast<double>(i) / (count - 1);
            const double xi = gap * 1e-3 * std::pow(100.0, t);
            s.push_back({xi, xi * wT(xi)});
        }
        return s;
    };
    rep.small_xi = sample_small(12);
    rep.decreasing_small = true;
    for (std::size_t i = 1; i < rep.small_xi.size(); ++i)
        if (std::abs(rep.small_xi[i].w) < std::abs(rep.small_xi[i - 1].w))
            rep.decreasing_small = false;  // |xi w| must grow with xi
    auto fit = detail::fit_xi_log(rep.small_xi);
    rep.fit_a = fit.first;
    rep.fit_b = fit.second;
    rep.fit_a_refined = detail::fit_xi_log(sample_small(24)).first;
    return rep;
}

}  // namespace casimir
