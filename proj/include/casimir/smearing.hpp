#pragma once

/**
 * @brief Smeared kernel evaluation  int f(x) K(x,x',eps) g(x') dx dx'  on an
 *        epsilon ladder with Richardson extrapolation to eps = 0.
 *
 * The 8D product integral is reduced exactly before any quadrature runs.
 * Writing x' = x - D and correlating the factorized bumps axis by axis,
 *
 *   value(eps) = ampl * Sum_terms w_T *
 *       int dtau Xt(tau) int rho drho Psi(rho) int dw Y_T(w)
 *           core(tau - i eps, rho^2 + (w - shift_T)^2),
 *
 * where Xt is the time cross-correlation, Psi the polar average of the two
 * transverse cross-correlations, and Y_T is the z cross-correlation for
 * difference-family image terms or the z convolution for reflection-family
 * terms.  Image terms whose light cone cannot intersect the time window are
 * integrated with fixed Gauss rules; near terms use an adaptive innermost
 * tau integral with split hints at the pole projections +-sqrt(rho^2+dz^2).
 */

#include <casimir/kernels.hpp>
#include <casimir/quadrature.hpp>
#include <casimir/testfunction.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

namespace casimir {

/// Cached 1D reductions for an ordered test-function pair (f, g).
struct SmearContext {
    CachedFunction1D Xt, Xz, Cz, Psi;
    double ampl = 1.0;
    double tau_abs = 0.0;  ///< max |tau| over the support of Xt

    SmearContext(const TestFunction& f, const TestFunction& g) {
        Xt = correlate(f.bt, g.bt);
        Xz = correlate(f.bz, g.bz);
        Cz = convolve(f.bz, g.bz);
        Psi = polar_average(correlate(f.bx, g.bx), correlate(f.by, g.by));
        ampl = f.amplitude * g.amplitude;
        tau_abs = std::max(std::abs(Xt.lo()), std::abs(Xt.hi()));
    }
};

struct SmearOptions {
    double eps0 = 0.0;        ///< ladder top; 0 selects 0.1 * smallest bump pair width
    double rel_tol = 1e-8;    ///< per-epsilon quadrature request
    double require_tol = 0.0; ///< if > 0: throw AccuracyError when err exceeds this (relative)
};

namespace detail {

/// Polynomial extrapolation of (x_k, y_k) to x = 0; returns value and the
/// difference between the last two Neville diagonal entries.
template <class T>
std::pair<T, double> neville_zero(const std::vector<double>& xs, std::vector<T> ys) {
    T prev = ys[0];
    for (std::size_t m = 1; m < xs.size(); ++m) {
        for (std::size_t i = 0; i + m < xs.size(); ++i)
            ys[i] = (xs[i + m] * ys[i] - xs[i] * ys[i + 1]) / (xs[i + m] - xs[i]);
        prev = (m + 1 == xs.size()) ? prev : ys[0];
    }
    return {ys[0], quad_norm(ys[0] - prev)};
}

struct TermEval {
    complexd value{};
    double err = 0.0;
};

/// One image term at fixed epsilon.
template <class TauHat>
TermEval smear_term(const EpsilonKernel& K, const SmearContext& ctx, const ImageTerm& term,
                    double eps, double rel_tol, const TauHat& tau_hat) {
    const CachedFunction1D& Y =
        term.family == ImageTerm::Family::Diff ? ctx.Xz : ctx.Cz;
    if (Y.empty() || ctx.Xt.empty()) return {};
    const double a = term.shift;
    const double dmin = std::max({0.0, Y.lo() - a, a - Y.hi()});

    auto inner = [&](double rho, double w, const AdaptiveOptions& topt) {
        const double dz = w - a;
        const double s = rho * rho + dz * dz;
        auto f = [&](double tau) {
            return ctx.Xt(tau) * K.term_core(tau_hat(tau, eps), s);
        };
        AdaptiveOptions o = topt;
        const double p = std::sqrt(s);
        for (double h : {-p - 4 * eps, -p, -p + 4 * eps, p - 4 * eps, p, p + 4 * eps})
            o.hints.push_back(h);
        return adaptive_integrate(f, ctx.Xt.lo(), ctx.Xt.hi(), o);
    };

    const bool near = dmin < ctx.tau_abs + std::max(0.3, 8.0 * eps);
    const double rho_lo = ctx.Psi.support_lo(), rho_hi = ctx.Psi.hi();
    TermEval out;
    if (!near) {
        // pole-free: fixed tensor Gauss, error from an order drop
        auto tensor = [&](int nw, int nr, int nt) {
            return gl_integrate(
                [&](double w) {
                    return Y(w) * gl_integrate(
                                      [&](double rho) {
                                          return rho * ctx.Psi(rho) *
                                                 gl_integrate(
                                                     [&](double tau) {
                                                         const double dz = w - a;
                                                         return ctx.Xt(tau) *
                                                                K.term_core(
                                                                    tau_hat(tau, eps),
                                                                    rho * rho + dz * dz);
                                                     },
                                                     ctx.Xt.lo(), ctx.Xt.hi(), nt);
                                      },
                                      rho_lo, rho_hi, nr);
                },
                Y.lo(), Y.hi(), nw);
        };
        complexd hi = tensor(20, 24, 20);
        complexd lo = tensor(16, 18, 16);
        out.value = term.weight * hi;
        out.err = std::abs(term.weight) * quad_norm(hi - lo);
        return out;
    }

    // near term: Gauss in (w, rho), adaptive pole-aware tau innermost
    auto outer = [&](int nw, int nr, double itol) {
        AdaptiveOptions topt;
        topt.rel_tol = rel_tol * 0.1;
        topt.abs_tol = itol;
        complexd acc{};
        double qerr = 0.0;
        const auto& rw = GaussLegendre::rule(nw);
        const auto& rr = GaussLegendre::rule(nr);
        const double wm = 0.5 * (Y.lo() + Y.hi()), wh = 0.5 * (Y.hi() - Y.lo());
        const double rm = 0.5 * (rho_lo + rho_hi), rh = 0.5 * (rho_hi - rho_lo);
        for (int i = 0; i < nw; ++i) {
            const double w = wm + wh * rw.x[i];
            const double yw = Y(w);
            if (yw == 0.0) continue;
            for (int j = 0; j < nr; ++j) {
                const double rho = rm + rh * rr.x[j];
                auto q = inner(rho, w, topt);
                const double wgt = rw.w[i] * wh * rr.w[j] * rh * rho;
                acc += wgt * yw * q.value * ctx.Psi(rho);
                qerr += std::abs(wgt * yw * ctx.Psi(rho)) * q.err;
            }
        }
        return std::pair<complexd, double>(acc, qerr);
    };
    // probe for an absolute-tolerance floor
    auto [probe, perr0] = outer(8, 8, 1e-15);
    const double floor =
        std::max(1e-18, 1e-3 * rel_tol * quad_norm(probe));
    auto [hi, qerr_hi] = outer(24, 24, floor);
    auto [lo, qerr_lo] = outer(18, 18, floor);
    out.value = term.weight * hi;
    out.err = std::abs(term.weight) * (quad_norm(hi - lo) + qerr_hi);
    (void)perr0;
    (void)qerr_lo;
    return out;
}

template <class TauHat>
std::pair<complexd, double> smear_at_eps(const EpsilonKernel& K, const SmearContext& ctx,
                                         double eps, double rel_tol, const TauHat& tau_hat) {
    complexd total{};
    double err = 0.0;
    for (const auto& t : K.terms) {
        auto te = smear_term(K, ctx, t, eps, rel_tol, tau_hat);
        total += te.value;
        err += te.err;
    }
    return {ctx.ampl * total, ctx.ampl * err};
}

inline double default_eps0(const TestFunction& f, const TestFunction& g) {
    double L = 1e300;
    for (int a = 0; a < 4; ++a)
        L = std::min(L, f.axis(a).radius + g.axis(a).radius);
    return 0.1 * L;
}

}  // namespace detail

/**
 * @brief Smeared two-point value with the epsilon ladder eps_k = eps0 2^{-k},
 *        k = 0..4, Richardson-extrapolated to eps = 0.  The err field bounds
 *        quadrature and extrapolation together.
 */
inline SmearedValue smear2(const EpsilonKernel& K, const TestFunction& f,
                           const TestFunction& g, const SmearOptions& opt = {}) {
    SmearContext ctx(f, g);
    const double eps0 = opt.eps0 > 0 ? opt.eps0 : detail::default_eps0(f, g);
    std::vector<double> xs;
    std::vector<complexd> ys;
    double qerr = 0.0;
    auto tau_std = [](double tau, double eps) { return complexd(tau, -eps); };
    for (int k = 0; k < 5; ++k) {
        const double eps = eps0 * std::ldexp(1.0, -k);
        auto [v, e] = detail::smear_at_eps(K, ctx, eps, opt.rel_tol, tau_std);
        xs.push_back(eps);
        ys.push_back(v);
        qerr = std::max(qerr, e);
    }
    auto [val, rerr] = detail::neville_zero(xs, ys);
    SmearedValue out{val, rerr + qerr};
    if (opt.require_tol > 0 && out.err > opt.require_tol * std::abs(out.value))
        throw AccuracyError("smear2: requested tolerance not met", out);
    return out;
}

/**
 * @brief Same smear with the kernel's time separation shifted by a complex
 *        amount (KMS strip continuation); the kernel folds the strip edges
 *        to the matching boundary prescription.
 */
inline SmearedValue smear2_shifted(const EpsilonKernel& K, const TestFunction& f,
                                   const TestFunction& g, complexd time_shift,
                                   const SmearOptions& opt = {}) {
    SmearContext ctx(f, g);
    const double eps0 = opt.eps0 > 0 ? opt.eps0 : detail::default_eps0(f, g);
    std::vector<double> xs;
    std::vector<complexd> ys;
    double qerr = 0.0;
    auto tau_sh = [&](double tau, double eps) {
        return K.fold_tau(complexd(tau, 0.0) + time_shift, eps);
    };
    for (int k = 0; k < 5; ++k) {
        const double eps = eps0 * std::ldexp(1.0, -k);
        auto [v, e] = detail::smear_at_eps(K, ctx, eps, opt.rel_tol, tau_sh);
        xs.push_back(eps);
        ys.push_back(v);
        qerr = std::max(qerr, e);
    }
    auto [val, rerr] = detail::neville_zero(xs, ys);
    SmearedValue out{val, rerr + qerr};
    if (opt.require_tol > 0 && out.err > opt.require_tol * std::abs(out.value))
        throw AccuracyError("smear2_shifted: requested tolerance not met", out);
    return out;
}

}  // namespace casimir
