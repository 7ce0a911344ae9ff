#pragma once

/**
 * @brief Dirichlet boundary kernels and propagators: the single-plate
 *        (half-space) reflection kernel, the two-plate slab image series and
 *        its vacuum closed form, image propagators driven by the Kirchhoff
 *        solver, commutator pairings in both geometries, and the KMS
 *        condition residual.
 *
 * Image conventions: the periodic family carries z - z' - 2nd with weight +1,
 * the reflected family z + z' - 2nd with weight -1; both include n = 0.  The
 * n = 0 periodic term is the Minkowski kernel itself and is omitted only by
 * the observables layer when the Hadamard subtraction consumes it.
 */

#include <casimir/fields.hpp>
#include <casimir/kernels.hpp>
#include <casimir/kirchhoff.hpp>
#include <casimir/smearing.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace casimir {

/// Half-space Dirichlet kernel: identity term minus the z-reflected image.
inline EpsilonKernel cp_kernel(StateSpec state) {
    EpsilonKernel k{state};
    k.terms = {{ImageTerm::Family::Diff, 0.0, +1.0}, {ImageTerm::Family::Sum, 0.0, -1.0}};
    k.z_translation_invariant = false;
    return k;
}

/**
 * @brief Slab Dirichlet kernel truncated to images |n| <= window, ordered
 *        n = 0 first and then ascending |n| in (+n, -n) pairs.
 */
inline EpsilonKernel slab_kernel(StateSpec state, double d, int window) {
    if (!(d > 0)) throw std::invalid_argument("slab_kernel: d must be positive");
    if (window < 0) throw std::invalid_argument("slab_kernel: window must be >= 0");
    EpsilonKernel k{state};
    k.terms.clear();
    auto push_pair = [&](int n) {
        k.terms.push_back({ImageTerm::Family::Diff, 2.0 * n * d, +1.0});
        k.terms.push_back({ImageTerm::Family::Sum, 2.0 * n * d, -1.0});
    };
    push_pair(0);
    for (int n = 1; n <= window; ++n) {
        push_pair(n);
        push_pair(-n);
    }
    k.z_translation_invariant = false;
    return k;
}

/// Half-space image map f - f o iota_z; requires supp f in z > 0.
inline SumFunction cp_image(const TestFunction& f) {
    if (!(f.bz.lo() > 0.0))
        throw std::invalid_argument("cp_image: support must lie in z > 0");
    return SumFunction{{{1.0, f}, {-1.0, isometry_apply(IsometryKind::ReflectZ, f)}}};
}

/// Single-plate causal propagator value at x.
inline double cp_propagator(const TestFunction& h, const Point4& x, double rel_tol = 1e-9) {
    return kirchhoff_causal(cp_image(h), x, rel_tol);
}

/// Slab image map truncated to |n| <= window; requires supp f in (0, d).
inline SumFunction slab_image(const TestFunction& f, double d, int window) {
    if (!(f.bz.lo() > 0.0 && f.bz.hi() < d))
        throw std::invalid_argument("slab_image: support must lie in (0, d)");
    SumFunction s;
    const TestFunction r = isometry_apply(IsometryKind::ReflectZ, f);
    for (int n = -window; n <= window; ++n) {
        s.terms.push_back({+1.0, isometry_apply(IsometryKind::TranslateZ, f, 2.0 * n * d)});
        s.terms.push_back({-1.0, isometry_apply(IsometryKind::TranslateZ, r, 2.0 * n * d)});
    }
    return s;
}

/**
 * @brief Slab causal propagator at x.  Image terms whose supports are
 *        spacelike to x contribute exactly zero, so the automatic window is
 *        exact, not a truncation.
 */
inline double casimir_propagator(const TestFunction& f, double d, const Point4& x,
                                 double rel_tol = 1e-9, int window = -1) {
    if (window < 0) {
        const double reach =
            std::abs(x.t - f.bt.center) + f.bt.radius + f.bz.radius + std::abs(x.z) +
            std::abs(f.bz.center);
        window = static_cast<int>(std::ceil(reach / (2.0 * d))) + 1;
    }
    return kirchhoff_causal(slab_image(f, d, window), x, rel_tol);
}

/// Truncation policy for the pointwise image series.
struct ImageSeriesConfig {
    int n_max = 500;
    double tail_tol = 1e-8;  ///< relative to the kernel scale seen so far
};

/**
 * @brief Pointwise slab kernel by paired (n, -n) image summation with
 *        compensated accumulation.  Pairs decay like 1/n^2, so the tail after
 *        pair n is modeled as |pair_n| * n; AccuracyError carries the best
 *        value when tail_tol is unreachable within n_max.
 */
inline SmearedValue casimir_kernel_series(StateSpec state, double d, const Point4& x,
                                          const Point4& xp, double eps,
                                          const ImageSeriesConfig& cfg = {}) {
    if (!(eps > 0)) throw std::invalid_argument("casimir_kernel_series: eps must be positive");
    if (!(d > 0)) throw std::invalid_argument("casimir_kernel_series: d must be positive");
    EpsilonKernel base{state};
    const complexd tau_hat{x.t - xp.t, -eps};
    const double rho2 = (x.x - xp.x) * (x.x - xp.x) + (x.y - xp.y) * (x.y - xp.y);
    auto image = [&](int n) {
        const double dz = (x.z - xp.z) - 2.0 * n * d;
        const double sz = (x.z + xp.z) - 2.0 * n * d;
        return base.term_core(tau_hat, rho2 + dz * dz) -
               base.term_core(tau_hat, rho2 + sz * sz);
    };
    KahanSum<double> re, im;
    auto add = [&](complexd v) {
        re.add(v.real());
        im.add(v.imag());
    };
    add(image(0));
    double scale = std::abs(complexd(re.value(), im.value()));
    for (int n = 1; n <= cfg.n_max; ++n) {
        const complexd pair = image(n) + image(-n);
        add(pair);
        scale = std::max(scale, std::abs(complexd(re.value(), im.value())));
        const double tail = std::abs(pair) * n;
        if (tail <= cfg.tail_tol * scale)
            return {complexd(re.value(), im.value()), tail};
    }
    SmearedValue best{complexd(re.value(), im.value()), std::abs(image(cfg.n_max)) * cfg.n_max};
    throw AccuracyError("casimir_kernel_series: tail_tol unreachable at n_max", best);
}

namespace detail {

/// Scaled factor t(w) with sinh(w) = exp(Re w) t(w); exact for all w, stable
/// for Re w >= 0.
inline complexd sinh_scaled(complexd w) {
    return std::exp(complexd(0.0, w.imag())) * (-0.5 * cexpm1(-2.0 * w));
}

/// One closed-form family term sinh(A)/(8 pi d chi (cosh A - cos B)) with
/// A = pi chi / d, in the cancellation-free product representation.
inline complexd slab_closed_term(complexd A, double B, double d) {
    const complexd tA = sinh_scaled(A);
    const complexd t1 = sinh_scaled(0.5 * (A + complexd(0.0, B)));
    const complexd t2 = sinh_scaled(0.5 * (A - complexd(0.0, B)));
    const complexd ratio = std::abs(A) == 0.0 ? complexd(1.0, 0.0) : tA / A;
    return ratio / (16.0 * d * d * t1 * t2);
}

}  // namespace detail

/**
 * @brief Vacuum slab kernel in closed form; chi is the principal square root
 *        of rho^2 - tau_hat^2 (Re chi >= 0; values are branch-even).
 */
inline complexd casimir_kernel_closed(const Point4& x, const Point4& xp, double eps, double d) {
    if (!(eps > 0)) throw std::invalid_argument("casimir_kernel_closed: eps must be positive");
    if (!(d > 0)) throw std::invalid_argument("casimir_kernel_closed: d must be positive");
    const complexd tau_hat{x.t - xp.t, -eps};
    const double rho2 = (x.x - xp.x) * (x.x - xp.x) + (x.y - xp.y) * (x.y - xp.y);
    const complexd chi = std::sqrt(complexd(rho2, 0.0) - tau_hat * tau_hat);
    const complexd A = M_PI * chi / d;
    return detail::slab_closed_term(A, M_PI * (x.z - xp.z) / d, d) -
           detail::slab_closed_term(A, M_PI * (x.z + xp.z) / d, d);
}

/// Half-space commutator pairing E(f, g) - E(f, g o iota_z).
inline PairingValue half_space_E(const TestFunction& f, const TestFunction& g,
                                 double rel_tol = 1e-9) {
    if (!(f.bz.lo() > 0.0 && g.bz.lo() > 0.0))
        throw std::invalid_argument("half_space_E: supports must lie in z > 0");
    auto a = minkowski_E(f, g, rel_tol);
    auto b = minkowski_E(f, isometry_apply(IsometryKind::ReflectZ, g), rel_tol);
    return {a.value - b.value, a.err + b.err};
}

/**
 * @brief Slab commutator pairing: image sum of Minkowski pairings.  Spacelike
 *        image terms vanish identically, so the automatic window is exact.
 */
inline PairingValue slab_E(const TestFunction& f, const TestFunction& g, double d,
                           double rel_tol = 1e-9, int window = -1) {
    if (!(f.bz.lo() > 0.0 && f.bz.hi() < d && g.bz.lo() > 0.0 && g.bz.hi() < d))
        throw std::invalid_argument("slab_E: supports must lie in (0, d)");
    if (window < 0) {
        const double reach = std::abs(f.bt.center - g.bt.center) + f.bt.radius +
                             g.bt.radius + f.bz.radius + g.bz.radius +
                             std::abs(f.bz.center) + std::abs(g.bz.center);
        window = static_cast<int>(std::ceil(reach / (2.0 * d))) + 1;
    }
    const TestFunction r = isometry_apply(IsometryKind::ReflectZ, g);
    PairingValue out;
    for (int n = -window; n <= window; ++n) {
        auto a = minkowski_E(f, isometry_apply(IsometryKind::TranslateZ, g, 2.0 * n * d),
                             rel_tol);
        auto b = minkowski_E(f, isometry_apply(IsometryKind::TranslateZ, r, 2.0 * n * d),
                             rel_tol);
        out.value += a.value - b.value;
        out.err += a.err + b.err;
    }
    return out;
}

/**
 * @brief KMS condition residual  [omega2(t_{-i beta} f, g) - omega2(f, g)]
 *        + i E_geom(f, g)  in the chosen geometry; zero for a thermal state.
 *        The imaginary-time shift runs through the strip-edge fold of the
 *        closed form, the pairing through the Kirchhoff reduction.
 */
inline SmearedValue kms_condition_check(const Geometry& geo, double beta,
                                        const TestFunction& f, const TestFunction& g,
                                        const SmearOptions& opt = {}, int window = 32) {
    EpsilonKernel K = geo.kind == GeometryKind::Slab
                          ? slab_kernel(StateSpec::kms(beta), geo.d, window)
                          : cp_kernel(StateSpec::kms(beta));
    auto lhs = smear2_shifted(K, f, g, complexd(0.0, -beta), opt);
    auto mid = smear2(K, f, g, opt);
    PairingValue E = geo.kind == GeometryKind::Slab ? slab_E(f, g, geo.d)
                                                    : half_space_E(f, g);
    return {lhs.value - mid.value + complexd(0.0, 1.0) * E.value,
            lhs.err + mid.err + E.err};
}

}  // namespace casimir
