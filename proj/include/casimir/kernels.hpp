#pragma once

/**
 * @brief Epsilon-regularized two-point kernels for the massless field:
 *        Minkowski vacuum, KMS at inverse temperature beta, the Hadamard
 *        parametrix, and the image-term structure shared by the boundary
 *        kernels.
 *
 * Vacuum:  (1/4pi^2) / (|dx|^2 - (dt - i eps)^2).
 * KMS:     (1/(4 pi beta r)) sinh(2 pi r/beta)
 *              / [cosh(2 pi r/beta) - cosh(2 pi (dt - i eps)/beta)],
 * which is the imaginary-time image sum  Sum_m vacuum(dt - i m beta)  and
 * reproduces the vacuum kernel as beta -> infinity.  (A published variant
 * with prefactor 1/(2 pi beta r) fails that limit by a factor 2; the image
 * sum and the thermal mode integral both give 1/(4 pi beta r), asserted in
 * the tests.)
 *
 * All kernels here are built from image terms
 *     weight * core(tau_hat, rho^2 + dz_eff^2)
 * with dz_eff = z - z' - shift (difference family) or z + z' - shift
 * (reflection family); the smearing module exploits exactly this structure.
 */

#include <casimir/geometry.hpp>
#include <casimir/special.hpp>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace casimir {

using complexd = std::complex<double>;

enum class StateKind { Vacuum, KMS };

struct StateSpec {
    StateKind kind = StateKind::Vacuum;
    double beta = 0.0;  ///< inverse temperature; required for KMS

    static StateSpec vacuum() { return {StateKind::Vacuum, 0.0}; }
    static StateSpec kms(double beta) {
        if (!(beta > 0)) throw std::invalid_argument("StateSpec: beta must be positive");
        return {StateKind::KMS, beta};
    }
};

/// Smeared result with a combined quadrature/truncation/extrapolation bound.
struct SmearedValue {
    complexd value{};
    double err = 0.0;
};

/// Raised when a requested accuracy cannot be met; carries the best value.
class AccuracyError : public std::runtime_error {
  public:
    AccuracyError(const std::string& what, SmearedValue best)
        : std::runtime_error(what), best_(best) {}
    const SmearedValue& best() const { return best_; }

  private:
    SmearedValue best_;
};

namespace core {

/// Vacuum core as a function of tau_hat = dt - i eps and s = |dx|^2.
inline complexd vacuum(complexd tau_hat, double s) {
    constexpr double inv4pi2 = 1.0 / (4.0 * M_PI * M_PI);
    return inv4pi2 / (s - tau_hat * tau_hat);
}

/**
 * @brief KMS core; r = sqrt(s).  The denominator is factored as
 *        cosh q - cosh p = 2 sinh((q+p)/2) sinh((q-p)/2) and each sinh is
 *        scaled by its dominant exponential, so the evaluation is free of
 *        cancellation near coincidence and cannot overflow at large r/beta
 *        or |tau|/beta.
 */
inline complexd kms(complexd tau_hat, double s, double beta) {
    const double r = std::sqrt(s);
    const complexd p = 2.0 * M_PI * tau_hat / beta;
    if (r == 0.0) {
        // limit q -> 0: -(1/(4 beta^2)) / sinh^2(p/2)
        if (std::abs(p.real()) > 1400.0) return {0.0, 0.0};
        const complexd sh = std::sinh(0.5 * p);
        return -1.0 / (4.0 * beta * beta * sh * sh);
    }
    const double q = 2.0 * M_PI * r / beta;
    complexd A1 = 0.5 * (complexd(q, 0.0) + p);
    complexd A2 = 0.5 * (complexd(q, 0.0) - p);
    double sign = 1.0;
    if (A1.real() < 0.0) {
        A1 = -A1;
        sign = -sign;
    }
    if (A2.real() < 0.0) {
        A2 = -A2;
        sign = -sign;
    }
    // sinh(A) = exp(Re A) * t(A),  t(A) = exp(i Im A) (1 - exp(-2A)) / 2
    auto t_of = [](complexd A) {
        return std::exp(complexd(0.0, A.imag())) * (-0.5 * cexpm1(-2.0 * A));
    };
    const double t0 = -0.5 * std::expm1(-2.0 * q);  // sinh q = exp(q) t0
    const complexd t1 = t_of(A1), t2 = t_of(A2);
    const double expo = q - A1.real() - A2.real();  // <= 0
    return sign * t0 * std::exp(expo) / (8.0 * M_PI * beta * r * t1 * t2);
}

}  // namespace core

/// One image contribution: weight * core at dz_eff^2.
struct ImageTerm {
    enum class Family { Diff, Sum };  ///< Diff: z - z' - shift; Sum: z + z' - shift
    Family family = Family::Diff;
    double shift = 0.0;
    double weight = 1.0;
};

/**
 * @brief Epsilon-regularized kernel: a base state core summed over image
 *        terms.  Minkowski kernels carry the single identity term.
 */
struct EpsilonKernel {
    StateSpec state;
    std::vector<ImageTerm> terms{{ImageTerm::Family::Diff, 0.0, 1.0}};
    bool hermitian = true;
    bool z_reflection_invariant = true;   ///< under simultaneous reflection
    bool z_translation_invariant = true;  ///< under simultaneous translation
    bool time_translation_invariant = true;
    bool is_parametrix = false;

    complexd term_core(complexd tau_hat, double s) const {
        return state.kind == StateKind::Vacuum ? core::vacuum(tau_hat, s)
                                               : core::kms(tau_hat, s, state.beta);
    }

    /// Reduced evaluation at separation (tau_hat, rho^2) and endpoint pair (z, z').
    complexd eval_reduced(complexd tau_hat, double rho2, double z, double zp) const {
        complexd sum{};
        for (const auto& t : terms) {
            const double dz =
                (t.family == ImageTerm::Family::Diff ? z - zp : z + zp) - t.shift;
            sum += t.weight * term_core(tau_hat, rho2 + dz * dz);
        }
        return sum;
    }

    complexd eval(const Point4& x, const Point4& xp, double eps) const {
        if (!(eps > 0)) throw std::invalid_argument("EpsilonKernel: eps must be positive");
        const Point4 dbar{x.t - xp.t, x.x - xp.x, x.y - xp.y, 0.0};
        return eval_reduced(complexd(dbar.t, -eps), dbar.x * dbar.x + dbar.y * dbar.y, x.z,
                            xp.z);
    }

    /**
     * @brief Map a complex time separation inside the KMS analyticity strip
     *        Im(dt) in [-beta, 0] to the regulated argument; the strip edges
     *        fold to the corresponding boundary-value prescription.
     */
    complexd fold_tau(complexd dt, double eps) const {
        if (state.kind == StateKind::Vacuum) return dt - complexd(0.0, eps);
        const double b = dt.imag();
        const double tol = 1e-12 * state.beta;
        if (b > tol || b < -state.beta - tol)
            throw std::domain_error("kms kernel: Im(dt) outside (-beta, 0]");
        if (std::abs(b) <= tol) return complexd(dt.real(), -eps);
        if (std::abs(b + state.beta) <= tol)
            return complexd(dt.real(), +eps);  // boundary value from the strip interior
        return dt;  // interior: pole-free, no prescription needed
    }

    /// Evaluation with a complex time separation (KMS strip continuation).
    complexd eval_ct(const Point4& x, const Point4& xp, complexd dt, double eps) const {
        const complexd tau_hat = fold_tau(dt, eps);
        const double rho2 =
            (x.x - xp.x) * (x.x - xp.x) + (x.y - xp.y) * (x.y - xp.y);
        return eval_reduced(tau_hat, rho2, x.z, xp.z);
    }
};

inline EpsilonKernel vacuum_kernel() { return EpsilonKernel{StateSpec::vacuum()}; }

inline EpsilonKernel kms_kernel(double beta) { return EpsilonKernel{StateSpec::kms(beta)}; }

/// Massless flat-space parametrix: the vacuum kernel, flagged so observables
/// subtract exactly this term.
inline EpsilonKernel hadamard_parametrix() {
    EpsilonKernel k{StateSpec::vacuum()};
    k.is_parametrix = true;
    return k;
}

}  // namespace casimir
