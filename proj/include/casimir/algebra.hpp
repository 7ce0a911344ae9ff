#pragma once

/**
 * @brief Finite-order functional algebra: regular polynomial functionals,
 *        star products for the commutator pairings and for the -2iH
 *        deformation, CCR/causality reports, the one-cell symplectic pairing
 *        sigma_C, and quasi-free state evaluation by Wick pairing.
 *
 * Functionals are finite sums of monomials c * prod <f_i, u>; the public
 * constructors cover degrees 0..2, products raise the degree as needed.
 * Star products terminate exactly because every functional has finitely many
 * derivatives; all analysis lives in the pairing quadratures, whose error
 * estimates are accumulated into a per-functional coefficient error bound.
 */

#include <casimir/boundary.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

namespace casimir {

/// Bidistribution slot of the star product: the three commutator pairings
/// plus the Hadamard deformation -2iH (H = massless vacuum two-point).
enum class PairingKind { MinkowskiE, HalfSpaceE, SlabE, DeformedH };

struct AlgebraOptions {
    double d = 1.0;          ///< slab width, used by SlabE only
    double rel_tol = 1e-9;   ///< pairing quadrature tolerance
    SmearOptions smear{};    ///< DeformedH two-point smearing control
};

/// Complex pairing value with an absolute error bound.
struct ComplexPairing {
    complexd value{};
    double err = 0.0;
};

/// P(f, g) for the chosen slot.  The E kinds are real; DeformedH is complex
/// with antisymmetric part equal to the Minkowski E pairing.
inline ComplexPairing pairing_value(PairingKind kind, const TestFunction& f,
                                    const TestFunction& g, const AlgebraOptions& opt = {}) {
    switch (kind) {
        case PairingKind::MinkowskiE: {
            const auto p = minkowski_E(f, g, opt.rel_tol);
            return {complexd(p.value, 0.0), p.err};
        }
        case PairingKind::HalfSpaceE: {
            const auto p = half_space_E(f, g, opt.rel_tol);
            return {complexd(p.value, 0.0), p.err};
        }
        case PairingKind::SlabE: {
            const auto p = slab_E(f, g, opt.d, opt.rel_tol);
            return {complexd(p.value, 0.0), p.err};
        }
        case PairingKind::DeformedH: {
            const auto s = smear2(hadamard_parametrix(), f, g, opt.smear);
            return {complexd(0.0, -2.0) * s.value, 2.0 * s.err};
        }
    }
    throw std::invalid_argument("pairing_value: unknown kind");
}

using TestFunctionPtr = std::shared_ptr<const TestFunction>;

/// Smooth field configuration; complex-valued so the *-operation identity
/// (F*)(u) = conj F(conj u) is testable off the real slice.
using Configuration = std::function<complexd(const Point4&)>;

/// One monomial c * prod_i <f_i, u>.  The factor list is a multiset: scalars
/// <f_i, u> commute, so symmetrization is automatic.
struct FunctionalTerm {
    complexd coeff{};
    std::vector<TestFunctionPtr> factors;
};

/**
 * @brief Polynomial functional on field configurations with finitely many
 *        terms.  Immutable in use: arithmetic returns new values.
 *
 * err() bounds the accumulated uncertainty of the coefficients (from pairing
 * quadratures in star products); exact constructions carry zero.
 */
class RegularFunctional {
  public:
    RegularFunctional() = default;

    static RegularFunctional unit() { return scalar(complexd(1.0, 0.0)); }

    static RegularFunctional scalar(complexd c) {
        RegularFunctional F;
        F.terms_.push_back({c, {}});
        return F;
    }

    /// Linear generator F_f(u) = <f, u>.
    static RegularFunctional generator(const TestFunction& f) {
        RegularFunctional F;
        F.terms_.push_back({complexd(1.0, 0.0), {std::make_shared<const TestFunction>(f)}});
        return F;
    }

    /// Symmetrized degree-2 term c <f (x) g, u (x) u> = c <f,u><g,u>.
    static RegularFunctional quadratic(complexd c, const TestFunction& f,
                                       const TestFunction& g) {
        RegularFunctional F;
        F.terms_.push_back({c,
                            {std::make_shared<const TestFunction>(f),
                             std::make_shared<const TestFunction>(g)}});
        return F;
    }

    const std::vector<FunctionalTerm>& terms() const { return terms_; }
    double err() const { return err_; }
    bool empty() const { return terms_.empty(); }

    int degree() const {
        std::size_t d = 0;
        for (const auto& t : terms_) d = std::max(d, t.factors.size());
        return static_cast<int>(d);
    }

    complexd scalar_part() const {
        for (const auto& t : terms_)
            if (t.factors.empty()) return t.coeff;
        return complexd{};
    }

    /// Sum of coefficient magnitudes; the scale against which err() is read.
    double norm1() const {
        double n = 0.0;
        for (const auto& t : terms_) n += std::abs(t.coeff);
        return n;
    }

    /// *-operation: coefficient conjugation (test functions are real).
    RegularFunctional star() const {
        RegularFunctional F = *this;
        for (auto& t : F.terms_) t.coeff = std::conj(t.coeff);
        return F;
    }

    /// Evaluation scalar + sum c <f,u> + sum c <f,u><g,u> + ...; each moment
    /// <f, u> is a tensor Gauss-Legendre integral over the factor's support.
    complexd evaluate(const Configuration& u, int order = 24) const {
        std::map<const TestFunction*, complexd> cache;
        auto moment = [&](const TestFunctionPtr& f) {
            auto it = cache.find(f.get());
            if (it == cache.end()) it = cache.emplace(f.get(), moment_of(*f, u, order)).first;
            return it->second;
        };
        complexd out{};
        for (const auto& t : terms_) {
            complexd v = t.coeff;
            for (const auto& f : t.factors) v *= moment(f);
            out += v;
        }
        return out;
    }
    complexd operator()(const Configuration& u, int order = 24) const {
        return evaluate(u, order);
    }

    RegularFunctional& operator+=(const RegularFunctional& o) {
        terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
        err_ += o.err_;
        normalize();
        return *this;
    }
    friend RegularFunctional operator+(RegularFunctional a, const RegularFunctional& b) {
        a += b;
        return a;
    }
    friend RegularFunctional operator-(const RegularFunctional& a, const RegularFunctional& b) {
        return a + complexd(-1.0, 0.0) * b;
    }
    friend RegularFunctional operator*(complexd c, const RegularFunctional& F) {
        RegularFunctional G = F;
        for (auto& t : G.terms_) t.coeff *= c;
        G.err_ *= std::abs(c);
        return G;
    }

    /// Pointwise (classical) product: concatenated factor lists.
    RegularFunctional multiply(const RegularFunctional& o) const {
        RegularFunctional out;
        for (const auto& a : terms_)
            for (const auto& b : o.terms_) {
                FunctionalTerm t{a.coeff * b.coeff, a.factors};
                t.factors.insert(t.factors.end(), b.factors.begin(), b.factors.end());
                out.terms_.push_back(std::move(t));
            }
        out.err_ = err_ * o.norm1() + o.err_ * norm1();
        out.normalize();
        return out;
    }

    /// Canonical form: factor lists sorted, equal monomials merged, exact
    /// zeros pruned.  Called by all arithmetic.
    void normalize() {
        for (auto& t : terms_)
            std::sort(t.factors.begin(), t.factors.end(),
                      [](const TestFunctionPtr& a, const TestFunctionPtr& b) {
                          return a.get() < b.get();
                      });
        std::sort(terms_.begin(), terms_.end(), term_order);
        std::vector<FunctionalTerm> merged;
        for (auto& t : terms_) {
            if (!merged.empty() && same_factors(merged.back(), t))
                merged.back().coeff += t.coeff;
            else
                merged.push_back(std::move(t));
        }
        merged.erase(std::remove_if(merged.begin(), merged.end(),
                                    [](const FunctionalTerm& t) {
                                        return t.coeff == complexd{} && !t.factors.empty();
                                    }),
                     merged.end());
        terms_ = std::move(merged);
    }

    void add_err(double e) { err_ += e; }
    void push_term(FunctionalTerm t) { terms_.push_back(std::move(t)); }

  private:
    static bool term_order(const FunctionalTerm& a, const FunctionalTerm& b) {
        if (a.factors.size() != b.factors.size())
            return a.factors.size() < b.factors.size();
        for (std::size_t i = 0; i < a.factors.size(); ++i)
            if (a.factors[i].get() != b.factors[i].get())
                return a.factors[i].get() < b.factors[i].get();
        return false;
    }
    static bool same_factors(const FunctionalTerm& a, const FunctionalTerm& b) {
        return !term_order(a, b) && !term_order(b, a);
    }

    static complexd moment_of(const TestFunction& f, const Configuration& u, int order) {
        auto along = [&](int axis, const Point4& base, auto&& inner) {
            const Bump1D& b = f.axis(axis);
            return gl_integrate(
                [&](double s) {
                    Point4 p = base;
                    (axis == 0 ? p.t : axis == 1 ? p.x : axis == 2 ? p.y : p.z) = s;
                    return inner(p);
                },
                b.lo(), b.hi(), order);
        };
        return along(0, {}, [&](const Point4& p0) {
            return along(1, p0, [&](const Point4& p1) {
                return along(2, p1, [&](const Point4& p2) {
                    return along(3, p2, [&](const Point4& p3) {
                        return complexd(f.value(p3)) * u(p3);
                    });
                });
            });
        });
    }

    std::vector<FunctionalTerm> terms_;
    double err_ = 0.0;
};

/// Largest coefficient difference between two functionals in canonical form;
/// the natural residual for structural identities (associativity, hermiticity).
inline double coefficient_distance(const RegularFunctional& a, const RegularFunctional& b) {
    const RegularFunctional diff = a - b;
    double m = 0.0;
    for (const auto& t : diff.terms()) m = std::max(m, std::abs(t.coeff));
    return m;
}

/**
 * @brief Star product Sum_n (i^n / 2^n n!) <F^(n), P^(x)n G^(n)> for the
 *        chosen pairing slot P.  The series terminates at n = min degree;
 *        the n-th term enumerates size-n matchings between factor multisets
 *        with weight (i/2) P(f, g) per contracted pair.
 */
inline RegularFunctional star_product(const RegularFunctional& F, const RegularFunctional& G,
                                      PairingKind kind, const AlgebraOptions& opt = {}) {
    std::map<std::pair<const TestFunction*, const TestFunction*>, ComplexPairing> cache;
    auto P = [&](const TestFunctionPtr& a, const TestFunctionPtr& b) -> const ComplexPairing& {
        const auto key = std::make_pair(a.get(), b.get());
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, pairing_value(kind, *a, *b, opt)).first;
        return it->second;
    };

    RegularFunctional out;
    double err = F.err() * G.norm1() + G.err() * F.norm1();
    for (const auto& A : F.terms())
        for (const auto& B : G.terms()) {
            const auto& fa = A.factors;
            const auto& fb = B.factors;
            // Walk B's factors; each is left free or contracted with an
            // unused factor of A.  weight/werr track the product of (i/2)P
            // values and its first-order error along the current branch.
            std::vector<bool> usedA(fa.size(), false), matchedB(fb.size(), false);
            std::function<void(std::size_t, complexd, double)> walk =
                [&](std::size_t j, complexd weight, double werr) {
                    if (j == fb.size()) {
                        FunctionalTerm t{A.coeff * B.coeff * weight, {}};
                        for (std::size_t i = 0; i < fa.size(); ++i)
                            if (!usedA[i]) t.factors.push_back(fa[i]);
                        for (std::size_t k = 0; k < fb.size(); ++k)
                            if (!matchedB[k]) t.factors.push_back(fb[k]);
                        out.push_term(std::move(t));
                        err += std::abs(A.coeff * B.coeff) * werr;
                        return;
                    }
                    walk(j + 1, weight, werr);
                    for (std::size_t i = 0; i < fa.size(); ++i) {
                        if (usedA[i]) continue;
                        const auto& p = P(fa[i], fb[j]);
                        const complexd v = complexd(0.0, 0.5) * p.value;
                        usedA[i] = true;
                        matchedB[j] = true;
                        walk(j + 1, weight * v, werr * std::abs(v) + std::abs(weight) * 0.5 * p.err);
                        usedA[i] = false;
                        matchedB[j] = false;
                    }
                };
            walk(0, complexd(1.0, 0.0), 0.0);
        }
    out.add_err(err);
    out.normalize();
    return out;
}

/// CCR/causality report for two linear generators under one pairing slot.
struct CcrReport {
    complexd commutator_scalar{};  ///< scalar part of F_f * F_g - F_g * F_f
    complexd pairing{};            ///< P(f, g) as evaluated
    complexd pairing_antisym{};    ///< (P(f,g) - P(g,f)) / 2
    double err = 0.0;              ///< combined pairing error
    double structural_residual = 0.0;  ///< |commutator - i * antisym pairing|
    bool scalar_only = false;      ///< quadratic parts cancelled exactly
};

/**
 * @brief Computes [F_f, F_g] under the chosen star product and compares its
 *        scalar with i P(f, g).  For spacelike-separated supports (images
 *        included, where the slot reflects any) |commutator_scalar| is the
 *        causality deviation from zero.
 */
inline CcrReport ccr_causality_check(const TestFunction& f, const TestFunction& g,
                                     PairingKind kind, const AlgebraOptions& opt = {}) {
    const auto Ff = RegularFunctional::generator(f);
    const auto Fg = RegularFunctional::generator(g);
    const auto comm = star_product(Ff, Fg, kind, opt) - star_product(Fg, Ff, kind, opt);
    const auto pv = pairing_value(kind, f, g, opt);
    const auto pw = pairing_value(kind, g, f, opt);
    CcrReport r;
    r.commutator_scalar = comm.scalar_part();
    r.pairing = pv.value;
    r.pairing_antisym = 0.5 * (pv.value - pw.value);
    r.err = comm.err() + 0.5 * (pv.err + pw.err);
    r.structural_residual =
        std::abs(r.commutator_scalar - complexd(0.0, 1.0) * r.pairing_antisym);
    r.scalar_only = comm.degree() == 0;
    return r;
}

/// Argument slot of sigma_C: a plain test function or an odd-periodic image
/// sum N(f) (see image_N), carried by its generating bump.
struct SigmaArg {
    TestFunction f;
    bool periodic = false;
    double d = 0.0;
    SigmaArg(const TestFunction& fn) : f(fn) {}  // NOLINT(google-explicit-constructor)
    SigmaArg(const PeriodicizedFunction& p)      // NOLINT(google-explicit-constructor)
        : f(p.base()), periodic(true), d(p.period_half()) {}
};

/// sigma_C value with the raw asymmetry diagnostic (the antisymmetrized
/// return hides it, so it is reported separately).
struct SigmaCValue {
    double value = 0.0;
    double asymmetry = 0.0;  ///< raw(a, b) + raw(b, a); 0 for exact E
    double err = 0.0;
};

namespace detail {

/// One-cell integral int_{R^3} d3xbar int_0^d dz a . E(b).  A plain first
/// slot supported inside the cell reduces to the Minkowski pairing; the
/// periodic unfolding of a periodicized first slot turns the cell integral
/// into the full-space pairing against the image sum of the second.
inline PairingValue raw_sigma_cell(const SigmaArg& a, const SigmaArg& b, double rel_tol) {
    if (b.periodic) return slab_E(a.f, b.f, b.d, rel_tol);
    return minkowski_E(a.f, b.f, rel_tol);
}

}  // namespace detail

/**
 * @brief Slab symplectic pairing sigma_C(zeta, zeta') over one cell,
 *        antisymmetry enforced by construction: (raw - swapped) / 2, with the
 *        raw asymmetry reported as a diagnostic.  Plain arguments must be
 *        supported in the open cell; periodicized pairs must share d.
 */
inline SigmaCValue sigma_c_pairing(const SigmaArg& a, const SigmaArg& b,
                                   double rel_tol = 1e-9) {
    const double d = a.periodic ? a.d : (b.periodic ? b.d : 0.0);
    if (a.periodic && b.periodic && a.d != b.d)
        throw std::invalid_argument("sigma_c_pairing: mismatched cell widths");
    if (d > 0.0) {
        for (const SigmaArg* s : {&a, &b})
            if (!(s->f.bz.lo() > 0.0 && s->f.bz.hi() < d))
                throw std::invalid_argument("sigma_c_pairing: support must lie in (0, d)");
    }
    const auto fwd = detail::raw_sigma_cell(a, b, rel_tol);
    const auto bwd = detail::raw_sigma_cell(b, a, rel_tol);
    return {0.5 * (fwd.value - bwd.value), fwd.value + bwd.value, 0.5 * (fwd.err + bwd.err)};
}

/**
 * @brief Quasi-free expectation: odd monomials vanish; even ones are summed
 *        over complete Wick pairings weighted by the symmetrized two-point
 *        value mu(f, g) = (omega2(f,g) + omega2(g,f)) / 2.  Combined with the
 *        matching E star product this realizes omega(F_f * F_g) = omega2(f,g).
 *
 * omega2 is any callable (f, g) -> SmearedValue; err_out, when given,
 * accumulates the first-order uncertainty from the pairing errors.
 */
template <class Omega2>
complexd quasifree_expectation(const RegularFunctional& F, Omega2&& omega2,
                               double* err_out = nullptr) {
    std::map<std::pair<const TestFunction*, const TestFunction*>, SmearedValue> cache;
    auto mu = [&](const TestFunctionPtr& a, const TestFunctionPtr& b) {
        auto key = std::make_pair(std::min(a.get(), b.get()), std::max(a.get(), b.get()));
        auto it = cache.find(key);
        if (it == cache.end()) {
            const auto s = omega2(*a, *b);
            const auto t = omega2(*b, *a);
            it = cache.emplace(key, SmearedValue{0.5 * (s.value + t.value),
                                                 0.5 * (s.err + t.err)})
                     .first;
        }
        return it->second;
    };
    complexd out{};
    double err = F.err();
    for (const auto& t : F.terms()) {
        const std::size_t p = t.factors.size();
        if (p % 2 != 0) continue;
        if (p == 0) {
            out += t.coeff;
            continue;
        }
        // Recursive pairing sum: pair the first unpaired factor with each
        // later one; (p-1)!! products of mu values.
        std::function<std::pair<complexd, double>(std::vector<TestFunctionPtr>)> wick =
            [&](std::vector<TestFunctionPtr> fs) -> std::pair<complexd, double> {
            if (fs.empty()) return {complexd(1.0, 0.0), 0.0};
            complexd total{};
            double terr = 0.0;
            for (std::size_t j = 1; j < fs.size(); ++j) {
                const auto m = mu(fs[0], fs[j]);
                std::vector<TestFunctionPtr> rest;
                for (std::size_t k = 1; k < fs.size(); ++k)
                    if (k != j) rest.push_back(fs[k]);
                const auto [sub, suberr] = wick(rest);
                total += m.value * sub;
                terr += std::abs(m.value) * suberr + m.err * std::abs(sub);
            }
            return {total, terr};
        };
        const auto [v, verr] = wick(t.factors);
        out += t.coeff * v;
        err += std::abs(t.coeff) * verr;
    }
    if (err_out) *err_out = err;
    return out;
}

}  // namespace casimir
