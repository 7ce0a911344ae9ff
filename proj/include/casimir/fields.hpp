#pragma once

/**
 * @brief The boundary-adapted field maps: antisymmetrization, the odd
 *        extension across the plate, and the image operator N that
 *        periodicizes a test function over the slab cell.
 */

#include <casimir/geometry.hpp>
#include <casimir/testfunction.hpp>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace casimir {

/// u(xbar, z) = (phi(xbar,z) - phi(xbar,-z)) / sqrt(2), used on z >= 0.
template <class F>
class Antisymmetrized {
  public:
    explicit Antisymmetrized(F phi) : phi_(std::move(phi)) {}
    double operator()(const Point4& p) const {
        return (phi_(p) - phi_(iota_z(p))) * M_SQRT1_2;
    }

  private:
    F phi_;
};

template <class F>
Antisymmetrized<F> antisymmetrize(F phi) {
    return Antisymmetrized<F>(std::move(phi));
}

/**
 * @brief Odd extension (h(xbar,z) Theta(z) - h(xbar,-z) Theta(-z)) / sqrt(2)
 *        of a test function supported in z > 0.  Smooth because the two
 *        pieces have disjoint closures away from z = 0.
 */
class OddExtension {
  public:
    explicit OddExtension(TestFunction h) : h_(std::move(h)) {
        if (h_.support().lo[3] <= 0.0)
            throw std::invalid_argument("odd_extension: support must lie in z > 0");
    }

    double operator()(const Point4& p) const {
        if (p.z > 0.0) return h_.value(p) * M_SQRT1_2;
        if (p.z < 0.0) return -h_.value(iota_z(p)) * M_SQRT1_2;
        return 0.0;
    }

    const TestFunction& base() const { return h_; }

  private:
    TestFunction h_;
};

inline OddExtension odd_extension(TestFunction h) { return OddExtension(std::move(h)); }

/**
 * @brief N(f)(xbar, z) = Sum_n [ f(xbar, z + 2nd) - f(xbar, -z + 2nd) ].
 *
 * Each evaluation enumerates exactly the n whose translated support can
 * contain the point, so the value equals the full series; oddness and
 * 2d-periodicity then hold at machine precision by construction.  `window`
 * is a lower bound on the enumeration kept for reproducibility of sampled
 * grids near the support edge.
 */
class PeriodicizedFunction {
  public:
    PeriodicizedFunction(TestFunction base, double d, int window)
        : base_(std::move(base)), d_(d), window_(window) {
        if (!(d > 0)) throw std::invalid_argument("image_N: d must be positive");
    }

    double operator()(const Point4& p) const {
        const double zlo = base_.support().lo[3], zhi = base_.support().hi[3];
        double r = 0.0;
        // direct family: need z + 2nd in [zlo, zhi]
        {
            const int n0 = static_cast<int>(std::floor((zlo - p.z) / (2.0 * d_))) - 1;
            const int n1 = static_cast<int>(std::ceil((zhi - p.z) / (2.0 * d_))) + 1;
            for (int n = std::min(n0, -window_); n <= std::max(n1, window_); ++n)
                r += base_.value({p.t, p.x, p.y, p.z + 2.0 * n * d_});
        }
        // reflected family: need -z + 2nd in [zlo, zhi]
        {
            const int n0 = static_cast<int>(std::floor((zlo + p.z) / (2.0 * d_))) - 1;
            const int n1 = static_cast<int>(std::ceil((zhi + p.z) / (2.0 * d_))) + 1;
            for (int n = std::min(n0, -window_); n <= std::max(n1, window_); ++n)
                r -= base_.value({p.t, p.x, p.y, -p.z + 2.0 * n * d_});
        }
        return r;
    }

    const TestFunction& base() const { return base_; }
    double period_half() const { return d_; }
    int window() const { return window_; }

  private:
    TestFunction base_;
    double d_;
    int window_;
};

/// Default window per the support-coverage rule.
inline int image_window_default(const TestFunction& f, double d, double z_max = 0.0) {
    const double zr = std::max(std::abs(f.support().lo[3]), std::abs(f.support().hi[3]));
    return static_cast<int>(std::ceil((std::abs(z_max) + zr) / (2.0 * d))) + 1;
}

inline PeriodicizedFunction image_N(const TestFunction& f, double d, int window = -1) {
    if (window < 0) window = image_window_default(f, d);
    return PeriodicizedFunction(f, d, window);
}

}  // namespace casimir
