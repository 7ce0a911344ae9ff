#pragma once

/**
 * @brief Gauss-Legendre rules and an adaptive 1D integrator.
 *
 * The adaptive scheme bisects the worst interval of a global heap until the
 * summed error estimate meets the tolerance.  Callers may pass interior
 * "hints" (pole projections, support edges); those become initial interval
 * boundaries so the refinement starts where the integrand is hard.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <queue>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace casimir {

/// Value plus accumulated absolute error estimate.
template <class T>
struct Quad {
    T value{};
    double err = 0.0;
    long evals = 0;
};

inline double quad_norm(double v) { return std::abs(v); }
inline double quad_norm(const std::complex<double>& v) { return std::abs(v); }

/// Cached Gauss-Legendre rules on [-1, 1].
class GaussLegendre {
  public:
    struct Rule {
        std::vector<double> x;
        std::vector<double> w;
    };

    /// Nodes/weights for an n-point rule; computed once per order.
    static const Rule& rule(int n) {
        static std::map<int, Rule> cache;
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
        return cache.emplace(n, make_rule(n)).first->second;
    }

  private:
    static Rule make_rule(int n) {
        if (n < 1) throw std::invalid_argument("GaussLegendre: order must be positive");
        Rule r;
        r.x.resize(n);
        r.w.resize(n);
        for (int i = 0; i < (n + 1) / 2; ++i) {
            // Newton on P_n with the Chebyshev-like initial guess.
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            r.x[i] = -x;
            r.x[n - 1 - i] = x;
            double w = 2.0 / ((1.0 - x * x) * dp * dp);
            r.w[i] = w;
            r.w[n - 1 - i] = w;
        }
        return r;
    }
};

/// Fixed-order Gauss-Legendre integral of f over [a, b].
template <class F>
auto gl_integrate(F&& f, double a, double b, int n) {
    using T = std::invoke_result_t<F, double>;
    const auto& r = GaussLegendre::rule(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    T sum{};
    for (int i = 0; i < n; ++i) sum += T(r.w[i] * half) * f(mid + half * r.x[i]);
    return sum;
}

struct AdaptiveOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int order = 15;               ///< per-interval rule; halves use the same order
    long max_intervals = 200000;  ///< refinement budget
    std::vector<double> hints;    ///< interior break points (clipped to (a,b))
};

/**
 * @brief Globally adaptive Gauss-Legendre integration of f over [a, b].
 *
 * Error estimate per interval: |GL(whole) - GL(left)+GL(right)|; the returned
 * value is the refined (two-half) sum.  Works for real and complex integrands.
 */
template <class F>
auto adaptive_integrate(F&& f, double a, double b, const AdaptiveOptions& opt = {}) {
    using T = std::invoke_result_t<F, double>;
    Quad<T> out;
    if (!(a < b)) {
        if (a == b) return out;
        throw std::invalid_argument("adaptive_integrate: empty range");
    }

    struct Seg {
        double a, b;
        T value;  // two-half estimate
        double err;
    };
    const int n = opt.order;
    long evals = 0;
    auto make_seg = [&](double lo, double hi) {
        T whole = gl_integrate(f, lo, hi, n);
        double mid = 0.5 * (lo + hi);
        T refined = gl_integrate(f, lo, mid, n);
        refined += gl_integrate(f, mid, hi, n);
        evals += 3 * n;
        return Seg{lo, hi, refined, quad_norm(whole - refined)};
    };

    std::vector<double> cuts{a, b};
    for (double h : opt.hints)
        if (h > a && h < b) cuts.push_back(h);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto cmp = [](const Seg& s1, const Seg& s2) { return s1.err < s2.err; };
    std::priority_queue<Seg, std::vector<Seg>, decltype(cmp)> heap(cmp);
    T total{};
    double toterr = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Seg s = make_seg(cuts[i], cuts[i + 1]);
        total += s.value;
        toterr += s.err;
        heap.push(s);
    }

    long count = static_cast<long>(heap.size());
    while (toterr > std::max(opt.abs_tol, opt.rel_tol * quad_norm(total)) &&
           count < opt.max_intervals) {
        Seg worst = heap.top();
        heap.pop();
        total -= worst.value;
        toterr -= worst.err;
        double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {  // cannot split further in fp
            total += worst.value;
            toterr += worst.err;
            break;
        }
        for (Seg s : {make_seg(worst.a, mid), make_seg(mid, worst.b)}) {
            total += s.value;
            toterr += s.err;
            heap.push(s);
        }
        ++count;
    }
    out.value = total;
    out.err = toterr;
    out.evals = evals;
    return out;
}

}  // namespace casimir
