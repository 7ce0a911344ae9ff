#pragma once

/**
 * @brief Small special-function kit: compensated summation, Hurwitz zeta with
 *        Euler-Maclaurin tails, the third polygamma, and the diagonal lattice
 *        sum closed form used to cross-check image series.
 */

#include <cmath>
#include <complex>
#include <stdexcept>

namespace casimir {

/// Kahan compensated accumulator.
template <class T = double>
struct KahanSum {
    T sum{};
    T comp{};
    void add(T v) {
        T y = v - comp;
        T t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    T value() const { return sum; }
};

/**
 * @brief Euler-Maclaurin tail  Sum_{m=M}^inf f(m)  from the integral
 *        I = int_M^inf f dx and derivatives of f at M.
 *
 * Truncates after the B_6 term; caller chooses M so f^(5)(M)/30240 bounds the
 * remainder acceptably.
 */
template <class T>
T em_tail(T integral_M, T f_M, T f1_M, T f3_M, T f5_M) {
    return integral_M + f_M / 2.0 - f1_M / 12.0 + f3_M / 720.0 - f5_M / 30240.0;
}

/**
 * @brief Hurwitz zeta  zeta(s, a) = Sum_{n>=0} (n+a)^{-s}  for integer s >= 2,
 *        a > 0.  Partial sum plus Euler-Maclaurin tail; absolute accuracy is
 *        better than 1e-13 for a in (0, 2].
 */
inline double hurwitz_zeta(int s, double a) {
    if (s < 2) throw std::invalid_argument("hurwitz_zeta: s >= 2 required");
    if (!(a > 0.0)) throw std::invalid_argument("hurwitz_zeta: a > 0 required");
    const int M = 24;
    KahanSum<> head;
    for (int n = 0; n < M; ++n) head.add(std::pow(n + a, -s));
    const double x = M + a;
    const double f = std::pow(x, -s);
    const double integral = std::pow(x, 1 - s) / (s - 1);
    const double f1 = -s * std::pow(x, -s - 1);
    const double f3 = -double(s) * (s + 1) * (s + 2) * std::pow(x, -s - 3);
    const double f5 = -double(s) * (s + 1) * (s + 2) * (s + 3) * (s + 4) * std::pow(x, -s - 5);
    return head.value() + em_tail(integral, f, f1, f3, f5);
}

/// psi^(3)(x) = 6 zeta(4, x).
inline double polygamma3(double x) { return 6.0 * hurwitz_zeta(4, x); }

/**
 * @brief Diagonal lattice sum  Sum_{n in Z} 1/(a^2 + (b+n)^2)
 *        = (pi/a) sinh(2 pi a) / (cosh(2 pi a) - cos(2 pi b)).
 *
 * Evaluated through E = exp(-2 pi a) so large a cannot overflow.
 */
inline double lattice_diag(double a, double b) {
    if (!(a > 0.0)) throw std::invalid_argument("lattice_diag: a > 0 required");
    const double E = std::exp(-2.0 * M_PI * a);
    const double num = 1.0 - E * E;
    const double den = 1.0 + E * E - 2.0 * E * std::cos(2.0 * M_PI * b);
    return (M_PI / a) * num / den;
}

/// sinh(x)/x with a series guard near 0; complex argument.
inline std::complex<double> ratio_sinh(std::complex<double> x) {
    if (std::abs(x) < 1e-2) {
        auto x2 = x * x;
        return 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0));
    }
    return std::sinh(x) / x;
}

/// exp(w) - 1 without cancellation at small |w|; complex argument.
inline std::complex<double> cexpm1(std::complex<double> w) {
    if (std::abs(w) < 0.5) {
        std::complex<double> term = w, sum = w;
        for (int k = 2; k <= 16; ++k) {
            term *= w / static_cast<double>(k);
            sum += term;
        }
        return sum;
    }
    return std::exp(w) - 1.0;
}

}  // namespace casimir
