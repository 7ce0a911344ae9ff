#pragma once

/**
 * @brief Spacetime points, regions, and the causal-separation helpers used by
 *        the boundary and algebra checks.
 *
 * Metric signature (-,+,+,+); natural units.  The slab is Z = R^3 x [0,d]
 * with coordinates written (xbar, z), xbar = (t,x,y).
 */

#include <array>
#include <cmath>
#include <stdexcept>

namespace casimir {

struct Point4 {
    double t = 0, x = 0, y = 0, z = 0;
};

inline Point4 operator-(const Point4& a, const Point4& b) {
    return {a.t - b.t, a.x - b.x, a.y - b.y, a.z - b.z};
}

/// Minkowski interval s^2 = -dt^2 + dx^2 + dy^2 + dz^2.
inline double interval2(const Point4& a, const Point4& b) {
    Point4 d = a - b;
    return -d.t * d.t + d.x * d.x + d.y * d.y + d.z * d.z;
}

/// Plate reflection iota_z : (xbar, z) -> (xbar, -z).
inline Point4 iota_z(const Point4& p) { return {p.t, p.x, p.y, -p.z}; }

inline Point4 translate_z(const Point4& p, double s) { return {p.t, p.x, p.y, p.z + s}; }

enum class GeometryKind { HalfSpace, Slab };

struct Geometry {
    GeometryKind kind = GeometryKind::Slab;
    double d = 1.0;  ///< plate separation; meaningful for Slab only

    static Geometry half_space() { return {GeometryKind::HalfSpace, 0.0}; }
    static Geometry slab(double d) {
        if (!(d > 0)) throw std::invalid_argument("Geometry: slab width must be positive");
        return {GeometryKind::Slab, d};
    }
};

/// Axis-aligned closed box in (t,x,y,z); the support hull of a test function.
struct Box4 {
    std::array<double, 4> lo{};
    std::array<double, 4> hi{};

    Box4 reflected_z() const {
        Box4 b = *this;
        b.lo[3] = -hi[3];
        b.hi[3] = -lo[3];
        return b;
    }
    Box4 translated_z(double s) const {
        Box4 b = *this;
        b.lo[3] += s;
        b.hi[3] += s;
        return b;
    }
};

namespace detail {
/// min_{u in [a1,b1], v in [a2,b2]} |u - v|
inline double interval_min_dist(double a1, double b1, double a2, double b2) {
    return std::max({0.0, a2 - b1, a1 - b2});
}
/// max over the same ranges.
inline double interval_max_dist(double a1, double b1, double a2, double b2) {
    return std::max(b1 - a2, b2 - a1);
}
}  // namespace detail

/**
 * @brief True when every point of A is spacelike to every point of B:
 *        the largest possible |dt| stays below the smallest spatial distance.
 */
inline bool causally_disjoint(const Box4& A, const Box4& B) {
    const double max_dt = detail::interval_max_dist(A.lo[0], A.hi[0], B.lo[0], B.hi[0]);
    double d2 = 0.0;
    for (int a = 1; a < 4; ++a) {
        double m = detail::interval_min_dist(A.lo[a], A.hi[a], B.lo[a], B.hi[a]);
        d2 += m * m;
    }
    return max_dt < std::sqrt(d2);
}

/**
 * @brief Causal disjointness from every slab image of B (periodic translates
 *        z -> z + 2nd and reflected copies z -> 2nd - z).  Only finitely many
 *        images can matter; the n-range is derived from the time spread.
 */
inline bool image_causally_disjoint(const Box4& A, const Box4& B, double d) {
    const double max_dt = detail::interval_max_dist(A.lo[0], A.hi[0], B.lo[0], B.hi[0]);
    const double reach = max_dt + 1.0;  // spatial distances beyond this are safe
    const double span = std::max(std::abs(A.lo[3]) + std::abs(A.hi[3]),
                                 std::abs(B.lo[3]) + std::abs(B.hi[3]));
    const int W = static_cast<int>(std::ceil((reach + span) / (2.0 * d))) + 1;
    for (int n = -W; n <= W; ++n) {
        if (!causally_disjoint(A, B.translated_z(2 * n * d))) return false;
        if (!causally_disjoint(A, B.reflected_z().translated_z(2 * n * d))) return false;
    }
    return true;
}

}  // namespace casimir
