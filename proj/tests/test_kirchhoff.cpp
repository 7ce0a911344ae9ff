#include "catch_amalgamated.hpp"

#include <casimir/kirchhoff.hpp>

#include <cmath>

using namespace casimir;

namespace {

/// Direct 3D quadrature of the Kirchhoff integral, no spherical reduction.
double retarded_direct(const TestFunction& f, const Point4& x) {
    AdaptiveOptions o;
    o.rel_tol = 1e-9;
    o.abs_tol = 1e-15;
    auto inner_y = [&](double y1, double y2) {
        return adaptive_integrate(
                   [&](double y3) {
                       const double R = std::sqrt((x.x - y1) * (x.x - y1) +
                                                  (x.y - y2) * (x.y - y2) +
                                                  (x.z - y3) * (x.z - y3));
                       if (R == 0.0) return 0.0;
                       return f.bt.value(x.t - R) * f.bx.value(y1) * f.by.value(y2) *
                              f.bz.value(y3) / (4.0 * M_PI * R);
                   },
                   f.bz.lo(), f.bz.hi(), o)
            .value;
    };
    auto q = adaptive_integrate(
        [&](double y1) {
            return adaptive_integrate([&](double y2) { return inner_y(y1, y2); }, f.by.lo(),
                                      f.by.hi(), o)
                .value;
        },
        f.bx.lo(), f.bx.hi(), o);
    return f.amplitude * q.value;
}

}  // namespace

TEST_CASE("retarded solution matches a direct 3D quadrature") {
    auto f = make_bump(Point4{0, 0, 0, 0}, {0.6, 1.0, 1.0, 1.0}, 1.3);
    const Point4 x{2.0, 0.3, -0.2, 0.4};
    const double reduced = kirchhoff_apply(Side::Retarded, f, x, 1e-9);
    const double direct = retarded_direct(f, x);
    REQUIRE(reduced == Catch::Approx(direct).epsilon(1e-5));
    REQUIRE(std::abs(reduced) > 1e-6);  // the point genuinely sees the source
}

TEST_CASE("advanced solution is the time mirror of the retarded one") {
    auto f = make_bump(Point4{0.4, 0, 0, 0}, {0.6, 1.0, 1.0, 1.0}, 1.0);
    auto frev = f;
    frev.bt.center = -f.bt.center;
    const Point4 x{-2.0, 0.3, -0.2, 0.4};
    const Point4 xrev{2.0, 0.3, -0.2, 0.4};
    const double adv = kirchhoff_apply(Side::Advanced, f, x, 1e-9);
    const double ret = kirchhoff_apply(Side::Retarded, frev, xrev, 1e-9);
    REQUIRE(adv == Catch::Approx(ret).epsilon(1e-9));
}

TEST_CASE("causal support: no signal before, after, or outside the cone") {
    auto f = make_bump(Point4{0, 0, 0, 0}, {0.5, 1.0, 1.0, 1.0}, 1.0);
    // strictly before the source: retarded vanishes
    REQUIRE(kirchhoff_apply(Side::Retarded, f, Point4{-3.0, 0, 0, 0}) == 0.0);
    // strictly after: advanced vanishes
    REQUIRE(kirchhoff_apply(Side::Advanced, f, Point4{3.0, 0, 0, 0}) == 0.0);
    // spacelike-far point: both vanish
    REQUIRE(kirchhoff_causal(f, Point4{0.2, 8.0, 0, 0}) == 0.0);
}

TEST_CASE("retarded solution is a Green solution: box u = f") {
    auto f = make_bump(Point4{0, 0, 0, 0}, {0.6, 1.2, 1.2, 1.2}, 1.0);
    auto u = [&](const Point4& p) { return kirchhoff_apply(Side::Retarded, f, p, 1e-10); };
    const double h = 1.0 / 64.0;
    for (const Point4& p : {Point4{0.1, 0.2, -0.1, 0.3}, Point4{0.25, -0.3, 0.2, 0.0}}) {
        const double lhs = box_fd(u, p, h);
        REQUIRE(lhs == Catch::Approx(f.value(p)).margin(2e-2 * f.amplitude));
    }
}

TEST_CASE("causal solution is homogeneous away from the source") {
    auto f = make_bump(Point4{0, 0, 0, 0}, {0.6, 1.2, 1.2, 1.2}, 1.0);
    auto u = [&](const Point4& p) { return kirchhoff_causal(f, p, 1e-10); };
    const double h = 1.0 / 64.0;
    const Point4 p{2.2, 0.3, -0.2, 0.4};  // inside the cone, outside the support
    REQUIRE(std::abs(u(p)) > 1e-6);       // nontrivial there
    REQUIRE(box_fd(u, p, h) == Catch::Approx(0.0).margin(5e-3 * f.amplitude));
}

TEST_CASE("pairing E: antisymmetry, null cases, and time orientation") {
    auto f = make_bump(Point4{0, 0, 0, 0.2}, {0.5, 1.2, 1.2, 1.2}, 1.0);
    auto g = make_bump(Point4{1.2, 0.1, 0, 0.15}, {0.5, 1.2, 1.2, 1.2}, 0.9);
    auto Efg = minkowski_E(f, g);
    auto Egf = minkowski_E(g, f);
    // g is entirely later than f, so E(g, f) < 0 and E(f, g) > 0
    REQUIRE(Egf.value < 0.0);
    REQUIRE(Efg.value > 0.0);
    REQUIRE(Efg.value == Catch::Approx(-Egf.value).epsilon(1e-6));
    REQUIRE(Efg.err < 1e-6 * std::abs(Efg.value));

    // E(f, f) = 0: the time correlation is even
    auto Eff = minkowski_E(f, f);
    REQUIRE(std::abs(Eff.value) <= 1e-13 * std::abs(Efg.value));

    // spacelike-separated supports: exactly zero
    auto far = make_bump(Point4{0, 9.0, 0, 0}, {0.5, 1.2, 1.2, 1.2}, 1.0);
    REQUIRE(minkowski_E(f, far).value == 0.0);
}

TEST_CASE("pairing E equals twice the imaginary part of the vacuum smear") {
    auto f = make_bump(Point4{0, 0, 0, 0.2}, {0.35, 0.35, 0.35, 0.35}, 1.0);
    auto g = make_bump(Point4{0.9, 0.1, 0, 0.15}, {0.35, 0.35, 0.35, 0.35}, 0.8);
    auto E = minkowski_E(f, g);
    auto w = smear2(vacuum_kernel(), f, g);
    REQUIRE(2.0 * w.value.imag() == Catch::Approx(E.value).epsilon(1e-4));
}
