#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "asplab/errors.hpp"
#include "asplab/grid.hpp"
#include "oracle_helpers.hpp"

using namespace asplab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("grid geometry on the unit square") {
    TensorGrid g({0.0, 1.0}, {0.0, 1.0}, 3, 3);
    CHECK(g.h1() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g.h2() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g.size() == 9);
    CHECK(g.volume() == doctest::Approx(1.0));
    CHECK(g.x1(0) == doctest::Approx(0.0));
    CHECK(g.x1(4) == doctest::Approx(1.0));
    CHECK(g.x2(2) == doctest::Approx(0.5));
}

TEST_CASE("grid geometry on a stretched domain with one node") {
    TensorGrid g({0.0, 2.0}, {0.0, 1.0}, 1, 1);
    CHECK(g.h1() == doctest::Approx(1.0));
    CHECK(g.h2() == doctest::Approx(0.5));
    CHECK(g.size() == 1);
    CHECK(g.x1(1) == doctest::Approx(1.0));
    CHECK(g.x2(1) == doctest::Approx(0.5));
}

TEST_CASE("invalid grid parameters are rejected") {
    CHECK_THROWS_AS(TensorGrid({0.0, 1.0}, {0.0, 1.0}, 0, 3), ConfigError);
    CHECK_THROWS_AS(TensorGrid({0.0, 1.0}, {0.0, 1.0}, 3, 0), ConfigError);
    CHECK_THROWS_AS(TensorGrid({1.0, 1.0}, {0.0, 1.0}, 3, 3), ConfigError);
    CHECK_THROWS_AS(TensorGrid({0.0, 1.0}, {2.0, 1.0}, 3, 3), ConfigError);
}

TEST_CASE("flat index puts the X2 line contiguously and boundary values read as zero") {
    TensorGrid g({0.0, 1.0}, {0.0, 1.0}, 3, 4);
    CHECK(g.index(1, 1) == 0);
    CHECK(g.index(1, 2) == 1);
    CHECK(g.index(2, 1) == 4);

    GridField u(g);
    u.at(2, 3) = 7.5;
    CHECK(u.value_or_zero(2, 3) == 7.5);
    CHECK(u.value_or_zero(0, 3) == 0.0);
    CHECK(u.value_or_zero(4, 3) == 0.0);
    CHECK(u.value_or_zero(2, 0) == 0.0);
    CHECK(u.value_or_zero(2, 5) == 0.0);
}

TEST_CASE("sample evaluates the callable at interior nodes") {
    TensorGrid g({0.0, 2.0}, {-1.0, 1.0}, 3, 3);
    const GridField u = sample(g, [](double x, double y) { return 3.0 * x - y; });
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j)
            CHECK(u.at(i, j) == doctest::Approx(3.0 * g.x1(i) - g.x2(j)).epsilon(1e-15));
}

TEST_CASE("axpby combines componentwise and rejects mismatched layouts") {
    TensorGrid g({0.0, 1.0}, {0.0, 1.0}, 2, 2);
    std::mt19937_64 rng(11);
    const GridField u = oracle::random_field(g, rng, 1.0);
    const GridField w = oracle::random_field(g, rng, 1.0);
    const GridField z = axpby(2.0, u, -3.0, w);
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
            CHECK(z.at(i, j) == doctest::Approx(2.0 * u.at(i, j) - 3.0 * w.at(i, j)));

    TensorGrid other({0.0, 1.0}, {0.0, 1.0}, 3, 2);
    GridField v(other);
    CHECK_THROWS_AS(axpby(1.0, u, 1.0, v), ConfigError);
}

TEST_CASE("norms of the zero field vanish and scale one-homogeneously") {
    TensorGrid g({0.0, 1.0}, {0.0, 2.0}, 5, 4);
    GridField z(g);
    for (NormKind k : {NormKind::L2, NormKind::GradX1, NormKind::GradX2, NormKind::H1Semi,
                       NormKind::H1, NormKind::W})
        CHECK(norm(z, k) == 0.0);
    CHECK(norm(z, NormKind::Lr, 4.0) == 0.0);

    std::mt19937_64 rng(7);
    const GridField u = oracle::random_field(g, rng, 2.0);
    const GridField su = axpby(3.0, u, 0.0, u);
    for (NormKind k : {NormKind::L2, NormKind::GradX1, NormKind::GradX2, NormKind::H1Semi,
                       NormKind::H1, NormKind::W})
        CHECK(norm(su, k) == doctest::Approx(3.0 * norm(u, k)).epsilon(1e-13));
    CHECK(norm(su, NormKind::Lr, 4.0) ==
          doctest::Approx(3.0 * norm(u, NormKind::Lr, 4.0)).epsilon(1e-13));
}

TEST_CASE("composite norms satisfy their defining identities exactly") {
    TensorGrid g({0.0, 1.0}, {0.0, 1.0}, 6, 5);
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const GridField u = oracle::random_field(g, rng, 5.0);
        const double l2 = norm(u, NormKind::L2);
        const double g1 = norm(u, NormKind::GradX1);
        const double g2 = norm(u, NormKind::GradX2);
        CHECK(norm(u, NormKind::W) ==
              doctest::Approx(std::sqrt(l2 * l2 + g2 * g2)).epsilon(1e-12));
        CHECK(norm(u, NormKind::H1Semi) ==
              doctest::Approx(std::sqrt(g1 * g1 + g2 * g2)).epsilon(1e-12));
        CHECK(norm(u, NormKind::H1) ==
              doctest::Approx(std::sqrt(l2 * l2 + g1 * g1 + g2 * g2)).epsilon(1e-12));
    }
}

TEST_CASE("triangle inequality holds for every norm kind") {
    TensorGrid g({0.0, 1.0}, {0.0, 1.0}, 5, 5);
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const GridField u = oracle::random_field(g, rng, 3.0);
        const GridField w = oracle::random_field(g, rng, 3.0);
        const GridField s = axpby(1.0, u, 1.0, w);
        for (NormKind k : {NormKind::L2, NormKind::GradX1, NormKind::GradX2, NormKind::H1,
                           NormKind::W})
            CHECK(norm(s, k) <= (norm(u, k) + norm(w, k)) * (1.0 + 1e-12) + 1e-15);
        CHECK(norm(s, NormKind::Lr, 4.0) <=
              (norm(u, NormKind::Lr, 4.0) + norm(w, NormKind::Lr, 4.0)) * (1.0 + 1e-12) +
                  1e-15);
    }
}

TEST_CASE("L2 norm of the interpolated sine product converges at second order") {
    auto err_at = [](int n) {
        TensorGrid g({0.0, 1.0}, {0.0, 1.0}, n, n);
        const GridField u =
            sample(g, [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); });
        return std::abs(norm(u, NormKind::L2) - 0.5);
    };
    const double e8 = err_at(7), e16 = err_at(15);
    CHECK(e16 < 0.01);
    CHECK(e8 / e16 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("Lr norm validates its exponent and respects the sup bound") {
    TensorGrid g({0.0, 1.0}, {0.0, 1.0}, 15, 15);
    std::mt19937_64 rng(3);
    GridField u(g);
    for (double& v : u.values()) v = oracle::uniform(rng, -1.0, 1.0);
    CHECK_THROWS_AS(norm(u, NormKind::Lr, 2.0), ConfigError);
    CHECK_THROWS_AS(norm(u, NormKind::Lr, 0.0), ConfigError);
    // |interpolant| <= 1, so the L4 norm cannot exceed V^{1/4}.
    CHECK(norm(u, NormKind::Lr, 4.0) <= std::pow(g.volume(), 0.25) * (1.0 + 1e-12));

    GridField ones(g);
    for (double& v : ones.values()) v = 1.0;
    const double l4 = norm(ones, NormKind::Lr, 4.0);
    CHECK(l4 <= std::pow(g.volume(), 0.25) * (1.0 + 1e-12));
    CHECK(l4 > 0.8 * std::pow(g.volume(), 0.25)); // boundary ramp cells only shave O(h)
}

TEST_CASE("subregion bounds are validated") {
    TensorGrid g({0.0, 1.0}, {0.0, 1.0}, 4, 4);
    CHECK_NOTHROW(SubRegion(1, 4, 1, 4, g));
    CHECK_NOTHROW(SubRegion(0, 5, 0, 5, g)); // full extent including boundary lines
    CHECK_THROWS_AS(SubRegion(2, 2, 1, 4, g), ConfigError);
    CHECK_THROWS_AS(SubRegion(3, 2, 1, 4, g), ConfigError);
    CHECK_THROWS_AS(SubRegion(-1, 2, 1, 4, g), ConfigError);
    CHECK_THROWS_AS(SubRegion(1, 6, 1, 4, g), ConfigError);
    CHECK_THROWS_AS(inner_region(g, 0.0), ConfigError);
    CHECK_THROWS_AS(inner_region(g, 0.5), ConfigError);
    CHECK_THROWS_AS(inner_region(TensorGrid({0, 1}, {0, 1}, 1, 1), 0.25), ConfigError);
}

TEST_CASE("region-restricted norms integrate exactly over the covered cells") {
    TensorGrid g({0.0, 2.0}, {0.0, 1.0}, 7, 7);

    GridField ones(g);
    for (double& v : ones.values()) v = 1.0;
    const SubRegion r(2, 5, 3, 6, g);
    // All corners of the covered cells are interior nodes with value 1, so the interpolant
    // is identically 1 there and the squared L2 norm is the subrectangle area.
    const double area = (g.x1(5) - g.x1(2)) * (g.x2(6) - g.x2(3));
    const double l2r = norm(ones, NormKind::L2, 0.0, SubRegion(2, 5, 3, 6, g));
    CHECK(l2r * l2r == doctest::Approx(area).epsilon(1e-13));
    CHECK(norm(ones, NormKind::GradX1, 0.0, r) == 0.0);
    CHECK(norm(ones, NormKind::GradX2, 0.0, r) == 0.0);

    // A linear-in-x1 field has unit X1 slope and zero X2 slope inside the region.
    const GridField lin = sample(g, [](double x, double) { return x; });
    const double g1 = norm(lin, NormKind::GradX1, 0.0, r);
    CHECK(g1 * g1 == doctest::Approx(area).epsilon(1e-13));
    CHECK(norm(lin, NormKind::GradX2, 0.0, r) == 0.0);

    // Nesting: a larger region never reports a smaller norm.
    std::mt19937_64 rng(41);
    const GridField u = oracle::random_field(g, rng, 1.0);
    const double inner = norm(u, NormKind::L2, 0.0, SubRegion(3, 4, 3, 4, g));
    const double outer = norm(u, NormKind::L2, 0.0, SubRegion(2, 6, 2, 6, g));
    CHECK(inner <= outer * (1.0 + 1e-12));
    CHECK(outer <= norm(u, NormKind::L2) * (1.0 + 1e-12));
}

TEST_CASE("inner regions leave the requested margins") {
    TensorGrid g({0.0, 1.0}, {0.0, 1.0}, 7, 7);
    const SubRegion r = inner_region(g, 0.25);
    CHECK(r.i_lo == 2);
    CHECK(r.i_hi == 6);
    CHECK(r.j_lo == 2);
    CHECK(r.j_hi == 6);
    const SubRegion rx = inner_region_x1(g, 0.25);
    CHECK(rx.i_lo == 2);
    CHECK(rx.i_hi == 6);
    CHECK(rx.j_lo == 0);
    CHECK(rx.j_hi == 8); // full X2 extent
}

TEST_CASE("function quadrature reproduces closed forms") {
    TensorGrid g({0.0, 1.0}, {0.0, 1.0}, 9, 9);
    CHECK(function_lp_norm(g, [](double, double) { return 3.0; }, 4.0) ==
          doctest::Approx(3.0).epsilon(1e-14));
    // Int x^2 over the unit square is 1/3; the 2x2 Gauss rule is exact for quadratics.
    CHECK(function_lp_norm(g, [](double x, double) { return x; }, 2.0) ==
          doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));

    TensorGrid g2({0.0, 2.0}, {0.0, 3.0}, 4, 4);
    CHECK(function_lp_norm(g2, [](double, double) { return 1.0; }, 3.0) ==
          doctest::Approx(std::pow(6.0, 1.0 / 3.0)).epsilon(1e-14));
}
