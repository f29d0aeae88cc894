#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "asplab/assembly.hpp"
#include "asplab/coefficients.hpp"
#include "asplab/errors.hpp"
#include "asplab/grid.hpp"
#include "oracle_helpers.hpp"

using namespace asplab;

namespace {

Eigen::MatrixXd oracle_scaled(const TensorGrid& g, const CoefficientField& A, double eps,
                              double beta) {
    const CoefficientField s = scale_matrix(A, eps);
    return oracle::dense_form(g, s.a11, s.a12, s.a22, beta);
}

double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double scale = std::max(1e-300, a.cwiseAbs().maxCoeff());
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

double quadratic_form(const LinearSystem& s, const std::vector<double>& v) {
    std::vector<double> y(v.size());
    s.matvec(v, y);
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) acc += v[i] * y[i];
    return acc;
}

// Independent 1D oracle for one X2 grid line: 2-point Gauss per cell over global hats.
void slice_oracle(const TensorGrid& g, const CoefficientField& A, double beta, int i,
                  Eigen::MatrixXd& T) {
    const int n2 = g.n2();
    const double gw = 0.5 / std::sqrt(3.0);
    T = Eigen::MatrixXd::Zero(n2, n2);
    for (int cj = 0; cj <= n2; ++cj) {
        const double ym = 0.5 * (g.x2(cj) + g.x2(cj + 1));
        for (int gy = 0; gy < 2; ++gy) {
            const double y = ym + (gy == 0 ? -gw : gw) * g.h2();
            const double c = A.a22(g.x1(i), y);
            for (int p = 1; p <= n2; ++p) {
                const oracle::Hat1 hp{g.x2(p), g.h2()};
                for (int q = 1; q <= n2; ++q) {
                    const oracle::Hat1 hq{g.x2(q), g.h2()};
                    T(p - 1, q - 1) += 0.5 * g.h2() *
                                       (c * hp.deriv(y) * hq.deriv(y) +
                                        beta * hp.value(y) * hq.value(y));
                }
            }
        }
    }
}

} // namespace

TEST_CASE("single-unknown systems match hand-computed entries") {
    TensorGrid g({0.0, 1.0}, {0.0, 1.0}, 1, 1); // one interior node, h = 1/2
    const CoefficientField id = coefficient_catalog("identity");

    // 1D ingredients on h = 1/2: stiffness 2/h = 4, mass 2h/3 = 1/3. The 2D tensor entry is
    // K*M + M*K = 8/3 and the mass entry M*M = 1/9.
    CHECK(assemble_system(g, id, 1.0, 0.0).coeff(0, 0) ==
          doctest::Approx(8.0 / 3.0).epsilon(1e-14));
    CHECK(assemble_system(g, id, 1.0, 9.0).coeff(0, 0) ==
          doctest::Approx(11.0 / 3.0).epsilon(1e-14));
    CHECK(assemble_mass(g).coeff(0, 0) == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
    CHECK(assemble_resolvent(g, 1.0).coeff(0, 0) ==
          doctest::Approx(1.0 / 9.0 + 8.0 / 3.0).epsilon(1e-14));
    // Very large n leaves only the mass.
    CHECK(std::abs(assemble_resolvent(g, 1e9).coeff(0, 0) - 1.0 / 9.0) <= 1e-8);

    CHECK(assemble_system(g, id, 1.0, 0.0).dim() == 1);
    CHECK(LinearSystem(2, 3).dim() == 6);
}

TEST_CASE("mass quadratic form equals the squared L2 norm of the interpolant") {
    TensorGrid g({0.0, 2.0}, {-1.0, 3.0}, 5, 4);
    const LinearSystem m = assemble_mass(g);
    std::mt19937_64 rng(11);
    for (int s = 0; s < 10; ++s) {
        const GridField u = oracle::random_field(g, rng, 3.0);
        const double qf = quadratic_form(m, u.values());
        const double l2 = norm(u, NormKind::L2);
        CHECK(qf == doctest::Approx(l2 * l2).epsilon(1e-12));
    }
}

TEST_CASE("limit slices carry the 1D a22-stiffness plus beta times the mass") {
    const CoefficientField id = coefficient_catalog("identity");

    TensorGrid tiny({0.0, 1.0}, {0.0, 1.0}, 1, 1);
    const SliceSystem s0 = assemble_limit_slice(tiny, id, 0.0, 1);
    REQUIRE(s0.diag.size() == 1);
    CHECK(s0.off.empty());
    CHECK(s0.diag[0] == doctest::Approx(4.0).epsilon(1e-14)); // 2/h2
    CHECK(assemble_limit_slice(tiny, id, 6.0, 1).diag[0] ==
          doctest::Approx(6.0).epsilon(1e-14)); // 4 + 6 * (2 h2 / 3)

    TensorGrid g({0.0, 1.0}, {0.0, 1.0}, 3, 4);
    const double h2 = g.h2(), beta = 2.5;
    const SliceSystem s = assemble_limit_slice(g, id, beta, 2);
    REQUIRE(s.diag.size() == 4);
    REQUIRE(s.off.size() == 3);
    for (double d : s.diag) CHECK(d == doctest::Approx(2.0 / h2 + beta * 2.0 * h2 / 3.0));
    for (double o : s.off) CHECK(o == doctest::Approx(-1.0 / h2 + beta * h2 / 6.0));

    // Variable a22: compare against the independent per-line Gauss oracle, for every line.
    const CoefficientField var = coefficient_catalog("variable_a22");
    for (int i = 1; i <= g.n1(); ++i) {
        const SliceSystem si = assemble_limit_slice(g, var, 1.25, i);
        Eigen::MatrixXd T;
        slice_oracle(g, var, 1.25, i, T);
        for (int j = 0; j < g.n2(); ++j)
            CHECK(si.diag[j] == doctest::Approx(T(j, j)).epsilon(1e-13));
        for (int j = 0; j + 1 < g.n2(); ++j) {
            CHECK(si.off[j] == doctest::Approx(T(j, j + 1)).epsilon(1e-13));
            CHECK(T(j + 1, j) == doctest::Approx(T(j, j + 1)).epsilon(1e-13));
        }
        // Nothing beyond the tridiagonal band.
        for (int p = 0; p < g.n2(); ++p)
            for (int q = p + 2; q < g.n2(); ++q) CHECK(T(p, q) == doctest::Approx(0.0));
    }
    // a22 varies in x1, so different lines get different systems.
    CHECK(assemble_limit_slice(g, var, 0.0, 1).diag[0] !=
          assemble_limit_slice(g, var, 0.0, 2).diag[0]);
}

TEST_CASE("slice mass action is the consistent tridiagonal mass") {
    TensorGrid g({0.0, 1.0}, {0.0, 1.0}, 3, 5);
    const double h2 = g.h2();

    std::vector<double> ones(5, 1.0);
    const std::vector<double> mo = slice_mass_apply(g, ones);
    REQUIRE(mo.size() == 5);
    CHECK(mo.front() == doctest::Approx(5.0 * h2 / 6.0).epsilon(1e-14));
    CHECK(mo.back() == doctest::Approx(5.0 * h2 / 6.0).epsilon(1e-14));
    for (int j = 1; j < 4; ++j) CHECK(mo[j] == doctest::Approx(h2).epsilon(1e-14));

    std::mt19937_64 rng(5);
    std::vector<double> b(5);
    for (double& v : b) v = oracle::uniform(rng, -2.0, 2.0);
    const std::vector<double> mb = slice_mass_apply(g, b);
    for (int j = 0; j < 5; ++j) {
        double expect = 2.0 * h2 / 3.0 * b[j];
        if (j > 0) expect += h2 / 6.0 * b[j - 1];
        if (j < 4) expect += h2 / 6.0 * b[j + 1];
        CHECK(mb[j] == doctest::Approx(expect).epsilon(1e-14));
    }

    std::vector<double> wrong(4, 1.0);
    CHECK_THROWS_AS(slice_mass_apply(g, wrong), ConfigError);
}

TEST_CASE("load vector is the consistent mass applied to the nodal values") {
    TensorGrid g({0.0, 1.0}, {0.0, 1.0}, 5, 4);
    GridField one(g);
    for (double& v : one.values()) v = 1.0;
    const std::vector<double> rhs = project_rhs(g, one);

    // Tensor row sums of the 1D consistent mass: h at middle nodes, 5h/6 next to the boundary.
    const auto rowsum = [](int i, int n, double h) {
        return (i == 1 || i == n) ? 5.0 * h / 6.0 : h;
    };
    for (int i = 1; i <= g.n1(); ++i)
        for (int j = 1; j <= g.n2(); ++j)
            CHECK(rhs[g.index(i, j)] ==
                  doctest::Approx(rowsum(i, g.n1(), g.h1()) * rowsum(j, g.n2(), g.h2()))
                      .epsilon(1e-13));

    const std::vector<double> zero = project_rhs(g, GridField(g));
    for (double v : zero) CHECK(v == 0.0);

    std::mt19937_64 rng(17);
    const GridField u = oracle::random_field(g, rng, 2.0);
    const GridField v = oracle::random_field(g, rng, 2.0);
    const std::vector<double> combo = project_rhs(g, axpby(2.0, u, 3.0, v));
    const std::vector<double> pu = project_rhs(g, u), pv = project_rhs(g, v);
    for (std::size_t k = 0; k < combo.size(); ++k)
        CHECK(combo[k] == doctest::Approx(2.0 * pu[k] + 3.0 * pv[k]).epsilon(1e-12));

    // Same operator as the assembled mass matrix.
    const LinearSystem m = assemble_mass(g);
    std::vector<double> mv(m.dim());
    m.matvec(u.values(), mv);
    for (std::size_t k = 0; k < mv.size(); ++k)
        CHECK(pu[k] == doctest::Approx(mv[k]).epsilon(1e-13));
}

TEST_CASE("assembled matrices are symmetric positive definite") {
    TensorGrid g({0.0, 1.0}, {0.0, 1.0}, 4, 3);
    for (const char* name : {"identity", "constant_spd", "variable_a22"}) {
        const CoefficientField A = coefficient_catalog(name);
        for (double eps : {1.0, 0.25, 0.0}) {
            for (double beta : {0.0, 2.0}) {
                const Eigen::MatrixXd d = oracle::dense_of(assemble_system(g, A, eps, beta));
                CHECK(rel_diff(d, d.transpose()) <= 1e-13);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
                CHECK(es.eigenvalues().minCoeff() > 0.0);
            }
        }
    }
}

TEST_CASE("sparse assembly agrees with the dense global-basis oracle") {
    const std::vector<TensorGrid> grids = {
        TensorGrid({0.0, 1.0}, {0.0, 1.0}, 1, 1), TensorGrid({0.0, 1.0}, {0.0, 1.0}, 2, 2),
        TensorGrid({0.0, 1.0}, {0.0, 1.0}, 3, 2), TensorGrid({0.0, 1.0}, {0.0, 1.0}, 4, 3),
        TensorGrid({0.0, 2.0}, {-1.0, 3.0}, 3, 3)};
    for (const TensorGrid& g : grids) {
        for (const char* name : {"identity", "constant_spd", "variable_a22"}) {
            const CoefficientField A = coefficient_catalog(name);
            for (double eps : {1.0, 0.5, 0.0}) {
                for (double beta : {0.0, 2.0}) {
                    const Eigen::MatrixXd sparse =
                        oracle::dense_of(assemble_system(g, A, eps, beta));
                    const Eigen::MatrixXd dense = oracle_scaled(g, A, eps, beta);
                    CHECK(rel_diff(sparse, dense) <= 1e-12);
                }
            }
        }
    }
}

TEST_CASE("quadratic form dominates the anisotropic gradient seminorms") {
    TensorGrid g({0.0, 1.0}, {0.0, 1.0}, 6, 5);
    std::mt19937_64 rng(23);
    for (const char* name : {"identity", "constant_spd", "variable_a22"}) {
        const CoefficientField A = coefficient_catalog(name);
        for (double eps : {1.0, 0.5, 0.1, 0.0}) {
            const LinearSystem s = assemble_system(g, A, eps, 0.0);
            for (int k = 0; k < 10; ++k) {
                const GridField u = oracle::random_field(g, rng, 2.0);
                const double g1 = norm(u, NormKind::GradX1);
                const double g2 = norm(u, NormKind::GradX2);
                const double lower = A.lambda * (eps * eps * g1 * g1 + g2 * g2);
                CHECK(quadratic_form(s, u.values()) >= lower * (1.0 - 1e-10));
            }
        }
    }
}

TEST_CASE("degenerate form factorizes as X1-mass tensor slice system") {
    CoefficientField A;
    A.name = "a22_profile";
    A.a11 = [](double, double) { return 1.0; };
    A.a12 = [](double, double) { return 0.0; };
    A.a22 = [](double, double x2) { return 1.3 + 0.4 * std::sin(1.5707963267948966 * x2); };
    A.lambda = 0.9;
    A.a12_zero = true;
    A.a22_x1_independent = true;

    TensorGrid g({0.0, 1.0}, {0.0, 2.0}, 4, 3);
    const double beta = 1.7;
    const int n1 = g.n1(), n2 = g.n2();

    // All slices coincide when a22 does not depend on x1.
    const SliceSystem t1 = assemble_limit_slice(g, A, beta, 1);
    for (int i = 2; i <= n1; ++i) {
        const SliceSystem ti = assemble_limit_slice(g, A, beta, i);
        for (int j = 0; j < n2; ++j)
            CHECK(ti.diag[j] == doctest::Approx(t1.diag[j]).epsilon(1e-15));
        for (int j = 0; j + 1 < n2; ++j)
            CHECK(ti.off[j] == doctest::Approx(t1.off[j]).epsilon(1e-15));
    }

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n2, n2);
    for (int j = 0; j < n2; ++j) T(j, j) = t1.diag[j];
    for (int j = 0; j + 1 < n2; ++j) T(j, j + 1) = T(j + 1, j) = t1.off[j];

    Eigen::MatrixXd m1 = Eigen::MatrixXd::Zero(n1, n1);
    for (int i = 0; i < n1; ++i) m1(i, i) = 2.0 * g.h1() / 3.0;
    for (int i = 0; i + 1 < n1; ++i) m1(i, i + 1) = m1(i + 1, i) = g.h1() / 6.0;

    Eigen::MatrixXd kron = Eigen::MatrixXd::Zero(n1 * n2, n1 * n2);
    for (int i = 0; i < n1; ++i)
        for (int ip = 0; ip < n1; ++ip)
            for (int j = 0; j < n2; ++j)
                for (int jp = 0; jp < n2; ++jp)
                    kron(i * n2 + j, ip * n2 + jp) = m1(i, ip) * T(j, jp);

    CHECK(rel_diff(oracle::dense_of(assemble_system(g, A, 0.0, beta)), kron) <= 1e-12);
}

TEST_CASE("stencil pattern guards reads and writes") {
    TensorGrid g({0.0, 1.0}, {0.0, 1.0}, 3, 3);
    LinearSystem s(3, 3);
    // Nodes (1,1) and (3,3) are not stencil neighbours.
    const int a = g.index(1, 1), b = g.index(3, 3);
    CHECK(s.coeff(a, b) == 0.0);
    CHECK_THROWS_AS(s.add(a, b, 1.0), ConfigError);
    s.add(a, a, 2.5);
    CHECK(s.coeff(a, a) == 2.5);

    const LinearSystem sys = assemble_system(g, coefficient_catalog("variable_a22"), 0.7, 1.2);
    const Eigen::MatrixXd d = oracle::dense_of(sys);
    std::mt19937_64 rng(29);
    std::vector<double> x(sys.dim());
    for (double& v : x) v = oracle::uniform(rng, -1.0, 1.0);
    std::vector<double> y(sys.dim());
    sys.matvec(x, y);
    const Eigen::VectorXd dy = d * oracle::to_eigen(x);
    for (int k = 0; k < sys.dim(); ++k) CHECK(y[k] == doctest::Approx(dy(k)).epsilon(1e-13));
}

TEST_CASE("assembly validates its inputs") {
    TensorGrid g({0.0, 1.0}, {0.0, 1.0}, 3, 3);
    const CoefficientField id = coefficient_catalog("identity");
    CHECK_THROWS_AS(LinearSystem(0, 3), ConfigError);
    CHECK_THROWS_AS(assemble_system(g, id, -0.1, 1.0), ConfigError);
    CHECK_THROWS_AS(assemble_system(g, id, 1.0001, 1.0), ConfigError);
    CHECK_THROWS_AS(assemble_system(g, id, 0.5, -1.0), ConfigError);
    CHECK_THROWS_AS(assemble_resolvent(g, 0.5), ConfigError);
    CHECK_THROWS_AS(assemble_limit_slice(g, id, -1.0, 1), ConfigError);
    CHECK_THROWS_AS(assemble_limit_slice(g, id, 1.0, 0), ConfigError);
    CHECK_THROWS_AS(assemble_limit_slice(g, id, 1.0, 4), ConfigError);
    TensorGrid g2({0.0, 1.0}, {0.0, 1.0}, 4, 2);
    CHECK_THROWS_AS(project_rhs(g, GridField(g2)), ConfigError);
}
