#include "asplab/coefficients.hpp"

#include <cmath>
#include <numbers>

namespace asplab {

namespace {

std::function<double(double, double)> constant(double c) {
    return [c](double, double) { return c; };
}

constexpr double kGaussOff = 0.28867513459481288225; // 1/(2*sqrt(3))

} // namespace

CoefficientField coefficient_catalog(const std::string& key) {
    CoefficientField A;
    A.name = key;
    if (key == "identity") {
        A.a11 = constant(1.0);
        A.a12 = constant(0.0);
        A.a22 = constant(1.0);
        A.lambda = 1.0;
        A.a12_zero = true;
        A.a22_x1_independent = true;
        return A;
    }
    if (key == "constant_spd") {
        A.a11 = constant(2.0);
        A.a12 = constant(1.0);
        A.a22 = constant(2.0);
        A.lambda = 1.0; // eigenvalues of [[2,1],[1,2]] are 1 and 3
        A.a12_zero = false;
        A.a22_x1_independent = true;
        return A;
    }
    if (key == "variable_a22") {
        A.a11 = constant(1.0);
        A.a12 = constant(0.0);
        A.a22 = [](double x1, double x2) {
            return 1.0 + 0.5 * std::sin(std::numbers::pi * x1) * std::sin(std::numbers::pi * x2);
        };
        A.lambda = 0.5; // min eigenvalue = min(1, a22) and a22 >= 1/2 everywhere
        A.a12_zero = true;
        A.a22_x1_independent = false;
        return A;
    }
    throw ConfigError("coefficients: unknown catalog key '" + key +
                      "' (valid: identity, constant_spd, variable_a22)");
}

CoefficientField scale_matrix(const CoefficientField& A, double eps) {
    if (!(eps >= 0.0 && eps <= 1.0))
        throw ConfigError("scale_matrix: eps must lie in [0, 1], got " + std::to_string(eps));
    CoefficientField S = A;
    S.name = A.name + "@eps";
    const double e2 = eps * eps;
    auto a11 = A.a11;
    auto a12 = A.a12;
    S.a11 = [a11, e2](double x, double y) { return e2 * a11(x, y); };
    S.a12 = [a12, eps](double x, double y) { return eps * a12(x, y); };
    // a22 untouched; lambda of the unscaled matrix keeps governing the split bound.
    return S;
}

EllipticityCheck check_ellipticity(const CoefficientField& A, const TensorGrid& grid) {
    double lo = std::numeric_limits<double>::infinity();
    for (int ci = 0; ci <= grid.n1(); ++ci) {
        for (int cj = 0; cj <= grid.n2(); ++cj) {
            for (double s : {0.5 - kGaussOff, 0.5 + kGaussOff}) {
                for (double t : {0.5 - kGaussOff, 0.5 + kGaussOff}) {
                    const double x = grid.x1(ci) + s * grid.h1();
                    const double y = grid.x2(cj) + t * grid.h2();
                    const double a = A.a11(x, y), b = A.a12(x, y), d = A.a22(x, y);
                    const double disc = std::sqrt((a - d) * (a - d) + 4.0 * b * b);
                    lo = std::min(lo, 0.5 * ((a + d) - disc));
                }
            }
        }
    }
    const double tol = 1e-12 * std::max(1.0, std::abs(A.lambda));
    return EllipticityCheck{lo, lo >= A.lambda - tol};
}

} // namespace asplab
