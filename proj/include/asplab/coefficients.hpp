#pragma once

#include <functional>
#include <string>

#include "asplab/grid.hpp"

namespace asplab {

// Symmetric 2x2 coefficient matrix field A(x) = [[a11, a12], [a12, a22]] together with the
// declared uniform ellipticity constant lambda: A(x) xi . xi >= lambda |xi|^2 for all x in
// the closed domain. The anisotropic scaling below multiplies the blocks by (eps^2, eps, 1),
// which preserves the split ellipticity A_eps xi . xi >= lambda (eps^2 xi1^2 + xi2^2): with
// eta = (eps xi1, xi2) one has A_eps xi . xi = A eta . eta.
struct CoefficientField {
    std::string name;
    std::function<double(double, double)> a11, a12, a22;
    double lambda = 1.0;
    bool a12_zero = false;         // structural zero off-diagonal block
    bool a22_x1_independent = false; // a22 depends on x2 only (slice systems factorize)
};

// Catalog entries: "identity" (lambda 1), "constant_spd" ([[2,1],[1,2]], lambda 1, exercises
// a12 != 0), "variable_a22" (a11 = 1, a12 = 0, a22 = 1 + sin(pi x1) sin(pi x2) / 2, lambda 1/2).
// Unknown keys raise ConfigError listing the valid names.
CoefficientField coefficient_catalog(const std::string& key);

// Blocks of the scaled matrix A_eps: (eps^2 a11, eps a12, a22). eps in [0, 1]; eps = 0 is the
// degenerate matrix of the limit problem and is only meaningful on that path.
CoefficientField scale_matrix(const CoefficientField& A, double eps);

struct EllipticityCheck {
    double lambda_measured; // min over all cell Gauss points of the smaller eigenvalue of A
    bool pass;              // lambda_measured >= declared lambda (up to roundoff)
};

EllipticityCheck check_ellipticity(const CoefficientField& A, const TensorGrid& grid);

} // namespace asplab
