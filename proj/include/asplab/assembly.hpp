#pragma once

#include <vector>

#include "asplab/coefficients.hpp"
#include "asplab/grid.hpp"

namespace asplab {

// Sparse symmetric matrix over the interior nodes in CSR layout, at most nine neighbours per
// row (the 2D bilinear stencil). Rows and columns use the grid's flat interior numbering.
class LinearSystem {
public:
    LinearSystem(int n1, int n2); // builds the 9-point sparsity pattern, zero values

    int dim() const { return dim_; }
    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& cols() const { return cols_; }
    const std::vector<double>& values() const { return vals_; }

    void add(int row, int col, double v); // (row, col) must exist in the pattern
    double coeff(int row, int col) const; // 0 if outside the pattern

    void matvec(const std::vector<double>& x, std::vector<double>& y) const;
    std::vector<double> diagonal() const;

private:
    int dim_;
    std::vector<int> row_ptr_, cols_;
    std::vector<double> vals_;
};

// Galerkin matrix of the bilinear form
//   (u, v) -> Int_Omega A_eps grad u . grad v dx + beta Int_Omega u v dx
// on the bilinear element space with homogeneous Dirichlet values, A_eps the anisotropic
// scaling (eps^2 a11, eps a12, a22) of A. Element integrals use the 2x2 Gauss rule (exact for
// constant coefficients). eps = 0 assembles the degenerate X2-only form of the limit problem;
// beta >= 0.
LinearSystem assemble_system(const TensorGrid& grid, const CoefficientField& A, double eps,
                             double beta);

// Consistent mass matrix (beta = 1, no stiffness). Quadratic form equals the squared L2 norm
// of the interpolant.
LinearSystem assemble_mass(const TensorGrid& grid);

// Resolvent system mass + (1/n) * stiffness(identity coefficients); n >= 1.
LinearSystem assemble_resolvent(const TensorGrid& grid, double n);

// Symmetric tridiagonal system on one X2 grid line: 1D stiffness with coefficient
// a22(x1_i, .) plus beta times the 1D consistent mass, linear elements, 2-point Gauss.
struct SliceSystem {
    std::vector<double> diag; // n2 entries
    std::vector<double> off;  // n2 - 1 entries, symmetric off-diagonal
};

SliceSystem assemble_limit_slice(const TensorGrid& grid, const CoefficientField& A, double beta,
                                 int i);

// 1D consistent mass action on one slice's nodal values (used for limit-problem right sides):
// returns M1 * b where M1 is the n2 x n2 tridiagonal mass with diag 2h2/3 and off h2/6.
std::vector<double> slice_mass_apply(const TensorGrid& grid, const std::vector<double>& b);

// Load vector M * f for a nodal field (consistent mass times values, interior rows).
std::vector<double> project_rhs(const TensorGrid& grid, const GridField& f);

} // namespace asplab
