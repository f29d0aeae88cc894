#pragma once

#include <vector>

#include "asplab/assembly.hpp"
#include "asplab/operators.hpp"

namespace asplab {

struct SolverConfig {
    double cg_tol = 1e-12;     // relative residual target (in ||b||)
    int cg_max = 50000;        // iteration cap before SolverError
    double picard_tol = 1e-10; // L2 change between successive iterates
    int picard_max = 200;
};

struct IterationRecord {
    int iter;             // 1-based Picard iteration
    double change;        // L2 norm of the iterate difference
    double weak_residual; // dual norm of the nonlinear weak-form residual at this iterate
    double l2;            // L2 norm of the iterate
    double lr;            // Lr norm of the iterate (operator's exponent r)
};

struct IterationHistory {
    std::vector<IterationRecord> records;
    bool converged = false;
    bool contraction_guaranteed = false; // beta > K
    double contraction_factor = 0.0;     // K / beta
};

struct PicardResult {
    GridField u;
    IterationHistory history;
};

// Jacobi-preconditioned conjugate gradients for the SPD systems assembled here. Stops when
// the true relative residual ||b - Ax|| / ||b|| reaches tol (verified against a recomputed
// residual, not just the recurrence); throws SolverError when the cap is hit. x0, when given,
// seeds the iteration (Picard warm starts).
std::vector<double> cg_solve(const LinearSystem& A, const std::vector<double>& b, double tol,
                             int max_iter, const std::vector<double>* x0 = nullptr);

// Direct solve of a symmetric tridiagonal slice system (Thomas algorithm).
std::vector<double> thomas_solve(const SliceSystem& S, const std::vector<double>& rhs);

// Fixed-point iteration u^{k+1} = solve(A_eps-form, rhs = B(u^k)) starting from u^0 = 0 for
// the full two-dimensional problem. Requires eps in (0, 1] and beta strictly above the
// operator's admissibility threshold beta_min; beta > K additionally guarantees contraction
// with factor K/beta (recorded either way). Throws SolverError if picard_max is exhausted.
PicardResult picard_full(const TensorGrid& grid, const CoefficientField& A, double eps,
                         const OperatorSpec& spec, double beta, const SolverConfig& cfg);

// Same fixed-point loop for the dimension-reduced limit problem: each iteration solves the
// n1 independent tridiagonal systems on the X2 grid lines (coefficient a22(x1_i, .)), with
// the 1D consistent mass applied to B(u^k) on each line.
PicardResult picard_limit(const TensorGrid& grid, const CoefficientField& A,
                          const OperatorSpec& spec, double beta, const SolverConfig& cfg);

// One linear solve of the eps-scaled form with right side B-independent source data (the
// cut-off comparison problems): rhs = mass * source.
GridField solve_with_source(const TensorGrid& grid, const CoefficientField& A, double eps,
                            double beta, const GridField& source, const SolverConfig& cfg);

// U = (mass + stiffness/n)^{-1} mass f, the discrete resolvent regularization of f.
GridField resolvent_apply(const TensorGrid& grid, double n, const GridField& f,
                          const SolverConfig& cfg);

} // namespace asplab
