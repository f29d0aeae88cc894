#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "asplab/errors.hpp"

namespace asplab {

// Open interval (lo, hi), lo < hi.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double length() const { return hi - lo; }
};

// Uniform tensor grid on the product domain omega1 x omega2 with n1 x n2 *interior* nodes.
//
// Conventions used throughout:
//   h1 = |omega1| / (n1 + 1),  h2 = |omega2| / (n2 + 1)
//   node (i, j) sits at (x1(i), x2(j)); i = 0 and i = n1 + 1 are boundary columns,
//   j = 0 and j = n2 + 1 boundary rows. Interior nodes are 1 <= i <= n1, 1 <= j <= n2 and
//   are the only unknowns; homogeneous Dirichlet values live implicitly on the boundary.
//   Flat index of interior node (i, j) is (i - 1) * n2 + (j - 1): the X2-line at fixed X1
//   is contiguous, which is the layout the per-slice limit solves want.
//   Cell (ci, cj), 0 <= ci <= n1, 0 <= cj <= n2, spans [x1(ci), x1(ci+1)] x [x2(cj), x2(cj+1)].
class TensorGrid {
public:
    TensorGrid(Interval omega1, Interval omega2, int n1, int n2);

    const Interval& omega1() const { return om1_; }
    const Interval& omega2() const { return om2_; }
    int n1() const { return n1_; }
    int n2() const { return n2_; }
    double h1() const { return h1_; }
    double h2() const { return h2_; }

    int size() const { return n1_ * n2_; }
    double volume() const { return om1_.length() * om2_.length(); }

    double x1(int i) const { return om1_.lo + i * h1_; } // valid for 0..n1+1
    double x2(int j) const { return om2_.lo + j * h2_; } // valid for 0..n2+1

    int index(int i, int j) const { return (i - 1) * n2_ + (j - 1); }

    bool same_layout(const TensorGrid& other) const;

private:
    Interval om1_, om2_;
    int n1_, n2_;
    double h1_, h2_;
};

// Nodal values on the interior nodes of a grid; the piecewise-bilinear interpolant with zero
// boundary values is the function the norms below integrate.
class GridField {
public:
    explicit GridField(const TensorGrid& grid) : grid_(grid), v_(grid.size(), 0.0) {}

    const TensorGrid& grid() const { return grid_; }

    double& at(int i, int j) { return v_[grid_.index(i, j)]; }
    double at(int i, int j) const { return v_[grid_.index(i, j)]; }

    // Value at node (i, j) for 0 <= i <= n1+1, 0 <= j <= n2+1; boundary nodes give 0.
    double value_or_zero(int i, int j) const;

    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

private:
    TensorGrid grid_;
    std::vector<double> v_;
};

// Nodal sampling of a callable f(x1, x2) on the interior nodes.
GridField sample(const TensorGrid& grid, const std::function<double(double, double)>& f);

// Elementwise linear combination a*u + b*w; layouts must match.
GridField axpby(double a, const GridField& u, double b, const GridField& w);

// Closed subrectangle [x1(i_lo), x1(i_hi)] x [x2(j_lo), x2(j_hi)] given by node indices with
// 0 <= lo < hi <= n+1 per axis (0 and n+1 are the boundary lines, so a full-extent axis is
// expressible). Norms restricted to a SubRegion integrate exactly over the cells the
// subrectangle covers.
struct SubRegion {
    int i_lo, i_hi, j_lo, j_hi;

    SubRegion(int i_lo_, int i_hi_, int j_lo_, int j_hi_, const TensorGrid& grid);
};

// Inner subrectangle leaving `margin` (default 25%) of each side's length on each side.
SubRegion inner_region(const TensorGrid& grid, double margin = 0.25);

// Like inner_region but only the X1 direction is shrunk; X2 keeps full extent up to one mesh
// layer (the closest admissible stand-in for omega1' x omega2).
SubRegion inner_region_x1(const TensorGrid& grid, double margin = 0.25);

enum class NormKind {
    L2,      // ||u||_L2
    Lr,      // ||u||_Lr, r > 2 supplied by the caller
    GradX1,  // ||du/dx1||_L2
    GradX2,  // ||du/dx2||_L2
    H1Semi,  // sqrt(GradX1^2 + GradX2^2)
    H1,      // sqrt(L2^2 + H1Semi^2)
    W        // sqrt(L2^2 + GradX2^2): the cylinder energy norm
};

// All norms integrate the bilinear interpolant cellwise with a 2x2 Gauss rule, which is exact
// for the squared value and squared gradient of a bilinear function; the Lr integrand is not
// polynomial and the rule is simply the fixed quadrature of the artifact. The optional region
// restricts integration to the cells covered by the subrectangle.
double norm(const GridField& u, NormKind kind, double r = 0.0,
            const std::optional<SubRegion>& region = std::nullopt);

// Quadrature of |f|^p over the grid's cells (same 2x2 Gauss rule) for an arbitrary callable,
// returning the L^p norm. Used for cutoff functions, which do not vanish on the boundary and
// so cannot be represented as a GridField.
double function_lp_norm(const TensorGrid& grid, const std::function<double(double, double)>& f,
                        double p);

} // namespace asplab
