#pragma once

#include <functional>
#include <string>

#include "asplab/grid.hpp"

namespace asplab {

// Pointwise scalar nonlinearity a(x) with certified constants:
//   |a(x) - a(y)| <= lipschitz * |x - y|
//   |a(x)| <= growth_coeff * (1 + |x|^q)      (q in [0,1))
//   |a(x)| <= sup_abs when bounded (sup_abs = +inf otherwise)
// Catalog:
//   "tanh":    a(x) = scale * tanh(x) + offset. lipschitz = scale, q = 0, sup_abs =
//              scale + |offset|. Saturating; the integral exponent r is then a free choice.
//   "qgrowth": a(x) = scale * ((1 + x^2)^{q/2} - 1) + offset, q in (0,1). Genuine power
//              growth; lipschitz = scale * q * g(t*) with t* = 1/sqrt(1-q) the maximiser of
//              g(t) = t (1 + t^2)^{(q-2)/2} (closed form, g <= 1 so lipschitz <= scale * q).
struct Nonlinearity {
    std::string name;
    double scale = 1.0;
    double offset = 0.0;
    double q = 0.0;
    double lipschitz = 1.0;
    double growth_coeff = 1.0;
    double sup_abs = 1.0;
    std::function<double(double)> eval;

    double operator()(double x) const { return eval(x); }
};

Nonlinearity make_tanh(double scale, double offset);
Nonlinearity make_qgrowth(double scale, double q, double offset);

// Kernel h(X1, X1', X2) with exact metadata bounds over the closed domain. All catalog
// entries are defined through normalized coordinates t = (x - lo)/length, so the bounds are
// domain-independent except for the 1/length factor in the X1 derivative.
//   "flat":      h = 1
//   "cosine":    h = 1 + cos(pi t1')/2                        (independent of X1 and X2)
//   "separable": h = sin(pi t1) (1 + cos(pi t1')/2) / 1.5     (vanishes at the X1 ends)
struct Kernel {
    std::string name;
    std::function<double(double, double, double)> h; // (x1, x1p, x2)
    double sup_abs = 1.0;
    double sup_dx1 = 0.0; // sup |dh/dX1|
    bool x1_independent = false;
    bool x2_independent = false;
};

Kernel kernel_catalog(const std::string& key, Interval omega1, Interval omega2);

// X1 multiplier for the projector variant: l(X1) = 1 + sin(pi t1)/2.
struct Multiplier {
    std::function<double(double)> l;
    double sup_abs = 1.5;
    double sup_dx1 = 0.0;
};

Multiplier default_multiplier(Interval omega1);

enum class OperatorVariant {
    KernelOuter,        // B(u)(X1,X2) = a( Int_{omega1} h(X1,X1',X2) u(X1',X2) dX1' )
    KernelInner,        // B(u)(X1,X2) = Int_{omega1} h(X1,X1',X2) a(u(X1',X2)) dX1'
    ProjectorComposite, // B(u)(X1,X2) = a( l(X1) * P(u)(X2) ), P = X1-average
    Constant,           // B(u) = c
    Zero
};

struct OperatorSpec {
    OperatorVariant variant = OperatorVariant::KernelInner;
    Nonlinearity a;
    Kernel h;
    Multiplier l;
    double constant = 0.0; // Constant variant value
    double r_bounded = 4.0; // integral exponent used when q = 0 (must be > 2)
};

// Certified constants of the discrete operator on a given grid. All X1' integrals are the
// composite trapezoid over the full node line (boundary nodes included with value 0), so
// |omega1| here is the exact interval length.
//   K:        ||B(u) - B(v)||_L2 <= K ||u - v||_L2
//   M, r:     ||B(u)||_Lr <= M (1 + ||u||_L2); r = 2/q for growing nonlinearities,
//             r = r_bounded for saturating ones
//   beta_min: M |Omega|^{1/2 - 1/r}, the admissibility threshold for the zero-order term
//   M2:       ||d/dX1 B(u)||_L2 <= M2 (1 + ||u||_L2), the X1-regularity constant
struct OperatorConstants {
    double K = 0.0;
    double M = 0.0;
    double r = 4.0;
    double beta_min = 0.0;
    double M2 = 0.0;
};

OperatorConstants operator_constants(const OperatorSpec& spec, const TensorGrid& grid);

// Applies the operator to the nodal field. Kernel and projector variants integrate over X1'
// with the composite trapezoid rule on the grid line including both boundary nodes (where the
// field is 0 but a(0) need not be).
GridField apply_operator(const OperatorSpec& spec, const GridField& u);

// C1 cubic ramp cutoff: 0 at the domain boundary, 1 at normalized distance >= 1/n from it,
// smoothstep 3s^2 - 2s^3 in between, applied per axis and multiplied.
double cutoff_value(double tnorm, int n);                       // one axis, t in [0,1]
std::function<double(double, double)> cutoff2d(const TensorGrid& grid, int n); // phi_n
std::function<double(double)> cutoff_x1(const TensorGrid& grid, int n);        // rho on omega1

// Field of nodal products (f * u) for a callable f(x1, x2) (used for B(phi_n u) and rho u).
GridField multiply(const GridField& u, const std::function<double(double, double)>& f);

} // namespace asplab
