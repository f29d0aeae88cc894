#include "asplab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace asplab {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

} // namespace

Nonlinearity make_tanh(double scale, double offset) {
    require(scale > 0.0, "nonlinearity: tanh scale must be > 0");
    Nonlinearity a;
    a.name = "tanh";
    a.scale = scale;
    a.offset = offset;
    a.q = 0.0;
    a.lipschitz = scale; // sup |a'| = scale at x = 0
    a.sup_abs = scale + std::abs(offset);
    a.growth_coeff = a.sup_abs;
    a.eval = [scale, offset](double x) { return scale * std::tanh(x) + offset; };
    return a;
}

Nonlinearity make_qgrowth(double scale, double q, double offset) {
    require(scale > 0.0, "nonlinearity: qgrowth scale must be > 0");
    require(q > 0.0 && q < 1.0, "nonlinearity: qgrowth exponent must lie in (0, 1)");
    Nonlinearity a;
    a.name = "qgrowth";
    a.scale = scale;
    a.offset = offset;
    a.q = q;
    // |a'(x)| = scale * q * |x| (1+x^2)^{(q-2)/2} peaks at |x| = 1/sqrt(1-q).
    const double t2 = 1.0 / (1.0 - q);
    a.lipschitz = scale * q * std::sqrt(t2) * std::pow(1.0 + t2, 0.5 * (q - 2.0));
    a.sup_abs = std::numeric_limits<double>::infinity();
    // |a(x)| <= scale |x|^q + |offset| <= (scale + |offset|)(1 + |x|^q)
    a.growth_coeff = scale + std::abs(offset);
    a.eval = [scale, q, offset](double x) {
        return scale * (std::pow(1.0 + x * x, 0.5 * q) - 1.0) + offset;
    };
    return a;
}

Kernel kernel_catalog(const std::string& key, Interval omega1, Interval omega2) {
    (void)omega2; // catalog kernels do not vary in X2; kept in the signature for generality
    const double lo = omega1.lo, len = omega1.length();
    Kernel k;
    k.name = key;
    if (key == "flat") {
        k.h = [](double, double, double) { return 1.0; };
        k.sup_abs = 1.0;
        k.sup_dx1 = 0.0;
        k.x1_independent = true;
        k.x2_independent = true;
        return k;
    }
    if (key == "cosine") {
        k.h = [lo, len](double, double x1p, double) {
            return 1.0 + 0.5 * std::cos(kPi * (x1p - lo) / len);
        };
        k.sup_abs = 1.5;
        k.sup_dx1 = 0.0;
        k.x1_independent = true;
        k.x2_independent = true;
        return k;
    }
    if (key == "separable") {
        // Vanishes at the X1 ends, so the limit solution meets the lateral Dirichlet
        // condition and no boundary layer forms there.
        k.h = [lo, len](double x1, double x1p, double) {
            const double t1 = (x1 - lo) / len;
            const double t1p = (x1p - lo) / len;
            return std::sin(kPi * t1) * (1.0 + 0.5 * std::cos(kPi * t1p)) / 1.5;
        };
        k.sup_abs = 1.0;            // sin -> 1 at t1 = 1/2, cosine factor -> 1.5/1.5 at t1' = 0
        k.sup_dx1 = kPi / len;      // |cos(pi t1)| * (pi/len) * cosine factor <= pi/len
        k.x1_independent = false;
        k.x2_independent = true;
        return k;
    }
    throw ConfigError("kernel: unknown catalog key '" + key +
                      "' (valid: flat, cosine, separable)");
}

Multiplier default_multiplier(Interval omega1) {
    const double lo = omega1.lo, len = omega1.length();
    Multiplier m;
    m.l = [lo, len](double x1) { return 1.0 + 0.5 * std::sin(kPi * (x1 - lo) / len); };
    m.sup_abs = 1.5;
    m.sup_dx1 = 0.5 * kPi / len;
    return m;
}

OperatorConstants operator_constants(const OperatorSpec& spec, const TensorGrid& grid) {
    const double w1 = grid.omega1().length();
    const double w2 = grid.omega2().length();
    const double V = grid.volume();
    OperatorConstants c;

    if (spec.variant == OperatorVariant::Zero) {
        c.r = spec.r_bounded;
        require(c.r > 2.0, "operator: integral exponent r must be > 2");
        return c;
    }
    if (spec.variant == OperatorVariant::Constant) {
        c.r = spec.r_bounded;
        require(c.r > 2.0, "operator: integral exponent r must be > 2");
        c.K = 0.0;
        c.M = std::abs(spec.constant) * std::pow(V, 1.0 / c.r);
        c.beta_min = c.M * std::pow(V, 0.5 - 1.0 / c.r);
        return c;
    }

    const Nonlinearity& a = spec.a;
    const bool bounded = std::isfinite(a.sup_abs);
    c.r = bounded ? spec.r_bounded : 2.0 / a.q;
    require(c.r > 2.0, "operator: integral exponent r must be > 2");
    const double Vr = std::pow(V, 1.0 / c.r);

    switch (spec.variant) {
        case OperatorVariant::KernelOuter: {
            c.K = a.lipschitz * spec.h.sup_abs * w1;
            c.M = bounded ? a.sup_abs * Vr
                          : a.growth_coeff * (Vr + std::pow(spec.h.sup_abs * w1, a.q));
            c.M2 = a.lipschitz * spec.h.sup_dx1 * w1;
            break;
        }
        case OperatorVariant::KernelInner: {
            c.K = a.lipschitz * spec.h.sup_abs * w1;
            c.M = bounded ? a.sup_abs * spec.h.sup_abs * w1 * Vr
                          : a.growth_coeff * spec.h.sup_abs * w1 * (1.0 + Vr);
            c.M2 = bounded ? spec.h.sup_dx1 * a.sup_abs * w1 * std::sqrt(V)
                           : spec.h.sup_dx1 * a.growth_coeff *
                                 (w1 * std::sqrt(V) + std::pow(w1, 1.5 - 0.5 * a.q) *
                                                          std::pow(w2, 0.5 * (1.0 - a.q)));
            break;
        }
        case OperatorVariant::ProjectorComposite: {
            c.K = a.lipschitz * spec.l.sup_abs; // X1-average has unit L2 -> L2 norm
            c.M = bounded ? a.sup_abs * Vr
                          : a.growth_coeff * (Vr + std::pow(spec.l.sup_abs, a.q));
            c.M2 = a.lipschitz * spec.l.sup_dx1;
            break;
        }
        default: break;
    }
    c.beta_min = c.M * std::pow(V, 0.5 - 1.0 / c.r);
    return c;
}

namespace {

// Composite trapezoid weights over the full X1 node line 0..n1+1.
std::vector<double> trapezoid_weights(const TensorGrid& g) {
    std::vector<double> w(g.n1() + 2, g.h1());
    w.front() = 0.5 * g.h1();
    w.back() = 0.5 * g.h1();
    return w;
}

GridField apply_kernel_inner(const OperatorSpec& spec, const GridField& u) {
    const TensorGrid& g = u.grid();
    const int n1 = g.n1(), n2 = g.n2();
    const auto w = trapezoid_weights(g);
    GridField out(g);

    // a(u) on the full node line, boundary included (a(0) need not vanish there).
    std::vector<double> av((n1 + 2) * n2);
    for (int k = 0; k <= n1 + 1; ++k)
        for (int j = 1; j <= n2; ++j) av[k * n2 + (j - 1)] = spec.a(u.value_or_zero(k, j));

    if (spec.h.x2_independent) {
        const double x2mid = 0.5 * (g.omega2().lo + g.omega2().hi);
        std::vector<double> H((n1 + 2));
        for (int i = 1; i <= n1; ++i) {
            for (int k = 0; k <= n1 + 1; ++k) H[k] = w[k] * spec.h.h(g.x1(i), g.x1(k), x2mid);
            for (int j = 1; j <= n2; ++j) {
                double acc = 0.0;
                for (int k = 0; k <= n1 + 1; ++k) acc += H[k] * av[k * n2 + (j - 1)];
                out.at(i, j) = acc;
            }
        }
        return out;
    }
    for (int i = 1; i <= n1; ++i) {
        for (int j = 1; j <= n2; ++j) {
            double acc = 0.0;
            for (int k = 0; k <= n1 + 1; ++k)
                acc += w[k] * spec.h.h(g.x1(i), g.x1(k), g.x2(j)) * av[k * n2 + (j - 1)];
            out.at(i, j) = acc;
        }
    }
    return out;
}

GridField apply_kernel_outer(const OperatorSpec& spec, const GridField& u) {
    const TensorGrid& g = u.grid();
    const int n1 = g.n1(), n2 = g.n2();
    const auto w = trapezoid_weights(g);
    GridField out(g);

    if (spec.h.x2_independent) {
        const double x2mid = 0.5 * (g.omega2().lo + g.omega2().hi);
        std::vector<double> H((n1 + 2));
        for (int i = 1; i <= n1; ++i) {
            for (int k = 0; k <= n1 + 1; ++k) H[k] = w[k] * spec.h.h(g.x1(i), g.x1(k), x2mid);
            for (int j = 1; j <= n2; ++j) {
                double acc = 0.0;
                for (int k = 1; k <= n1; ++k) acc += H[k] * u.at(k, j);
                out.at(i, j) = spec.a(acc);
            }
        }
        return out;
    }
    for (int i = 1; i <= n1; ++i) {
        for (int j = 1; j <= n2; ++j) {
            double acc = 0.0;
            for (int k = 1; k <= n1; ++k)
                acc += w[k] * spec.h.h(g.x1(i), g.x1(k), g.x2(j)) * u.at(k, j);
            out.at(i, j) = spec.a(acc);
        }
    }
    return out;
}

GridField apply_projector(const OperatorSpec& spec, const GridField& u) {
    const TensorGrid& g = u.grid();
    const int n1 = g.n1(), n2 = g.n2();
    const auto w = trapezoid_weights(g);
    const double w1 = g.omega1().length();
    GridField out(g);

    std::vector<double> p(n2, 0.0); // row averages P(u)(x2_j)
    for (int j = 1; j <= n2; ++j) {
        double acc = 0.0;
        for (int k = 1; k <= n1; ++k) acc += w[k] * u.at(k, j);
        p[j - 1] = acc / w1;
    }
    for (int i = 1; i <= n1; ++i) {
        const double li = spec.l.l(g.x1(i));
        for (int j = 1; j <= n2; ++j) out.at(i, j) = spec.a(li * p[j - 1]);
    }
    return out;
}

} // namespace

GridField apply_operator(const OperatorSpec& spec, const GridField& u) {
    switch (spec.variant) {
        case OperatorVariant::Zero: return GridField(u.grid());
        case OperatorVariant::Constant: {
            GridField out(u.grid());
            std::fill(out.values().begin(), out.values().end(), spec.constant);
            return out;
        }
        case OperatorVariant::KernelInner: return apply_kernel_inner(spec, u);
        case OperatorVariant::KernelOuter: return apply_kernel_outer(spec, u);
        case OperatorVariant::ProjectorComposite: return apply_projector(spec, u);
    }
    throw ConfigError("operator: unknown variant");
}

double cutoff_value(double tnorm, int n) {
    require(n >= 1, "cutoff: ramp index n must be >= 1");
    const double d = std::max(0.0, std::min(tnorm, 1.0 - tnorm));
    const double s = std::min(1.0, d * n);
    return s * s * (3.0 - 2.0 * s);
}

std::function<double(double, double)> cutoff2d(const TensorGrid& grid, int n) {
    require(n >= 1, "cutoff: ramp index n must be >= 1");
    const Interval o1 = grid.omega1(), o2 = grid.omega2();
    return [o1, o2, n](double x1, double x2) {
        const double t1 = (x1 - o1.lo) / o1.length();
        const double t2 = (x2 - o2.lo) / o2.length();
        return cutoff_value(t1, n) * cutoff_value(t2, n);
    };
}

std::function<double(double)> cutoff_x1(const TensorGrid& grid, int n) {
    require(n >= 1, "cutoff: ramp index n must be >= 1");
    const Interval o1 = grid.omega1();
    return [o1, n](double x1) { return cutoff_value((x1 - o1.lo) / o1.length(), n); };
}

GridField multiply(const GridField& u, const std::function<double(double, double)>& f) {
    const TensorGrid& g = u.grid();
    GridField out(g);
    for (int i = 1; i <= g.n1(); ++i)
        for (int j = 1; j <= g.n2(); ++j) out.at(i, j) = f(g.x1(i), g.x2(j)) * u.at(i, j);
    return out;
}

} // namespace asplab
