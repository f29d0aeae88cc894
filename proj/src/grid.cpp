#include "asplab/grid.hpp"

#include <cmath>

namespace asplab {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

// 2x2 Gauss points on the reference cell [0,1]^2 (per-axis points 1/2 +- 1/(2*sqrt(3))),
// each with weight (cell area)/4.
constexpr double kGaussLo = 0.5 - 0.28867513459481288225; // 1/2 - 1/(2*sqrt(3))
constexpr double kGaussHi = 0.5 + 0.28867513459481288225;
constexpr double kGaussPts[2] = {kGaussLo, kGaussHi};

} // namespace

TensorGrid::TensorGrid(Interval omega1, Interval omega2, int n1, int n2)
    : om1_(omega1), om2_(omega2), n1_(n1), n2_(n2) {
    require(std::isfinite(om1_.lo) && std::isfinite(om1_.hi) && om1_.lo < om1_.hi,
            "grid: omega1 must be a finite interval with lo < hi");
    require(std::isfinite(om2_.lo) && std::isfinite(om2_.hi) && om2_.lo < om2_.hi,
            "grid: omega2 must be a finite interval with lo < hi");
    require(n1_ >= 1 && n2_ >= 1, "grid: interior node counts n1, n2 must be >= 1");
    h1_ = om1_.length() / (n1_ + 1);
    h2_ = om2_.length() / (n2_ + 1);
}

bool TensorGrid::same_layout(const TensorGrid& o) const {
    return n1_ == o.n1_ && n2_ == o.n2_ && om1_.lo == o.om1_.lo && om1_.hi == o.om1_.hi &&
           om2_.lo == o.om2_.lo && om2_.hi == o.om2_.hi;
}

double GridField::value_or_zero(int i, int j) const {
    if (i <= 0 || j <= 0 || i > grid_.n1() || j > grid_.n2()) return 0.0;
    return v_[grid_.index(i, j)];
}

GridField sample(const TensorGrid& grid, const std::function<double(double, double)>& f) {
    GridField u(grid);
    for (int i = 1; i <= grid.n1(); ++i)
        for (int j = 1; j <= grid.n2(); ++j) u.at(i, j) = f(grid.x1(i), grid.x2(j));
    return u;
}

GridField axpby(double a, const GridField& u, double b, const GridField& w) {
    require(u.grid().same_layout(w.grid()), "axpby: fields live on different grids");
    GridField out(u.grid());
    const auto& uv = u.values();
    const auto& wv = w.values();
    auto& ov = out.values();
    for (std::size_t k = 0; k < ov.size(); ++k) ov[k] = a * uv[k] + b * wv[k];
    return out;
}

SubRegion::SubRegion(int i_lo_, int i_hi_, int j_lo_, int j_hi_, const TensorGrid& grid)
    : i_lo(i_lo_), i_hi(i_hi_), j_lo(j_lo_), j_hi(j_hi_) {
    require(0 <= i_lo && i_lo < i_hi && i_hi <= grid.n1() + 1 &&
            0 <= j_lo && j_lo < j_hi && j_hi <= grid.n2() + 1,
            "region: need 0 <= lo < hi <= n+1 per axis");
}

SubRegion inner_region(const TensorGrid& grid, double margin) {
    require(margin > 0.0 && margin < 0.5, "region: margin must lie in (0, 0.5)");
    auto clampRange = [&](int n) {
        int lo = std::max(1, (int)std::llround(margin * (n + 1)));
        int hi = std::min(n, (int)std::llround((1.0 - margin) * (n + 1)));
        require(lo < hi, "region: grid too coarse for the requested margin");
        return std::pair<int, int>{lo, hi};
    };
    auto [ilo, ihi] = clampRange(grid.n1());
    auto [jlo, jhi] = clampRange(grid.n2());
    return SubRegion(ilo, ihi, jlo, jhi, grid);
}

SubRegion inner_region_x1(const TensorGrid& grid, double margin) {
    require(margin > 0.0 && margin < 0.5, "region: margin must lie in (0, 0.5)");
    int lo = std::max(1, (int)std::llround(margin * (grid.n1() + 1)));
    int hi = std::min(grid.n1(), (int)std::llround((1.0 - margin) * (grid.n1() + 1)));
    require(lo < hi, "region: grid too coarse for the requested margin");
    return SubRegion(lo, hi, 0, grid.n2() + 1, grid);
}

namespace {

struct CellBounds {
    int ci_lo, ci_hi, cj_lo, cj_hi; // cell index ranges, inclusive
};

CellBounds cells_of(const TensorGrid& g, const std::optional<SubRegion>& region) {
    if (!region) return {0, g.n1(), 0, g.n2()};
    return {region->i_lo, region->i_hi - 1, region->j_lo, region->j_hi - 1};
}

// Accumulates integrals of u^2, (du/dx1)^2, (du/dx2)^2 of the bilinear interpolant over the
// requested cells. The 2x2 rule integrates each of these exactly.
struct SquareIntegrals {
    double u2 = 0.0, ux2 = 0.0, uy2 = 0.0;
};

SquareIntegrals accumulate_squares(const GridField& u, const std::optional<SubRegion>& region) {
    const TensorGrid& g = u.grid();
    const double h1 = g.h1(), h2 = g.h2();
    const double w = h1 * h2 / 4.0;
    const CellBounds cb = cells_of(g, region);
    SquareIntegrals out;
    for (int ci = cb.ci_lo; ci <= cb.ci_hi; ++ci) {
        for (int cj = cb.cj_lo; cj <= cb.cj_hi; ++cj) {
            const double v00 = u.value_or_zero(ci, cj);
            const double v10 = u.value_or_zero(ci + 1, cj);
            const double v01 = u.value_or_zero(ci, cj + 1);
            const double v11 = u.value_or_zero(ci + 1, cj + 1);
            for (double s : kGaussPts) {
                for (double t : kGaussPts) {
                    const double val = v00 * (1 - s) * (1 - t) + v10 * s * (1 - t) +
                                       v01 * (1 - s) * t + v11 * s * t;
                    const double dx = ((v10 - v00) * (1 - t) + (v11 - v01) * t) / h1;
                    const double dy = ((v01 - v00) * (1 - s) + (v11 - v10) * s) / h2;
                    out.u2 += w * val * val;
                    out.ux2 += w * dx * dx;
                    out.uy2 += w * dy * dy;
                }
            }
        }
    }
    return out;
}

double lr_norm(const GridField& u, double r, const std::optional<SubRegion>& region) {
    const TensorGrid& g = u.grid();
    const double w = g.h1() * g.h2() / 4.0;
    const CellBounds cb = cells_of(g, region);
    double acc = 0.0;
    for (int ci = cb.ci_lo; ci <= cb.ci_hi; ++ci) {
        for (int cj = cb.cj_lo; cj <= cb.cj_hi; ++cj) {
            const double v00 = u.value_or_zero(ci, cj);
            const double v10 = u.value_or_zero(ci + 1, cj);
            const double v01 = u.value_or_zero(ci, cj + 1);
            const double v11 = u.value_or_zero(ci + 1, cj + 1);
            for (double s : kGaussPts) {
                for (double t : kGaussPts) {
                    const double val = v00 * (1 - s) * (1 - t) + v10 * s * (1 - t) +
                                       v01 * (1 - s) * t + v11 * s * t;
                    acc += w * std::pow(std::abs(val), r);
                }
            }
        }
    }
    return std::pow(acc, 1.0 / r);
}

} // namespace

double norm(const GridField& u, NormKind kind, double r, const std::optional<SubRegion>& region) {
    if (kind == NormKind::Lr) {
        require(r > 2.0, "norm: Lr norm requires exponent r > 2");
        return lr_norm(u, r, region);
    }
    const SquareIntegrals s = accumulate_squares(u, region);
    switch (kind) {
        case NormKind::L2: return std::sqrt(s.u2);
        case NormKind::GradX1: return std::sqrt(s.ux2);
        case NormKind::GradX2: return std::sqrt(s.uy2);
        case NormKind::H1Semi: return std::sqrt(s.ux2 + s.uy2);
        case NormKind::H1: return std::sqrt(s.u2 + s.ux2 + s.uy2);
        case NormKind::W: return std::sqrt(s.u2 + s.uy2);
        default: throw ConfigError("norm: unknown kind");
    }
}

double function_lp_norm(const TensorGrid& grid, const std::function<double(double, double)>& f,
                        double p) {
    require(p >= 1.0, "function_lp_norm: exponent p must be >= 1");
    const double w = grid.h1() * grid.h2() / 4.0;
    double acc = 0.0;
    for (int ci = 0; ci <= grid.n1(); ++ci) {
        for (int cj = 0; cj <= grid.n2(); ++cj) {
            const double xa = grid.x1(ci), ya = grid.x2(cj);
            for (double s : kGaussPts) {
                for (double t : kGaussPts) {
                    const double fx = f(xa + s * grid.h1(), ya + t * grid.h2());
                    acc += w * std::pow(std::abs(fx), p);
                }
            }
        }
    }
    return std::pow(acc, 1.0 / p);
}

} // namespace asplab
