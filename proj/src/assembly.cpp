#include "asplab/assembly.hpp"

#include <algorithm>
#include <cmath>

namespace asplab {

namespace {

constexpr double kGaussOff = 0.28867513459481288225; // 1/(2*sqrt(3))
constexpr double kGaussPts[2] = {0.5 - kGaussOff, 0.5 + kGaussOff};

// Local corner order within a cell: m = 0..3 maps to offsets (0,0), (1,0), (0,1), (1,1).
constexpr int kDi[4] = {0, 1, 0, 1};
constexpr int kDj[4] = {0, 0, 1, 1};

} // namespace

LinearSystem::LinearSystem(int n1, int n2) : dim_(n1 * n2) {
    if (n1 < 1 || n2 < 1) throw ConfigError("system: node counts must be >= 1");
    row_ptr_.assign(dim_ + 1, 0);
    auto index = [n2](int i, int j) { return (i - 1) * n2 + (j - 1); };
    for (int i = 1; i <= n1; ++i) {
        for (int j = 1; j <= n2; ++j) {
            int cnt = 0;
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    const int ii = i + di, jj = j + dj;
                    if (ii >= 1 && ii <= n1 && jj >= 1 && jj <= n2) ++cnt;
                }
            row_ptr_[index(i, j) + 1] = cnt;
        }
    }
    for (int r = 0; r < dim_; ++r) row_ptr_[r + 1] += row_ptr_[r];
    cols_.resize(row_ptr_[dim_]);
    vals_.assign(row_ptr_[dim_], 0.0);
    for (int i = 1; i <= n1; ++i) {
        for (int j = 1; j <= n2; ++j) {
            int pos = row_ptr_[index(i, j)];
            // di-major order gives ascending column indices under the flat numbering
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    const int ii = i + di, jj = j + dj;
                    if (ii >= 1 && ii <= n1 && jj >= 1 && jj <= n2) cols_[pos++] = index(ii, jj);
                }
        }
    }
}

void LinearSystem::add(int row, int col, double v) {
    const auto b = cols_.begin() + row_ptr_[row];
    const auto e = cols_.begin() + row_ptr_[row + 1];
    const auto it = std::lower_bound(b, e, col);
    if (it == e || *it != col) throw ConfigError("system: entry outside the stencil pattern");
    vals_[it - cols_.begin()] += v;
}

double LinearSystem::coeff(int row, int col) const {
    const auto b = cols_.begin() + row_ptr_[row];
    const auto e = cols_.begin() + row_ptr_[row + 1];
    const auto it = std::lower_bound(b, e, col);
    if (it == e || *it != col) return 0.0;
    return vals_[it - cols_.begin()];
}

void LinearSystem::matvec(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(dim_, 0.0);
    for (int r = 0; r < dim_; ++r) {
        double acc = 0.0;
        for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) acc += vals_[p] * x[cols_[p]];
        y[r] = acc;
    }
}

std::vector<double> LinearSystem::diagonal() const {
    std::vector<double> d(dim_);
    for (int r = 0; r < dim_; ++r) d[r] = coeff(r, r);
    return d;
}

namespace {

// Assembles beta * mass + the stiffness of the given (already scaled) blocks.
LinearSystem assemble_blocks(const TensorGrid& grid,
                             const std::function<double(double, double)>& b11,
                             const std::function<double(double, double)>& b12,
                             const std::function<double(double, double)>& b22, double beta) {
    const int n1 = grid.n1(), n2 = grid.n2();
    const double h1 = grid.h1(), h2 = grid.h2();
    const double w = h1 * h2 / 4.0;
    LinearSystem sys(n1, n2);

    double elem[4][4];
    for (int ci = 0; ci <= n1; ++ci) {
        for (int cj = 0; cj <= n2; ++cj) {
            for (auto& row : elem) std::fill(std::begin(row), std::end(row), 0.0);
            const double xa = grid.x1(ci), ya = grid.x2(cj);
            for (double s : kGaussPts) {
                for (double t : kGaussPts) {
                    const double x = xa + s * h1, y = ya + t * h2;
                    const double c11 = b11(x, y), c12 = b12(x, y), c22 = b22(x, y);
                    // reference gradients and values of the four corner basis functions
                    const double phi[4] = {(1 - s) * (1 - t), s * (1 - t), (1 - s) * t, s * t};
                    const double dx[4] = {-(1 - t) / h1, (1 - t) / h1, -t / h1, t / h1};
                    const double dy[4] = {-(1 - s) / h2, -s / h2, (1 - s) / h2, s / h2};
                    for (int m = 0; m < 4; ++m) {
                        for (int n = m; n < 4; ++n) {
                            const double v =
                                w * (c11 * dx[m] * dx[n] + c12 * (dx[m] * dy[n] + dy[m] * dx[n]) +
                                     c22 * dy[m] * dy[n] + beta * phi[m] * phi[n]);
                            elem[m][n] += v;
                            if (n != m) elem[n][m] += v;
                        }
                    }
                }
            }
            for (int m = 0; m < 4; ++m) {
                const int im = ci + kDi[m], jm = cj + kDj[m];
                if (im < 1 || im > n1 || jm < 1 || jm > n2) continue;
                for (int n = 0; n < 4; ++n) {
                    const int in = ci + kDi[n], jn = cj + kDj[n];
                    if (in < 1 || in > n1 || jn < 1 || jn > n2) continue;
                    sys.add(grid.index(im, jm), grid.index(in, jn), elem[m][n]);
                }
            }
        }
    }
    return sys;
}

} // namespace

LinearSystem assemble_system(const TensorGrid& grid, const CoefficientField& A, double eps,
                             double beta) {
    if (!(eps >= 0.0 && eps <= 1.0))
        throw ConfigError("assemble: eps must lie in [0, 1] (0 only on the limit path)");
    if (!(beta >= 0.0)) throw ConfigError("assemble: beta must be >= 0");
    const CoefficientField S = scale_matrix(A, eps);
    return assemble_blocks(grid, S.a11, S.a12, S.a22, beta);
}

LinearSystem assemble_mass(const TensorGrid& grid) {
    auto zero = [](double, double) { return 0.0; };
    return assemble_blocks(grid, zero, zero, zero, 1.0);
}

LinearSystem assemble_resolvent(const TensorGrid& grid, double n) {
    if (!(n >= 1.0)) throw ConfigError("resolvent: index n must be >= 1");
    const double inv = 1.0 / n;
    auto diag = [inv](double, double) { return inv; };
    auto zero = [](double, double) { return 0.0; };
    return assemble_blocks(grid, diag, zero, diag, 1.0);
}

SliceSystem assemble_limit_slice(const TensorGrid& grid, const CoefficientField& A, double beta,
                                 int i) {
    if (i < 1 || i > grid.n1()) throw ConfigError("slice: X1 index out of range");
    if (!(beta >= 0.0)) throw ConfigError("slice: beta must be >= 0");
    const int n2 = grid.n2();
    const double h2 = grid.h2();
    const double x1 = grid.x1(i);
    SliceSystem s;
    s.diag.assign(n2, 0.0);
    s.off.assign(n2 > 1 ? n2 - 1 : 0, 0.0);
    for (int cj = 0; cj <= n2; ++cj) {
        // element [x2(cj), x2(cj+1)], local nodes cj and cj+1
        double k00 = 0.0, k01 = 0.0, k11 = 0.0;
        for (double t : kGaussPts) {
            const double a22 = A.a22(x1, grid.x2(cj) + t * h2);
            const double wq = 0.5 * h2;
            const double d = 1.0 / h2;
            k00 += wq * (a22 * d * d + beta * (1 - t) * (1 - t));
            k01 += wq * (-a22 * d * d + beta * (1 - t) * t);
            k11 += wq * (a22 * d * d + beta * t * t);
        }
        const int lo = cj, hi = cj + 1;
        if (lo >= 1 && lo <= n2) s.diag[lo - 1] += k00;
        if (hi >= 1 && hi <= n2) s.diag[hi - 1] += k11;
        if (lo >= 1 && hi <= n2) s.off[lo - 1] += k01;
    }
    return s;
}

std::vector<double> slice_mass_apply(const TensorGrid& grid, const std::vector<double>& b) {
    const int n2 = grid.n2();
    if ((int)b.size() != n2) throw ConfigError("slice mass: value count must equal n2");
    const double h2 = grid.h2();
    std::vector<double> y(n2, 0.0);
    for (int j = 0; j < n2; ++j) {
        double acc = (2.0 * h2 / 3.0) * b[j];
        if (j > 0) acc += (h2 / 6.0) * b[j - 1];
        if (j + 1 < n2) acc += (h2 / 6.0) * b[j + 1];
        y[j] = acc;
    }
    return y;
}

std::vector<double> project_rhs(const TensorGrid& grid, const GridField& f) {
    if (!grid.same_layout(f.grid())) throw ConfigError("project_rhs: field grid mismatch");
    const int n1 = grid.n1(), n2 = grid.n2();
    const double h1 = grid.h1(), h2 = grid.h2();
    std::vector<double> load(grid.size(), 0.0);
    for (int ci = 0; ci <= n1; ++ci) {
        for (int cj = 0; cj <= n2; ++cj) {
            double fv[4];
            for (int m = 0; m < 4; ++m) fv[m] = f.value_or_zero(ci + kDi[m], cj + kDj[m]);
            for (int m = 0; m < 4; ++m) {
                const int im = ci + kDi[m], jm = cj + kDj[m];
                if (im < 1 || im > n1 || jm < 1 || jm > n2) continue;
                double acc = 0.0;
                for (int n = 0; n < 4; ++n) {
                    // tensor closed form of the consistent mass: (h/3 or h/6) per axis
                    const double mx = (kDi[m] == kDi[n]) ? h1 / 3.0 : h1 / 6.0;
                    const double my = (kDj[m] == kDj[n]) ? h2 / 3.0 : h2 / 6.0;
                    acc += mx * my * fv[n];
                }
                load[grid.index(im, jm)] += acc;
            }
        }
    }
    return load;
}

} // namespace asplab
