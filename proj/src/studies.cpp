#include "asplab/studies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "asplab/assembly.hpp"
#include "asplab/errors.hpp"

namespace asplab {
namespace {

std::string fmt(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string flag(bool b) { return b ? "1" : "0"; }

void echo_config(std::string& out, const RunConfig& cfg) {
    out += "# config:\n";
    if (cfg.raw_text.empty()) {
        out += "# | (defaults)\n";
        return;
    }
    std::istringstream in(cfg.raw_text);
    std::string line;
    while (std::getline(in, line)) out += "# | " + line + "\n";
}

// Bound values are zero for operators with M = 0 (then the solution itself must vanish).
bool within_bound(double value, double bound) {
    return bound > 0.0 ? value <= bound * (1.0 + 1e-9) : value <= 1e-12;
}

} // namespace

SweepReport epsilon_sweep(const RunConfig& cfg) {
    const TensorGrid grid = make_grid(cfg);
    const CoefficientField A = make_coefficients(cfg);
    const OperatorSpec spec = make_operator(cfg);
    const OperatorConstants oc = operator_constants(spec, grid);

    SweepReport rep;
    rep.K = oc.K;
    rep.M = oc.M;
    rep.r = oc.r;
    rep.beta_min = oc.beta_min;
    rep.beta = cfg.beta;
    rep.lambda = A.lambda;
    rep.volume = grid.volume();
    rep.n1 = cfg.n1;
    rep.n2 = cfg.n2;

    const std::optional<SubRegion> rin(inner_region(grid, cfg.interior_margin));
    const std::optional<SubRegion> rx1(inner_region_x1(grid, cfg.interior_margin));

    // Limit solution first; this also validates the admissibility of beta.
    const PicardResult lim = picard_limit(grid, A, spec, cfg.beta, cfg.solver);
    const GridField& u0 = lim.u;
    rep.limit_iters = static_cast<int>(lim.history.records.size());
    rep.limit_l2 = norm(u0, NormKind::L2);
    rep.limit_lr = norm(u0, NormKind::Lr, oc.r);
    rep.limit_gradx1 = norm(u0, NormKind::GradX1);
    rep.limit_gradx2 = norm(u0, NormKind::GradX2);
    rep.limit_w = norm(u0, NormKind::W);
    rep.limit_h1_interior = norm(u0, NormKind::H1, 0.0, rin);

    rep.poincare_x2 = grid.omega2().length() / std::numbers::pi;

    const double sigma = std::pow(rep.volume, 0.5 - 1.0 / oc.r);
    const double denom = rep.beta - oc.M * sigma; // positive: the limit solve checked it
    rep.bound_lr = oc.M / denom;
    rep.bound_l2 = oc.M * sigma / denom;
    const double c2 =
        oc.M * oc.M * std::pow(rep.volume, 1.0 - 2.0 / oc.r) / denom * (1.0 + oc.M * sigma / denom);
    rep.bound_grad = std::sqrt(c2 / rep.lambda);

    auto solve_row = [&](double eps) {
        SweepRow row;
        row.epsilon = eps;
        const PicardResult res = picard_full(grid, A, eps, spec, cfg.beta, cfg.solver);
        const GridField& u = res.u;
        row.iters = static_cast<int>(res.history.records.size());
        row.weak_residual =
            res.history.records.empty() ? 0.0 : res.history.records.back().weak_residual;
        row.l2 = norm(u, NormKind::L2);
        row.lr = norm(u, NormKind::Lr, oc.r);
        row.gradx1 = norm(u, NormKind::GradX1);
        row.gradx2 = norm(u, NormKind::GradX2);
        row.w = norm(u, NormKind::W);
        row.eps_gradx1 = eps * row.gradx1;
        row.eps_l2 = eps * row.l2;
        const GridField d = axpby(1.0, u, -1.0, u0);
        row.err_l2 = norm(d, NormKind::L2);
        row.err_gradx2 = norm(d, NormKind::GradX2);
        row.err_w = norm(d, NormKind::W);
        row.err_l2_x1int = norm(d, NormKind::L2, 0.0, rx1);
        row.err_gradx2_x1int = norm(d, NormKind::GradX2, 0.0, rx1);
        row.err_gradx1_x1int = norm(d, NormKind::GradX1, 0.0, rx1);
        row.h1_interior = norm(u, NormKind::H1, 0.0, rin);
        row.ratio_lr = rep.bound_lr > 0.0 ? row.lr / rep.bound_lr : 0.0;
        row.ratio_l2 = rep.bound_l2 > 0.0 ? row.l2 / rep.bound_l2 : 0.0;
        row.ratio_eps_gradx1 = rep.bound_grad > 0.0 ? row.eps_gradx1 / rep.bound_grad : 0.0;
        row.ratio_gradx2 = rep.bound_grad > 0.0 ? row.gradx2 / rep.bound_grad : 0.0;
        return row;
    };

    rep.rows.resize(cfg.epsilons.size());
    const int nthreads =
        std::max(1, std::min<int>(cfg.parallel, static_cast<int>(cfg.epsilons.size())));
    if (nthreads <= 1) {
        for (std::size_t k = 0; k < cfg.epsilons.size(); ++k) rep.rows[k] = solve_row(cfg.epsilons[k]);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex err_mtx;
        auto worker = [&] {
            for (;;) {
                const std::size_t k = next.fetch_add(1);
                if (k >= cfg.epsilons.size()) return;
                try {
                    rep.rows[k] = solve_row(cfg.epsilons[k]);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mtx);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    rep.bounds_pass = true;
    for (const auto& row : rep.rows) {
        rep.bounds_pass = rep.bounds_pass && within_bound(row.lr, rep.bound_lr) &&
                          within_bound(row.l2, rep.bound_l2) &&
                          within_bound(row.eps_gradx1, rep.bound_grad) &&
                          within_bound(row.gradx2, rep.bound_grad);
    }

    auto monotone = [&](auto getter) {
        std::vector<SweepRow> s = rep.rows;
        std::sort(s.begin(), s.end(),
                  [](const SweepRow& a, const SweepRow& b) { return a.epsilon > b.epsilon; });
        for (std::size_t k = 1; k < s.size(); ++k)
            if (getter(s[k]) > getter(s[k - 1]) * 1.05 + 1e-12) return false;
        return true;
    };
    rep.monotone_pass = monotone([](const SweepRow& r) { return r.err_l2; }) &&
                        monotone([](const SweepRow& r) { return r.err_gradx2; });

    if (!rep.rows.empty()) {
        const auto it = std::min_element(
            rep.rows.begin(), rep.rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.epsilon < b.epsilon; });
        rep.small_eps_l2 = it->eps_l2 < 1e-3;
    }
    return rep;
}

RateFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ConfigError("log-log fit: mismatched data sizes");
    if (x.size() < 2) throw ConfigError("log-log fit: need at least two points");
    double mx = 0, my = 0;
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0.0) || !(y[k] > 0.0))
            throw ConfigError("log-log fit: data must be strictly positive");
        lx[k] = std::log(x[k]);
        ly[k] = std::log(y[k]);
        mx += lx[k];
        my += ly[k];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
    }
    if (!(sxx > 0.0)) throw ConfigError("log-log fit: abscissae must be distinct");
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.points = static_cast<int>(x.size());
    return fit;
}

RateFit rate_fit(const std::vector<double>& eps, const std::vector<double>& err) {
    if (eps.size() != err.size()) throw ConfigError("rate fit: mismatched data sizes");
    if (eps.size() < 4)
        throw ConfigError("rate fit: need at least four epsilon values (two are dropped)");
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(eps.size());
    for (std::size_t k = 0; k < eps.size(); ++k) pairs.emplace_back(eps[k], err[k]);
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<double> x, y;
    for (std::size_t k = 2; k < pairs.size(); ++k) {
        x.push_back(pairs[k].first);
        y.push_back(pairs[k].second);
    }
    return fit_loglog(x, y);
}

void require_rate_regime(const RunConfig& cfg) {
    const CoefficientField A = make_coefficients(cfg);
    if (!A.a12_zero || !A.a22_x1_independent)
        throw ConfigError("rate: certified regime needs a12 = 0 and an X1-independent a22; "
                          "coefficients '" +
                          A.name + "' fall outside it");
    const TensorGrid grid = make_grid(cfg);
    const OperatorConstants oc = operator_constants(make_operator(cfg), grid);
    if (!(cfg.beta > oc.K && cfg.beta > oc.beta_min))
        throw ConfigError("rate: requires beta > max(K, beta_min) = max(" + fmt(oc.K) + ", " +
                          fmt(oc.beta_min) + "), got beta = " + fmt(cfg.beta));
}

InteriorReport interior_scan(const RunConfig& cfg) {
    InteriorReport rep;
    rep.sweep = epsilon_sweep(cfg);
    double g_min = std::numeric_limits<double>::infinity(), g_max = 0;
    double i_min = std::numeric_limits<double>::infinity(), i_max = 0;
    for (const auto& row : rep.sweep.rows) {
        g_min = std::min(g_min, row.gradx1);
        g_max = std::max(g_max, row.gradx1);
        i_min = std::min(i_min, row.h1_interior);
        i_max = std::max(i_max, row.h1_interior);
    }
    // An all-zero column (Zero operator) is trivially uniform: growth 1.
    auto growth = [](double lo, double hi) { return hi <= 1e-14 ? 1.0 : hi / std::max(lo, 1e-300); };
    rep.global_gradx1_growth = rep.sweep.rows.empty() ? 0.0 : growth(g_min, g_max);
    rep.interior_h1_growth = rep.sweep.rows.empty() ? 0.0 : growth(i_min, i_max);
    rep.interior_stable = rep.interior_h1_growth > 0.0 && rep.interior_h1_growth <= 5.0;
    rep.pass = rep.interior_stable &&
               rep.global_gradx1_growth * (1.0 + 1e-12) >= rep.interior_h1_growth;
    return rep;
}

TruncationReport truncation_study(const RunConfig& cfg) {
    const TensorGrid grid = make_grid(cfg);
    const CoefficientField A = make_coefficients(cfg);
    const OperatorSpec spec = make_operator(cfg);
    const OperatorConstants oc = operator_constants(spec, grid);

    const double p = 2.0 * oc.r / (oc.r - 2.0);
    const double sigma = std::pow(grid.volume(), 0.5 - 1.0 / oc.r);
    const double denom = cfg.beta - oc.M * sigma;
    // Inadmissible beta makes the first solve below throw; the bound is then never used.
    const double bound =
        denom > 0.0 ? oc.K * (oc.M / denom) / (2.0 * std::sqrt(A.lambda * cfg.beta)) : 0.0;

    std::vector<int> ns = cfg.truncation_ns;
    std::sort(ns.begin(), ns.end());

    std::vector<double> denoms(ns.size());
    for (std::size_t k = 0; k < ns.size(); ++k) {
        const auto phi = cutoff2d(grid, ns[k]);
        denoms[k] = function_lp_norm(
            grid, [&phi](double x, double y) { return phi(x, y) - 1.0; }, p);
    }

    TruncationReport rep;
    for (double eps : cfg.truncation_epsilons) {
        const GridField u = picard_full(grid, A, eps, spec, cfg.beta, cfg.solver).u;
        for (std::size_t k = 0; k < ns.size(); ++k) {
            const auto phi = cutoff2d(grid, ns[k]);
            const GridField v = multiply(u, phi);
            const GridField src = apply_operator(spec, v);
            const GridField w = solve_with_source(grid, A, eps, cfg.beta, src, cfg.solver);
            const GridField d = axpby(1.0, w, -1.0, u);
            TruncationRow row;
            row.epsilon = eps;
            row.n = ns[k];
            row.numerator = norm(d, NormKind::GradX2);
            row.denominator = denoms[k];
            row.ratio = row.denominator > 0.0 ? row.numerator / row.denominator : 0.0;
            row.bound = bound;
            rep.rows.push_back(row);
        }
    }

    rep.numerator_decays = true;
    for (double eps : cfg.truncation_epsilons) {
        double first = -1.0, last = -1.0;
        for (const auto& row : rep.rows) {
            if (row.epsilon != eps) continue;
            if (first < 0.0) first = row.numerator;
            last = row.numerator;
        }
        // Identically-zero numerators (Zero operator) already sit at the limit.
        rep.numerator_decays =
            rep.numerator_decays && (last < first || (first <= 1e-14 && last <= 1e-14));
    }
    // Uniformity in epsilon: collapse the epsilon axis first, then compare across n.
    rep.n_values = ns;
    rep.sup_ratios.assign(ns.size(), 0.0);
    for (const auto& row : rep.rows) {
        const auto it = std::find(ns.begin(), ns.end(), row.n);
        rep.sup_ratios[static_cast<std::size_t>(it - ns.begin())] =
            std::max(rep.sup_ratios[static_cast<std::size_t>(it - ns.begin())], row.ratio);
    }
    const double smax = *std::max_element(rep.sup_ratios.begin(), rep.sup_ratios.end());
    const double smin = *std::min_element(rep.sup_ratios.begin(), rep.sup_ratios.end());
    // All-zero ratios (Zero operator) are trivially uniform.
    rep.ratio_growth = smax <= 1e-14 ? 1.0 : smax / std::max(smin, 1e-300);
    rep.ratio_stable = rep.ratio_growth > 0.0 && rep.ratio_growth <= 10.0;
    return rep;
}

ResolventReport resolvent_study(const RunConfig& cfg) {
    const TensorGrid grid = make_grid(cfg);
    const double l1 = grid.omega1().length(), lo1 = grid.omega1().lo;
    const double l2 = grid.omega2().length(), lo2 = grid.omega2().lo;

    struct Datum {
        std::string name;
        std::function<double(double, double)> f;
    };
    const double pi = std::acos(-1.0);
    const std::vector<Datum> data = {
        {"eigen",
         [=](double x, double y) {
             return std::sin(pi * (x - lo1) / l1) * std::sin(pi * (y - lo2) / l2);
         }},
        {"pyramid",
         [=](double x, double y) {
             const double t1 = (x - lo1) / l1, t2 = (y - lo2) / l2;
             return std::min(std::min(t1, 1.0 - t1), std::min(t2, 1.0 - t2));
         }},
    };

    std::vector<int> ns = cfg.resolvent_ns;
    std::sort(ns.begin(), ns.end());

    ResolventReport rep;
    rep.contraction_pass = true;
    rep.envelope_pass = true;
    for (const auto& datum : data) {
        const GridField F = sample(grid, datum.f);
        const double hf = norm(F, NormKind::H1);
        const double l2f = norm(F, NormKind::L2);

        ResolventReport::PerFunction pf;
        pf.f = datum.name;
        std::vector<double> tail_n, tail_err;
        for (std::size_t k = 0; k < ns.size(); ++k) {
            const GridField U = resolvent_apply(grid, static_cast<double>(ns[k]), F, cfg.solver);
            const GridField d = axpby(1.0, U, -1.0, F);
            ResolventRow row;
            row.f = datum.name;
            row.n = ns[k];
            row.err_l2 = norm(d, NormKind::L2);
            row.qn = row.err_l2 * std::pow(static_cast<double>(ns[k]), 0.25) / hf;
            row.contraction = l2f > 0.0 ? norm(U, NormKind::L2) / l2f : 0.0;
            rep.rows.push_back(row);

            if (k == 0) pf.q_first = row.qn;
            pf.q_max = std::max(pf.q_max, row.qn);
            if (k + 3 >= ns.size()) {
                tail_n.push_back(static_cast<double>(ns[k]));
                tail_err.push_back(row.err_l2);
            }
            rep.contraction_pass = rep.contraction_pass && row.contraction <= 1.0 + 1e-10;
        }
        if (tail_n.size() >= 2) pf.tail_exponent = -fit_loglog(tail_n, tail_err).slope;
        pf.envelope_ok = pf.q_max <= 1.05 * pf.q_first;
        rep.envelope_pass = rep.envelope_pass && pf.envelope_ok;
        if (datum.name == "eigen") rep.eigen_tail_exponent = pf.tail_exponent;
        rep.summary.push_back(pf);
    }
    return rep;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot open '" + tmp + "' for writing");
        out << content;
        out.flush();
        if (!out) throw ConfigError("failed while writing '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw ConfigError("cannot move '" + tmp + "' into place at '" + path + "'");
}

namespace {

void sweep_table(std::string& out, const SweepReport& rep, const RunConfig& cfg) {
    out += "epsilon,n1,n2,beta,iters,weak_residual,l2,lr,gradx1,gradx2,w,eps_gradx1,eps_l2,"
           "err_l2,err_gradx2,err_w,err_l2_x1int,err_gradx2_x1int,err_gradx1_x1int,"
           "h1_interior,ratio_lr,ratio_l2,ratio_eps_gradx1,ratio_gradx2\n";
    const std::string coords =
        std::to_string(rep.n1) + "," + std::to_string(rep.n2) + "," + fmt(cfg.beta);
    // The limit solution is the epsilon = 0 row.
    out += "0," + coords + "," + std::to_string(rep.limit_iters) + ",0," + fmt(rep.limit_l2) +
           "," + fmt(rep.limit_lr) + "," + fmt(rep.limit_gradx1) + "," + fmt(rep.limit_gradx2) +
           "," + fmt(rep.limit_w) + ",0,0,0,0,0,0,0,0," + fmt(rep.limit_h1_interior) +
           ",0,0,0,0\n";
    for (const auto& r : rep.rows) {
        out += fmt(r.epsilon) + "," + coords + "," + std::to_string(r.iters) + "," +
               fmt(r.weak_residual) + "," + fmt(r.l2) + "," + fmt(r.lr) + "," + fmt(r.gradx1) +
               "," + fmt(r.gradx2) + "," + fmt(r.w) + "," + fmt(r.eps_gradx1) + "," +
               fmt(r.eps_l2) + "," + fmt(r.err_l2) + "," + fmt(r.err_gradx2) + "," +
               fmt(r.err_w) + "," + fmt(r.err_l2_x1int) + "," + fmt(r.err_gradx2_x1int) + "," +
               fmt(r.err_gradx1_x1int) + "," + fmt(r.h1_interior) + "," + fmt(r.ratio_lr) +
               "," + fmt(r.ratio_l2) + "," + fmt(r.ratio_eps_gradx1) + "," +
               fmt(r.ratio_gradx2) + "\n";
    }
}

void sweep_constants(std::string& out, const SweepReport& rep) {
    out += "# constants: K=" + fmt(rep.K) + " M=" + fmt(rep.M) + " r=" + fmt(rep.r) +
           " beta_min=" + fmt(rep.beta_min) + " beta=" + fmt(rep.beta) +
           " lambda=" + fmt(rep.lambda) + " volume=" + fmt(rep.volume) +
           " bound_lr=" + fmt(rep.bound_lr) + " bound_l2=" + fmt(rep.bound_l2) +
           " bound_grad=" + fmt(rep.bound_grad) + " poincare_x2=" + fmt(rep.poincare_x2) + "\n";
}

} // namespace

std::string sweep_csv(const SweepReport& rep, const RunConfig& cfg) {
    std::string out = "# asplab sweep csv v1\n";
    sweep_constants(out, rep);
    out += "# checks: bounds_pass=" + flag(rep.bounds_pass) +
           " monotone_pass=" + flag(rep.monotone_pass) +
           " small_eps_l2=" + flag(rep.small_eps_l2) + "\n";
    echo_config(out, cfg);
    sweep_table(out, rep, cfg);
    return out;
}

std::string interior_csv(const InteriorReport& rep, const RunConfig& cfg) {
    std::string out = "# asplab interior csv v1\n";
    sweep_constants(out, rep.sweep);
    out += "# growth: global_gradx1=" + fmt(rep.global_gradx1_growth) +
           " interior_h1=" + fmt(rep.interior_h1_growth) +
           " interior_stable=" + flag(rep.interior_stable) + " pass=" + flag(rep.pass) + "\n";
    echo_config(out, cfg);
    sweep_table(out, rep.sweep, cfg);
    return out;
}

std::string truncation_csv(const TruncationReport& rep, const RunConfig& cfg) {
    std::string out = "# asplab truncation csv v1\n";
    out += "# checks: ratio_stable=" + flag(rep.ratio_stable) +
           " numerator_decays=" + flag(rep.numerator_decays) +
           " ratio_growth=" + fmt(rep.ratio_growth) + "\n";
    for (std::size_t k = 0; k < rep.n_values.size(); ++k)
        out += "# sup_ratio: n=" + std::to_string(rep.n_values[k]) + " sup_over_eps=" +
               fmt(rep.sup_ratios[k]) + "\n";
    echo_config(out, cfg);
    out += "epsilon,n,n1,n2,beta,numerator,denominator,ratio,bound\n";
    const std::string coords =
        std::to_string(cfg.n1) + "," + std::to_string(cfg.n2) + "," + fmt(cfg.beta);
    for (const auto& r : rep.rows) {
        out += fmt(r.epsilon) + "," + std::to_string(r.n) + "," + coords + "," +
               fmt(r.numerator) + "," + fmt(r.denominator) + "," + fmt(r.ratio) + "," +
               fmt(r.bound) + "\n";
    }
    return out;
}

std::string resolvent_csv(const ResolventReport& rep, const RunConfig& cfg) {
    std::string out = "# asplab resolvent csv v1\n";
    out += "# checks: contraction_pass=" + flag(rep.contraction_pass) +
           " envelope_pass=" + flag(rep.envelope_pass) +
           " eigen_tail_exponent=" + fmt(rep.eigen_tail_exponent) + "\n";
    for (const auto& pf : rep.summary) {
        out += "# summary: f=" + pf.f + " q_first=" + fmt(pf.q_first) + " q_max=" + fmt(pf.q_max) +
               " tail_exponent=" + fmt(pf.tail_exponent) + " envelope_ok=" + flag(pf.envelope_ok) +
               "\n";
    }
    echo_config(out, cfg);
    out += "f,n,n1,n2,err_l2,qn,contraction\n";
    const std::string coords = std::to_string(cfg.n1) + "," + std::to_string(cfg.n2);
    for (const auto& r : rep.rows) {
        out += r.f + "," + std::to_string(r.n) + "," + coords + "," + fmt(r.err_l2) + "," +
               fmt(r.qn) + "," + fmt(r.contraction) + "\n";
    }
    return out;
}

} // namespace asplab
