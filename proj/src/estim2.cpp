#include "akf/estim2.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace akf {

Mme1Result mme_theta1(std::span<const double> x_nodes, const ModelSpecII& spec,
                      const TimeGrid& grid, double eps) {
    const double window = std::pow(eps, 2.0 / 3.0);
    std::size_t node = grid.ceil_index(window);
    if (node < 2)
        throw std::invalid_argument("mme_theta1: grid too coarse for the eps^(2/3) window");
    const double f0 = spec.f(0.0);
    const double t = grid.node(node);
    Mme1Result r;
    r.window = t;
    r.value = spec.theta1.clamp(x_nodes[node] / (f0 * t));
    return r;
}

double curve_F(const ModelSpecII& spec, double theta2, double t, std::size_t quad_steps) {
    if (t <= 0.0) return 0.0;
    const double h = t / static_cast<double>(quad_steps);
    double cum_a = 0.0, acc = 0.0;
    double prev_a = spec.drift.value(theta2, 0.0);
    double prev_g = spec.f(0.0);  // f * phi, phi(0) = 1
    for (std::size_t k = 1; k <= quad_steps; ++k) {
        double s = h * static_cast<double>(k);
        double cur_a = spec.drift.value(theta2, s);
        cum_a += 0.5 * h * (prev_a + cur_a);
        double cur_g = spec.f(s) * std::exp(cum_a);
        acc += 0.5 * h * (prev_g + cur_g);
        prev_a = cur_a;
        prev_g = cur_g;
    }
    return acc;
}

std::vector<double> curve_F_grid(const ModelSpecII& spec, double theta2,
                                 const TimeGrid& grid, std::size_t upto) {
    const double h = grid.dt();
    std::vector<double> out(upto + 1, 0.0);
    double cum_a = 0.0;
    double prev_a = spec.drift.value(theta2, 0.0);
    double prev_g = spec.f(0.0);
    for (std::size_t k = 1; k <= upto; ++k) {
        double s = grid.node(k);
        double cur_a = spec.drift.value(theta2, s);
        cum_a += 0.5 * h * (prev_a + cur_a);
        double cur_g = spec.f(s) * std::exp(cum_a);
        out[k] = out[k - 1] + 0.5 * h * (prev_g + cur_g);
        prev_a = cur_a;
        prev_g = cur_g;
    }
    return out;
}

double identifiability_g(const ModelSpecII& spec, double theta20, double nu, double tau,
                         const TimeGrid& grid) {
    const std::size_t tau_node = grid.index_of(tau);
    const double h = grid.dt();
    auto f0 = curve_F_grid(spec, theta20, grid, tau_node);

    auto l2gap = [&](double p) {
        auto fp = curve_F_grid(spec, p, grid, tau_node);
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 <= tau_node; ++k) {
            double d0 = fp[k] - f0[k], d1 = fp[k + 1] - f0[k + 1];
            acc += 0.5 * h * (d0 * d0 + d1 * d1);
        }
        return acc;
    };

    const double lo = spec.theta2.lo, hi = spec.theta2.hi;
    const double step = 1e-3 * (hi - lo);
    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    for (double p = lo; p <= hi + 0.5 * step; p += step) {
        double pc = std::min(p, hi);
        if (std::abs(pc - theta20) < nu) continue;
        any = true;
        best = std::min(best, l2gap(pc));
    }
    // endpoints always probed; the feasible set may reduce to them
    for (double pc : {lo, hi}) {
        if (std::abs(pc - theta20) < nu) continue;
        any = true;
        best = std::min(best, l2gap(pc));
    }
    // the infimum sits at the nearest feasible points; probe them exactly
    for (double pc : {theta20 - nu, theta20 + nu}) {
        if (pc < lo || pc > hi) continue;
        any = true;
        best = std::min(best, l2gap(pc));
    }
    if (!any) return 0.0;  // empty feasible set: condition cannot hold
    return best;
}

MdeContext MdeContext::build(const ModelSpecII& spec, double tau, const TimeGrid& grid) {
    constexpr std::size_t kScan = 256;
    MdeContext ctx;
    ctx.tau_node = grid.index_of(tau);
    ctx.candidates.resize(kScan);
    ctx.curves.resize(kScan);
    const double lo = spec.theta2.lo, hi = spec.theta2.hi;
    for (std::size_t i = 0; i < kScan; ++i) {
        ctx.candidates[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kScan - 1);
        ctx.curves[i] = curve_F_grid(spec, ctx.candidates[i], grid, ctx.tau_node);
    }
    return ctx;
}

MdeResult mde_theta2(std::span<const double> x_nodes, double theta1_star,
                     const ModelSpecII& spec, double tau, const TimeGrid& grid) {
    return mde_theta2(x_nodes, theta1_star, spec, MdeContext::build(spec, tau, grid), grid);
}

MdeResult mde_theta2(std::span<const double> x_nodes, double theta1_star,
                     const ModelSpecII& spec, const MdeContext& ctx, const TimeGrid& grid) {
    const std::size_t tau_node = ctx.tau_node;
    const double h = grid.dt();

    auto objective_curve = [&](const std::vector<double>& fp) {
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 <= tau_node; ++k) {
            double d0 = x_nodes[k] - theta1_star * fp[k];
            double d1 = x_nodes[k + 1] - theta1_star * fp[k + 1];
            acc += 0.5 * h * (d0 * d0 + d1 * d1);
        }
        return acc;
    };
    auto objective = [&](double p) { return objective_curve(curve_F_grid(spec, p, grid, tau_node)); };

    double best_val = std::numeric_limits<double>::infinity();
    double worst_val = -std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    const std::size_t n_cand = ctx.candidates.size();
    for (std::size_t i = 0; i < n_cand; ++i) {
        double v = objective_curve(ctx.curves[i]);
        worst_val = std::max(worst_val, v);
        if (v < best_val) {  // strict: ties keep the smaller parameter
            best_val = v;
            best_i = i;
        }
    }

    MdeResult res;
    if (worst_val - best_val < 1e-14) {
        res.identifiable = false;
        res.value = spec.theta2.clamp(ctx.candidates[best_i]);
        return res;
    }
    double a = ctx.candidates[best_i == 0 ? 0 : best_i - 1];
    double b = ctx.candidates[best_i + 1 >= n_cand ? n_cand - 1 : best_i + 1];
    auto g = golden_min(objective, a, b, 1e-8);
    res.value = spec.theta2.clamp(g.x);
    return res;
}

PreliminaryPair preliminary_pair(std::span<const double> x_nodes, const ModelSpecII& spec,
                                 double tau, const TimeGrid& grid, double eps) {
    auto m1 = mme_theta1(x_nodes, spec, grid, eps);
    if (!(m1.window < tau))
        throw std::invalid_argument("preliminary_pair: moment window must sit inside [0, tau]");
    auto m2 = mde_theta2(x_nodes, m1.value, spec, tau, grid);
    PreliminaryPair p;
    p.theta1 = m1.value;
    p.theta2 = m2.value;
    p.tau_eps = m1.window;
    p.tau = tau;
    p.identifiable = m2.identifiable;
    return p;
}

// ---- sensitivities ------------------------------------------------------

namespace {

double prelim_box_scale(const ModelSpecII& spec) {
    double w1 = spec.theta1.width(), w2 = spec.theta2.width();
    return w1 * w1 + w2 * w2;
}

// Exact parameter derivative of the filter recursion: differentiating
//   m_{k+1} = P_k m_k + B_k dX_k,  P_k = exp(cum_drift diff)
// gives the recursion below; gamma_dp comes from the joint variational solve,
// so the whole chain is the derivative of the computed filter to rounding.
std::vector<double> mdot2_recursion(const RiccatiTrace& ric, const CoefficientGrid& cg,
                                    const std::vector<double>& m, std::span<const double> dx) {
    const std::size_t n = ric.grid.steps;
    std::vector<double> md(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double pk = ric.step_factor(k);
        double dcum = ric.cum_drift_dp[k + 1] - ric.cum_drift_dp[k];
        double bdot = cg.f[k] * ric.gamma_dp[k] / (cg.sigma[k] * cg.sigma[k]);
        md[k + 1] = pk * (md[k] + dcum * m[k]) + bdot * dx[k];
    }
    return md;
}

}  // namespace

Model2Filter filter_sensitivities(const ModelSpecII& spec, double theta1, double theta2,
                                  std::span<const double> dx, const TimeGrid& grid) {
    Model2Filter out;
    out.ric = solve_riccati(spec, theta2, grid, /*with_derivative=*/true);
    auto cg = CoefficientGrid::sample(spec, theta2, grid);
    out.ft = kb_filter(out.ric, cg, theta1, dx);
    out.mdot1 = out.ft.phi0;
    out.mdot2 = mdot2_recursion(out.ric, cg, out.ft.m, dx);
    return out;
}

LimitSensitivities limit_sensitivities(const ModelSpecII& spec,
                                       double theta1, double theta2,
                                       double theta01, double theta02,
                                       const TimeGrid& grid) {
    auto ric = solve_riccati(spec, theta2, grid, /*with_derivative=*/true);
    const std::size_t nn = grid.n_nodes();
    const double h = grid.dt();

    LimitSensitivities ls;
    ls.y_data.resize(nn);
    ls.y_plug.resize(nn);
    ls.ydot1.resize(nn);
    ls.ydot2.resize(nn);

    // hidden limit path under the data-generating parameter
    {
        double cum = 0.0, prev = spec.drift.value(theta02, 0.0);
        ls.y_data[0] = theta01;
        for (std::size_t k = 1; k < nn; ++k) {
            double cur = spec.drift.value(theta02, grid.node(k));
            cum += 0.5 * h * (prev + cur);
            ls.y_data[k] = theta01 * std::exp(cum);
            prev = cur;
        }
    }

    std::vector<double> q(nn), qdot(nn);  // f^2 gamma / sigma^2 and its derivative
    for (std::size_t k = 0; k < nn; ++k) {
        double t = grid.node(k);
        double f = spec.f(t), s = spec.sigma(t);
        q[k] = f * f * ric.gamma[k] / (s * s);
        qdot[k] = f * f * ric.gamma_dp[k] / (s * s);
    }

    // y_plug = phi0 (theta1 + int phi0^-1 q y_data); ydot2 likewise with the
    // differentiated forcing
    std::vector<double> c1(nn, 0.0), c2(nn, 0.0);
    auto w1 = [&](std::size_t k) { return std::exp(-ric.cum_drift[k]) * q[k] * ls.y_data[k]; };
    for (std::size_t k = 1; k < nn; ++k)
        c1[k] = c1[k - 1] + 0.5 * h * (w1(k - 1) + w1(k));
    for (std::size_t k = 0; k < nn; ++k) {
        ls.ydot1[k] = ric.phi0(k);
        ls.y_plug[k] = ls.ydot1[k] * (theta1 + c1[k]);
    }
    auto w2 = [&](std::size_t k) {
        return std::exp(-ric.cum_drift[k]) *
               (ric.drift_eff_dp[k] * ls.y_plug[k] + qdot[k] * ls.y_data[k]);
    };
    for (std::size_t k = 1; k < nn; ++k)
        c2[k] = c2[k - 1] + 0.5 * h * (w2(k - 1) + w2(k));
    for (std::size_t k = 0; k < nn; ++k) ls.ydot2[k] = ls.ydot1[k] * c2[k];
    return ls;
}

FisherTrace fisher_matrix(const ModelSpecII& spec, double theta1, double theta2,
                          std::size_t tau_node, const TimeGrid& grid) {
    auto ls = limit_sensitivities(spec, theta1, theta2, theta1, theta2, grid);
    FisherTrace ft;
    ft.tau_node = tau_node;
    ft.mat.assign(grid.n_nodes(), Mat2{});
    const double h = grid.dt();
    auto weight = [&](std::size_t k) {
        double f = spec.f(grid.node(k)), s = spec.sigma(grid.node(k));
        return f * f / (s * s);
    };
    for (std::size_t k = tau_node + 1; k < grid.n_nodes(); ++k) {
        double wa = weight(k - 1), wb = weight(k);
        Mat2& m = ft.mat[k];
        const Mat2& p = ft.mat[k - 1];
        m.a11 = p.a11 + 0.5 * h * (wa * ls.ydot1[k - 1] * ls.ydot1[k - 1] + wb * ls.ydot1[k] * ls.ydot1[k]);
        m.a12 = p.a12 + 0.5 * h * (wa * ls.ydot1[k - 1] * ls.ydot2[k - 1] + wb * ls.ydot1[k] * ls.ydot2[k]);
        m.a22 = p.a22 + 0.5 * h * (wa * ls.ydot2[k - 1] * ls.ydot2[k - 1] + wb * ls.ydot2[k] * ls.ydot2[k]);
    }
    return ft;
}

OneStepTrace2D one_step_process(const ModelSpecII& spec, const PathPair& path,
                                const PreliminaryPair& prelim, double tau,
                                const TimeGrid& grid, double det_floor) {
    const std::size_t tau_node = grid.index_of(tau);
    const std::size_t n = grid.steps;
    const double dt = grid.dt();
    auto dx = path.x_increments();

    auto mf = filter_sensitivities(spec, prelim.theta1, prelim.theta2, dx, grid);
    auto ls = limit_sensitivities(spec, prelim.theta1, prelim.theta2,
                                  prelim.theta1, prelim.theta2, grid);
    auto fisher = fisher_matrix(spec, prelim.theta1, prelim.theta2, tau_node, grid);

    OneStepTrace2D tr;
    tr.start = tau_node;
    tr.fisher = fisher;
    const std::size_t len = n - tau_node + 1;
    tr.th1.assign(len, prelim.theta1);
    tr.th2.assign(len, prelim.theta2);
    tr.th1_lim.assign(len, prelim.theta1);
    tr.th2_lim.assign(len, prelim.theta2);
    tr.th1_rec.assign(len, prelim.theta1);
    tr.th2_rec.assign(len, prelim.theta2);

    std::vector<double> weight(grid.n_nodes());
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
        double f = spec.f(grid.node(k)), s = spec.sigma(grid.node(k));
        weight[k] = f / (s * s);
    }

    double sm1 = 0.0, sm2 = 0.0;   // running score with filter sensitivities
    double sy1 = 0.0, sy2 = 0.0;   // running score with limit sensitivities
    double r1 = prelim.theta1, r2 = prelim.theta2;
    bool rec_started = false;
    bool invertible_seen = false;
    // Just past tau the correction variance eps^2 tr(I^-1) is unbounded (the
    // information window is empty) and its recursion has local rate
    // ~ 1/(t - tau). The recursion starts once the correction's standard
    // deviation drops below 1% of the parameter-box diagonal; tr(I^-1) is
    // monotone decreasing, so the gate fires exactly once.
    const double box2 = prelim_box_scale(spec);

    for (std::size_t k = tau_node; k <= n; ++k) {
        if (k > tau_node) {
            std::size_t j = k - 1;  // left-endpoint increment over step j
            double innov = dx[j] - spec.f(grid.node(j)) * mf.ft.m[j] * dt;
            sm1 += weight[j] * mf.mdot1[j] * innov;
            sm2 += weight[j] * mf.mdot2[j] * innov;
            sy1 += weight[j] * ls.ydot1[j] * innov;
            sy2 += weight[j] * ls.ydot2[j] * innov;
        }
        Mat2 inv;
        if (fisher.mat[k].inverse(inv, det_floor)) {
            invertible_seen = true;
            double c1, c2;
            inv.mul(sm1, sm2, c1, c2);
            tr.th1[k - tau_node] = spec.theta1.clamp(prelim.theta1 + c1);
            tr.th2[k - tau_node] = spec.theta2.clamp(prelim.theta2 + c2);
            inv.mul(sy1, sy2, c1, c2);
            double u1 = prelim.theta1 + c1, u2 = prelim.theta2 + c2;
            tr.th1_lim[k - tau_node] = spec.theta1.clamp(u1);
            tr.th2_lim[k - tau_node] = spec.theta2.clamp(u2);
            if (!rec_started &&
                spec.eps * spec.eps * (inv.a11 + inv.a22) <= 1e-4 * box2) {
                rec_started = true;
                tr.rec_seed = k;
                r1 = u1;
                r2 = u2;
            }
        }
        tr.th1_rec[k - tau_node] = spec.theta1.clamp(r1);
        tr.th2_rec[k - tau_node] = spec.theta2.clamp(r2);

        if (rec_started && k < n) {
            // Euler step of the recurrent form, limit-sensitivity curves
            Mat2 inv_k;
            if (fisher.mat[k].inverse(inv_k, det_floor)) {
                double f = spec.f(grid.node(k)), s = spec.sigma(grid.node(k));
                Mat2 L;
                L.a11 = f * f / (s * s) * ls.ydot1[k] * ls.ydot1[k];
                L.a12 = f * f / (s * s) * ls.ydot1[k] * ls.ydot2[k];
                L.a22 = f * f / (s * s) * ls.ydot2[k] * ls.ydot2[k];
                double d1 = prelim.theta1 - r1, d2 = prelim.theta2 - r2;
                double ld1, ld2;
                L.mul(d1, d2, ld1, ld2);
                double g1, g2;
                inv_k.mul(ld1, ld2, g1, g2);
                double innov = dx[k] - f * mf.ft.m[k] * dt;
                double h1, h2;
                inv_k.mul(weight[k] * ls.ydot1[k] * innov, weight[k] * ls.ydot2[k] * innov, h1, h2);
                r1 += g1 * dt + h1;
                r2 += g2 * dt + h2;
            }
        }
    }
    tr.degenerate = !invertible_seen;
    return tr;
}

}  // namespace akf
