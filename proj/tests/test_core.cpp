#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "akf/model.hpp"
#include "akf/numerics.hpp"
#include "akf/oracle.hpp"
#include "akf/sde.hpp"
#include "akf/stats.hpp"

using namespace akf;

namespace {

ModelSpecI basic_spec(double eps = 0.1) {
    ModelSpecI s;
    s.f = Coefficient::constant(1.0);
    s.sigma = Coefficient::constant(1.0);
    s.a = Coefficient::constant(0.0);
    s.b = Coefficient::constant(1.0);
    s.eps = eps;
    s.theta = Interval{-2.0, 2.0};
    s.theta_true = 1.0;
    return s;
}

}  // namespace

TEST_CASE("coefficients evaluate and report ranges") {
    auto c = Coefficient::polynomial({1.0, 2.0, -0.5});
    CHECK(c(0.0) == doctest::Approx(1.0));
    CHECK(c(2.0) == doctest::Approx(1.0 + 4.0 - 2.0));
    CHECK(c.time_derivative(2.0) == doctest::Approx(2.0 - 2.0));

    auto e = Coefficient::exponential(2.0, -1.0);
    CHECK(e(1.0) == doctest::Approx(2.0 * std::exp(-1.0)));

    auto t = Coefficient::table({0.0, 0.5, 1.0}, {1.0, 3.0, 2.0});
    CHECK(t(0.25) == doctest::Approx(2.0));
    CHECK(t(0.75) == doctest::Approx(2.5));
    // bound scan covers a dense set of points
    auto [lo, hi] = t.range(1.0, 10000);
    CHECK(lo == doctest::Approx(1.0));
    CHECK(hi == doctest::Approx(3.0));

    CHECK_THROWS(Coefficient::table({0.0, 0.0}, {1.0, 2.0}));   // nodes not increasing
    CHECK_THROWS(Coefficient::table({0.0, 1.0}, {1.0}));        // ragged
}

TEST_CASE("validate_model accepts constants and names violations") {
    TimeGrid grid(1.0, 64);
    auto rep = validate_model(basic_spec(), grid);
    CHECK(rep.ok());
    CHECK(rep.verified.at("f_floor") == doctest::Approx(1.0));

    auto bad = basic_spec();
    bad.sigma = Coefficient::table({0.0, 0.5, 1.0}, {1.0, 0.0, 1.0});
    auto rep2 = validate_model(bad, grid);
    REQUIRE_FALSE(rep2.ok());
    CHECK(rep2.violations.front() == "sigma not separated from 0");

    ModelSpecII two;
    two.f = Coefficient::constant(1.0);
    two.sigma = Coefficient::constant(1.0);
    two.b = Coefficient::constant(1.0);
    two.theta1 = Interval{0.0, 2.0};  // left edge at zero is rejected
    two.theta2 = Interval{0.1, 1.0};
    two.eps = 0.1;
    auto rep3 = validate_model(two, grid);
    REQUIRE_FALSE(rep3.ok());
    bool found = false;
    for (const auto& v : rep3.violations) found = found || v == "alpha1 > 0 required";
    CHECK(found);
}

TEST_CASE("limit_system solves the noiseless pair to high order") {
    TimeGrid grid(1.0, 512);

    ModelSpecII two;
    two.f = Coefficient::constant(1.0);
    two.sigma = Coefficient::constant(1.0);
    two.b = Coefficient::constant(1.0);
    two.drift.g = Coefficient::constant(1.0);
    two.theta1 = Interval{0.5, 2.0};
    two.theta2 = Interval{0.1, 1.0};
    auto ls = limit_system(two, 1.0, 0.5, grid);
    for (std::size_t k = 0; k < grid.n_nodes(); k += 64) {
        double t = grid.node(k);
        CHECK(ls.y[k] == doctest::Approx(std::exp(0.5 * t)).epsilon(1e-10));
        CHECK(ls.x[k] == doctest::Approx(2.0 * (std::exp(0.5 * t) - 1.0)).epsilon(1e-10));
    }

    // zero drift: y stays put, x integrates f
    auto one = basic_spec();
    one.a = Coefficient::constant(0.0);
    auto ls1 = limit_system(one, 0.7, grid);
    CHECK(ls1.y.back() == doctest::Approx(0.7));
    CHECK(ls1.x.back() == doctest::Approx(0.7 * grid.horizon));

    ModelSpecIII three;
    three.theta = Interval{0.5, 2.0};
    auto ls3 = limit_system(three, 1.0, 0.7, grid);
    CHECK(ls3.x.back() == doctest::Approx(0.7 * (std::exp(1.0) - 1.0)).epsilon(1e-10));

    // x equals the independent quadrature of f * y
    std::vector<double> fy(grid.n_nodes());
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) fy[k] = std::exp(0.5 * grid.node(k));
    double quad = simpson(fy, grid.dt(), 0, grid.steps);
    CHECK(ls.x.back() / 1.0 == doctest::Approx(2.0 * (std::exp(0.5) - 1.0)).epsilon(1e-8));
    CHECK(quad == doctest::Approx(2.0 * (std::exp(0.5) - 1.0)).epsilon(1e-8));
}

TEST_CASE("simulation is reproducible and hits deterministic special cases") {
    TimeGrid grid(1.0, 4096);
    SeedPolicy seeds{12345};

    auto spec = basic_spec(0.3);
    auto p1 = simulate_pair(spec, grid, seeds, 3);
    auto p2 = simulate_pair(spec, grid, seeds, 3);
    CHECK(p1.x == p2.x);  // bit-identical
    CHECK(p1.dv == p2.dv);

    // deterministic hidden equation when b = 0
    auto det = basic_spec(0.5);
    det.a = Coefficient::constant(0.5);
    det.b = Coefficient::constant(0.0);
    auto pd = simulate_pair(det, grid, seeds, 1);
    CHECK(pd.y.back() == doctest::Approx(std::exp(0.5)).epsilon(5e-4));

    // noiseless integrator
    auto clean = basic_spec(1.0);
    clean.eps = 1e-300;
    clean.theta_true = 0.8;
    auto pc = simulate_pair(clean, grid, seeds, 1);
    CHECK(pc.x.back() == doctest::Approx(0.8).epsilon(1e-9));

    // stability guard
    auto stiff = basic_spec();
    stiff.a = Coefficient::constant(1e5);
    CHECK_THROWS(simulate_pair(stiff, grid, seeds, 0));
}

TEST_CASE("second moment of X_T matches the moment-equation oracle") {
    // moment equations for the linear pair, solved independently here:
    //   mY' = a mY;  pY' = 2 a pY + (eps b)^2
    //   cXY' = f pY + a cXY;  pX' = 2 f cXY + (eps sigma)^2
    const double a = 0.3, f = 1.0, b = 0.8, sigma = 1.0, eps = 0.5;
    TimeGrid grid(1.0, 1024);
    std::vector<double> state = {1.0, 0.0, 0.0, 0.0};  // mY, pY, cXY, pX
    rk4_integrate(0.0, grid.dt(), grid.steps, state,
                  [&](double, const std::vector<double>& s, std::vector<double>& d) {
                      d[0] = a * s[0];
                      d[1] = 2.0 * a * s[1] + eps * eps * b * b;
                      d[2] = f * s[1] + a * s[2];
                      d[3] = 2.0 * f * s[2] + eps * eps * sigma * sigma;
                  },
                  nullptr);
    const double target_var = state[3];

    ModelSpecI spec = basic_spec(eps);
    spec.a = Coefficient::constant(a);
    spec.b = Coefficient::constant(b);
    SeedPolicy seeds{777};
    const std::size_t m = 10000;
    std::vector<double> xt(m);
    for (std::size_t i = 0; i < m; ++i) xt[i] = simulate_pair(spec, grid, seeds, i).x.back();
    double v = variance(xt);
    double se = target_var * std::sqrt(2.0 / static_cast<double>(m));
    CHECK(std::abs(v - target_var) <= 3.0 * se + 0.01 * target_var);

    // weak order: the mean of X_T tracks the noiseless path
    auto ls = limit_system(spec, spec.theta_true, grid);
    double mean_se = std::sqrt(target_var / static_cast<double>(m));
    CHECK(std::abs(mean(xt) - ls.x.back()) <= 3.0 * mean_se + 5e-3);
}

TEST_CASE("ito_sum telescopes and satisfies the isometry") {
    TimeGrid grid(1.0, 512);
    SeedPolicy seeds{2024};
    auto spec = basic_spec(0.4);
    auto p = simulate_pair(spec, grid, seeds, 0);
    auto dx = p.x_increments();

    std::vector<double> ones(grid.n_nodes(), 1.0), zeros(grid.n_nodes(), 0.0);
    CHECK(ito_sum(ones, dx) == doctest::Approx(p.x.back() - p.x.front()).epsilon(1e-12));
    CHECK(ito_sum(zeros, dx) == 0.0);
    CHECK_THROWS(ito_sum(std::vector<double>(7, 1.0), dx));

    // E (int h dW)^2 = int h^2 ds, target by quadrature
    std::vector<double> h(grid.n_nodes());
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) h[k] = std::cos(3.0 * grid.node(k));
    double target_int = 0.0;
    {
        std::vector<double> h2(grid.n_nodes());
        for (std::size_t k = 0; k < grid.n_nodes(); ++k) h2[k] = h[k] * h[k];
        target_int = simpson(h2, grid.dt(), 0, grid.steps);
    }
    const std::size_t m = 10000;
    std::vector<double> sq(m);
    for (std::size_t i = 0; i < m; ++i) {
        auto pi = simulate_pair(spec, grid, seeds, i);
        double s = ito_sum(h, pi.dw);
        sq[i] = s * s;
    }
    double se = target_int * std::sqrt(2.0 / static_cast<double>(m));
    CHECK(std::abs(mean(sq) - target_int) <= 3.0 * se + 1e-3);
}

TEST_CASE("noise lanes are decoupled and replicate streams uncorrelated") {
    TimeGrid grid(1.0, 2048);
    SeedPolicy seeds{99};
    ModelSpecIII spec;
    spec.theta = Interval{0.5, 2.0};
    spec.eps = 0.1;

    auto pa = simulate_pair(spec, grid, seeds, 5);
    auto pb = simulate_pair(spec, grid, seeds, 5, 1.25);  // forced start, same noise
    CHECK(pa.dw == pb.dw);
    CHECK(pa.dv == pb.dv);
    CHECK(pa.y0 != pb.y0);

    // within-replicate independence of the two driving noises
    double c = covariance(pa.dw, pa.dv) /
               std::sqrt(variance(pa.dw) * variance(pa.dv));
    CHECK(std::abs(c) < 3.0 / std::sqrt(static_cast<double>(grid.steps)) + 0.05);

    // cross-replicate independence on a long probe
    std::vector<double> w0, w1;
    for (std::size_t rep = 0; rep < 50; ++rep) {
        auto q0 = simulate_pair(spec, grid, seeds, 2 * rep);
        auto q1 = simulate_pair(spec, grid, seeds, 2 * rep + 1);
        w0.insert(w0.end(), q0.dw.begin(), q0.dw.end());
        w1.insert(w1.end(), q1.dw.begin(), q1.dw.end());
    }
    double cc = covariance(w0, w1) / std::sqrt(variance(w0) * variance(w1));
    CHECK(std::abs(cc) < 3.0 / std::sqrt(static_cast<double>(w0.size())));
}

TEST_CASE("discrete conditioning oracle behaves on degenerate inputs") {
    TimeGrid grid(1.0, 1024);
    SeedPolicy seeds{5150};

    // prior moments are returned before any observation arrives
    ModelSpecIII spec;
    spec.theta = Interval{0.5, 2.0};
    spec.d2 = 2.25;
    spec.eps = 0.05;
    auto p = simulate_pair(spec, grid, seeds, 0);
    auto cg = CoefficientGrid::sample(spec, spec.theta_true, grid);
    auto res = discrete_kalman(cg, grid, spec.eps, 0.0, spec.d2, p.x_increments());
    CHECK(res.mean[0] == 0.0);
    CHECK(res.var[0] == doctest::Approx(2.25));

    // no state noise: variance collapses and the mean locks onto the path
    ModelSpecI det = basic_spec(0.02);
    det.a = Coefficient::constant(0.4);
    det.b = Coefficient::constant(0.0);
    det.theta_true = 0.9;
    auto pd = simulate_pair(det, grid, seeds, 1);
    auto cgd = CoefficientGrid::sample(det, grid);
    auto resd = discrete_kalman(cgd, grid, det.eps, 0.0, 4.0, pd.x_increments());
    CHECK(resd.var.back() < 4.0 / 50.0);
    CHECK(std::abs(resd.mean.back() - pd.y.back()) < 0.05);
}

TEST_CASE("oracle mean beats any constant predictor") {
    TimeGrid grid(1.0, 512);
    SeedPolicy seeds{31337};
    ModelSpecIII spec;
    spec.theta = Interval{0.5, 2.0};
    spec.eps = 0.2;
    auto cg = CoefficientGrid::sample(spec, spec.theta_true, grid);

    const std::size_t m = 500;
    std::vector<double> yT(m), est(m);
    for (std::size_t i = 0; i < m; ++i) {
        auto p = simulate_pair(spec, grid, seeds, i);
        yT[i] = p.y.back();
        est[i] = discrete_kalman(cg, grid, spec.eps, 0.0, spec.d2, p.x_increments()).mean.back();
    }
    double best_const = mean(yT);
    double mse_oracle = 0.0, mse_const = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mse_oracle += (est[i] - yT[i]) * (est[i] - yT[i]);
        mse_const += (best_const - yT[i]) * (best_const - yT[i]);
    }
    CHECK(mse_oracle < mse_const);
}
