#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace akf {

// Scalar time coefficient on [0, T]. Representations: constant, tabulated
// values with linear interpolation, polynomial, or scale * exp(rate * t).
class Coefficient {
public:
    Coefficient() : repr_(Constant{0.0}) {}

    static Coefficient constant(double v);
    static Coefficient table(std::vector<double> t, std::vector<double> v);
    static Coefficient polynomial(std::vector<double> coeffs);  // c0 + c1 t + c2 t^2 + ...
    static Coefficient exponential(double scale, double rate);

    double operator()(double t) const;

    // min/max of the value over [0, T] scanned on a refined grid.
    std::pair<double, double> range(double T, std::size_t samples) const;
    // min of |value| over [0, T], same scan.
    double abs_floor(double T, std::size_t samples) const;

    bool has_time_derivative() const;   // closed forms only; tables interpolate
    double time_derivative(double t) const;

    bool is_constant() const { return std::holds_alternative<Constant>(repr_); }

    // Declared "separated from zero" floor; validation checks |value| >= floor.
    std::optional<double> declared_floor;

private:
    struct Constant { double v; };
    struct Table { std::vector<double> t, v; };
    struct Poly { std::vector<double> c; };
    struct Exponential { double scale, rate; };

    std::variant<Constant, Table, Poly, Exponential> repr_;
};

// Drift family a(p, t) = p * g(t) + h(t), linear in the parameter. The two
// parameter derivatives required of a drift family are closed-form here.
struct ParametricDrift {
    Coefficient g = Coefficient::constant(1.0);
    Coefficient h = Coefficient::constant(0.0);

    double value(double p, double t) const { return p * g(t) + h(t); }
    double d_param(double /*p*/, double t) const { return g(t); }
    double d2_param(double /*p*/, double /*t*/) const { return 0.0; }
};

}  // namespace akf
