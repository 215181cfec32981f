#include "akf/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace akf {

Coefficient Coefficient::constant(double v) {
    Coefficient c;
    c.repr_ = Constant{v};
    return c;
}

Coefficient Coefficient::table(std::vector<double> t, std::vector<double> v) {
    if (t.size() != v.size() || t.size() < 2)
        throw std::invalid_argument("coefficient table: need matching node/value arrays of size >= 2");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i]) || !std::isfinite(v[i]))
            throw std::invalid_argument("coefficient table: non-finite entry");
        if (i > 0 && !(t[i] > t[i - 1]))
            throw std::invalid_argument("coefficient table: nodes must be strictly increasing");
    }
    Coefficient c;
    c.repr_ = Table{std::move(t), std::move(v)};
    return c;
}

Coefficient Coefficient::polynomial(std::vector<double> coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("polynomial coefficient: empty");
    for (double x : coeffs)
        if (!std::isfinite(x)) throw std::invalid_argument("polynomial coefficient: non-finite entry");
    Coefficient c;
    c.repr_ = Poly{std::move(coeffs)};
    return c;
}

Coefficient Coefficient::exponential(double scale, double rate) {
    if (!std::isfinite(scale) || !std::isfinite(rate))
        throw std::invalid_argument("exponential coefficient: non-finite parameter");
    Coefficient c;
    c.repr_ = Exponential{scale, rate};
    return c;
}

double Coefficient::operator()(double t) const {
    if (const auto* c = std::get_if<Constant>(&repr_)) return c->v;
    if (const auto* tb = std::get_if<Table>(&repr_)) {
        const auto& ts = tb->t;
        const auto& vs = tb->v;
        if (t <= ts.front()) return vs.front();
        if (t >= ts.back()) return vs.back();
        auto it = std::upper_bound(ts.begin(), ts.end(), t);
        std::size_t j = static_cast<std::size_t>(it - ts.begin());
        double w = (t - ts[j - 1]) / (ts[j] - ts[j - 1]);
        return vs[j - 1] + w * (vs[j] - vs[j - 1]);
    }
    if (const auto* p = std::get_if<Poly>(&repr_)) {
        double acc = 0.0;
        for (std::size_t i = p->c.size(); i-- > 0;) acc = acc * t + p->c[i];
        return acc;
    }
    const auto& e = std::get<Exponential>(repr_);
    return e.scale * std::exp(e.rate * t);
}

std::pair<double, double> Coefficient::range(double T, std::size_t samples) const {
    double lo = (*this)(0.0), hi = lo;
    for (std::size_t k = 1; k <= samples; ++k) {
        double v = (*this)(T * static_cast<double>(k) / static_cast<double>(samples));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

double Coefficient::abs_floor(double T, std::size_t samples) const {
    double m = std::abs((*this)(0.0));
    for (std::size_t k = 1; k <= samples; ++k)
        m = std::min(m, std::abs((*this)(T * static_cast<double>(k) / static_cast<double>(samples))));
    return m;
}

bool Coefficient::has_time_derivative() const {
    return !std::holds_alternative<Table>(repr_);
}

double Coefficient::time_derivative(double t) const {
    if (std::holds_alternative<Constant>(repr_)) return 0.0;
    if (const auto* p = std::get_if<Poly>(&repr_)) {
        double acc = 0.0;
        for (std::size_t i = p->c.size(); i-- > 1;)
            acc = acc * t + static_cast<double>(i) * p->c[i];
        return acc;
    }
    if (const auto* e = std::get_if<Exponential>(&repr_)) return e->rate * e->scale * std::exp(e->rate * t);
    // tables: slope of the active segment
    const auto& tb = std::get<Table>(repr_);
    const auto& ts = tb.t;
    if (t <= ts.front() || t >= ts.back()) return 0.0;
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t j = static_cast<std::size_t>(it - ts.begin());
    return (tb.v[j] - tb.v[j - 1]) / (ts[j] - ts[j - 1]);
}

}  // namespace akf
