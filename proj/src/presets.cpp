#include "caputo/presets.hpp"

#include <cmath>

namespace caputo {

namespace {

double scalar_param(const ParamMap& p, const std::string& key, double fallback,
                    bool required = false) {
    auto it = p.find(key);
    if (it == p.end()) {
        if (required)
            throw std::invalid_argument("preset: missing required parameter '" + key + "'");
        return fallback;
    }
    if (it->second.size() != 1)
        throw std::invalid_argument("preset: parameter '" + key + "' must be scalar");
    return it->second[0];
}

Vec vec_param(const ParamMap& p, const std::string& key, const Vec& fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

}  // namespace

VectorField make_field(const std::string& name, const ParamMap& params) {
    if (name == "zero") {
        const std::size_t d = static_cast<std::size_t>(scalar_param(params, "dim", 1.0));
        return VectorField(
            d, VectorField::AutoFn([d](const Vec&) { return Vec(d, 0.0); }),
            scalar_param(params, "L", 1.0), "zero");
    }
    if (name == "constant") {
        Vec c = vec_param(params, "c", Vec{1.0});
        return VectorField(
            c.size(), VectorField::AutoFn([c](const Vec&) { return c; }),
            scalar_param(params, "L", 1.0), "constant");
    }
    if (name == "linear") {
        const double lambda = scalar_param(params, "lambda", 1.0);
        const double L = scalar_param(params, "L", std::max(std::abs(lambda), 1e-12));
        const std::size_t d = static_cast<std::size_t>(scalar_param(params, "dim", 1.0));
        return VectorField(
            d,
            VectorField::AutoFn([lambda](const Vec& x) {
                Vec v(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) v[i] = lambda * x[i];
                return v;
            }),
            L, "linear");
    }
    if (name == "logistic") {
        // x(1-x) per coordinate; default L = 1 is valid on [0,1].
        const double L = scalar_param(params, "L", 1.0);
        return VectorField(1,
                           VectorField::AutoFn([](const Vec& x) {
                               return Vec{x[0] * (1.0 - x[0])};
                           }),
                           L, "logistic");
    }
    if (name == "linear_forced") {
        const double A = scalar_param(params, "A", 1.0);
        const double omega = scalar_param(params, "omega", 1.0);
        return VectorField(1,
                           VectorField::TimedFn([A, omega](double t, const Vec& x) {
                               return Vec{-x[0] + A * std::sin(omega * t)};
                           }),
                           scalar_param(params, "L", 1.0), "linear_forced");
    }
    throw std::invalid_argument("unknown field preset '" + name + "'");
}

TimedField make_timed_field(const std::string& name, const ParamMap& params) {
    return TimedField(make_field(name, params),
                      scalar_param(params, "offset", 0.0));
}

GridFunction make_input(const std::string& name, const ParamMap& params,
                        const UniformGrid& grid) {
    if (name == "constant") {
        Vec x0 = vec_param(params, "x0", Vec{1.0});
        return GridFunction(grid, std::vector<Vec>(grid.nodes(), x0));
    }
    if (name == "polynomial") {
        Vec coeffs = vec_param(params, "coeffs", Vec{1.0});
        if (coeffs.empty())
            throw std::invalid_argument("preset: polynomial needs coefficients");
        return GridFunction::sample(grid, 1, [&](double t) {
            double acc = 0.0;
            for (std::size_t j = coeffs.size(); j-- > 0;) acc = acc * t + coeffs[j];
            return Vec{acc};
        });
    }
    if (name == "sinusoid") {
        const double a = scalar_param(params, "offset", 0.0);
        const double b = scalar_param(params, "amplitude", 1.0);
        const double omega = scalar_param(params, "omega", 1.0);
        const double phase = scalar_param(params, "phase", 0.0);
        return GridFunction::sample(grid, 1, [&](double t) {
            return Vec{a + b * std::sin(omega * t + phase)};
        });
    }
    throw std::invalid_argument("unknown input preset '" + name + "'");
}

}  // namespace caputo
