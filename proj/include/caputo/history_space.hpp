#pragma once
// Finite-horizon stand-ins for continuous histories f: R+ -> R^d and the
// compact-open metric rho = sum_n 2^{-n} rho_n built from windowed sups.

#include <cstddef>

#include "caputo/kernel_quadrature.hpp"

namespace caputo {

class GridFunction {
public:
    // values: one ℝ^d sample per node (grid.nodes() of them), all finite.
    GridFunction(UniformGrid grid, std::vector<Vec> values);

    const UniformGrid& grid() const { return grid_; }
    double horizon() const { return grid_.horizon(); }
    std::size_t dim() const { return dim_; }
    const std::vector<Vec>& values() const { return values_; }
    const Vec& at_node(std::size_t j) const { return values_.at(j); }

    // Piecewise-linear interpolation; t must lie in [0, horizon].
    Vec eval(double t) const;

    // Sample a callable on a grid.
    template <class F>
    static GridFunction sample(const UniformGrid& g, std::size_t dim, F&& fn) {
        std::vector<Vec> v;
        v.reserve(g.nodes());
        for (std::size_t j = 0; j < g.nodes(); ++j) {
            Vec x = fn(g.t(j));
            if (x.size() != dim)
                throw std::invalid_argument("GridFunction::sample: dimension mismatch");
            v.push_back(std::move(x));
        }
        return GridFunction(g, std::move(v));
    }

private:
    UniformGrid grid_;
    std::size_t dim_;
    std::vector<Vec> values_;
};

struct MetricParams {
    explicit MetricParams(std::size_t n_max = 8) : n_max(n_max) {
        if (n_max < 1) throw std::domain_error("MetricParams: n_max must be >= 1");
    }
    std::size_t n_max;
};

// A truncated metric value together with the bound 2^{-N} on the dropped tail.
struct MetricValue {
    double value;
    double tail_bound;
};

void require_common_grid(const GridFunction& f, const GridFunction& h);

// sup of the Euclidean distance over [0, n] (n real, <= horizon); exact for
// piecewise-linear differences since the sup sits at a node or at n itself.
double sup_dist_on(const GridFunction& f, const GridFunction& h, double n);

// rho_n = s/(1+s) with s the windowed sup over [0, n], integer n >= 1.
double rho_n(const GridFunction& f, const GridFunction& h, std::size_t n);

// Truncated metric sum_{n=1}^{N_max} 2^{-n} rho_n with its tail bound.
MetricValue rho(const GridFunction& f, const GridFunction& h, const MetricParams& p);

}  // namespace caputo
