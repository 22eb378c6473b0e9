#include "caputo/history_space.hpp"

#include <algorithm>
#include <cmath>

namespace caputo {

GridFunction::GridFunction(UniformGrid grid, std::vector<Vec> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.nodes())
        throw std::invalid_argument("GridFunction: need one value per grid node");
    dim_ = values_[0].size();
    if (dim_ == 0) throw std::invalid_argument("GridFunction: dimension must be >= 1");
    for (const Vec& v : values_) {
        if (v.size() != dim_)
            throw std::invalid_argument("GridFunction: ragged value list");
        for (double x : v)
            if (!std::isfinite(x))
                throw std::invalid_argument("GridFunction: values must be finite");
    }
}

Vec GridFunction::eval(double t) const {
    const double H = horizon();
    const double slack = 1e-9 * grid_.h();
    if (!(t >= -slack) || !(t <= H + slack))
        throw std::domain_error("GridFunction::eval: t outside [0, horizon]");
    if (t <= 0.0) return values_.front();
    if (t >= H) return values_.back();
    const double q = t / grid_.h();
    std::size_t j = static_cast<std::size_t>(q);
    if (j >= grid_.panels()) j = grid_.panels() - 1;
    const double w = q - static_cast<double>(j);
    Vec out(dim_);
    for (std::size_t c = 0; c < dim_; ++c)
        out[c] = (1.0 - w) * values_[j][c] + w * values_[j + 1][c];
    return out;
}

void require_common_grid(const GridFunction& f, const GridFunction& h) {
    if (!(f.grid() == h.grid()) || f.dim() != h.dim())
        throw std::invalid_argument("history metric: functions must share grid and dimension");
}

double sup_dist_on(const GridFunction& f, const GridFunction& h, double n) {
    require_common_grid(f, h);
    if (!(n >= 0.0) || n > f.horizon() + 1e-9 * f.grid().h())
        throw std::invalid_argument("sup_dist_on: window must lie within the horizon");
    double s = 0.0;
    const std::size_t last =
        std::min<std::size_t>(static_cast<std::size_t>(n / f.grid().h() + 1e-12),
                              f.grid().panels());
    for (std::size_t j = 0; j <= last; ++j)
        s = std::max(s, dist2(f.at_node(j), h.at_node(j)));
    if (n < f.horizon()) s = std::max(s, dist2(f.eval(n), h.eval(n)));
    return s;
}

double rho_n(const GridFunction& f, const GridFunction& h, std::size_t n) {
    if (n < 1) throw std::invalid_argument("rho_n: n must be >= 1");
    const double s = sup_dist_on(f, h, static_cast<double>(n));
    return s / (1.0 + s);
}

MetricValue rho(const GridFunction& f, const GridFunction& h, const MetricParams& p) {
    if (static_cast<double>(p.n_max) > f.horizon() + 1e-9 * f.grid().h())
        throw std::invalid_argument("rho: truncation level exceeds the horizon");
    double acc = 0.0;
    double pow2 = 1.0;
    for (std::size_t n = 1; n <= p.n_max; ++n) {
        pow2 *= 0.5;
        acc += pow2 * rho_n(f, h, n);
    }
    return {acc, pow2};
}

}  // namespace caputo
