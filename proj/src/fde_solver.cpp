#include "caputo/fde_solver.hpp"

#include <cmath>
#include <random>
#include <utility>

namespace caputo {

VectorField::VectorField(std::size_t dim, AutoFn g, double lipschitz, std::string name)
    : dim_(dim),
      fn_([g = std::move(g)](double, const Vec& x) { return g(x); }),
      lipschitz_(lipschitz),
      time_dependent_(false),
      name_(std::move(name)) {
    if (dim_ == 0) throw std::domain_error("VectorField: dimension must be >= 1");
    if (!(lipschitz_ > 0.0) || !std::isfinite(lipschitz_))
        throw std::domain_error("VectorField: Lipschitz constant must be positive");
}

VectorField::VectorField(std::size_t dim, TimedFn g, double lipschitz, std::string name)
    : dim_(dim),
      fn_(std::move(g)),
      lipschitz_(lipschitz),
      time_dependent_(true),
      name_(std::move(name)) {
    if (dim_ == 0) throw std::domain_error("VectorField: dimension must be >= 1");
    if (!(lipschitz_ > 0.0) || !std::isfinite(lipschitz_))
        throw std::domain_error("VectorField: Lipschitz constant must be positive");
}

Vec VectorField::operator()(double t, const Vec& x) const {
    Vec v = fn_(t, x);
    if (v.size() != dim_)
        throw std::runtime_error("VectorField: map returned wrong dimension");
    return v;
}

namespace detail {

namespace {

// Solve the small dense system M c = rhs in place (partial pivoting).
void solve_dense(std::vector<Vec>& m, Vec& rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        if (m[piv][col] == 0.0)
            throw std::runtime_error("correction system is singular");
        std::swap(m[piv], m[col]);
        std::swap(rhs[piv], rhs[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = m[r][col] / m[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= m[i][c] * rhs[c];
        rhs[i] = s / m[i][i];
    }
}

}  // namespace

CorrectionTable::CorrectionTable(FractionalOrder alpha, double h, std::size_t n_max,
                                 const ConvolutionWeights& w)
    : n_max_(n_max) {
    const double a = alpha.value();
    k_ = 0;
    while (k_ < 8 && (static_cast<double>(k_ + 1)) * a < 1.0) ++k_;
    coeff_.assign(n_max + 1, Vec{});
    if (k_ == 0) return;

    // Node powers t_i^{k alpha} split as h^{k alpha} * i^{k alpha}.
    std::vector<Vec> node_pow(k_ + 1, Vec(n_max + 1, 0.0));
    Vec h_pow(k_ + 1, 1.0);
    for (std::size_t k = 1; k <= k_; ++k) {
        const double e = static_cast<double>(k) * a;
        h_pow[k] = std::pow(h, e);
        for (std::size_t i = 0; i <= n_max; ++i)
            node_pow[k][i] = std::pow(static_cast<double>(i), e);
    }
    // Moment of the kernel against s^{k alpha} over [0, t_n], closed form.
    const auto moment = [&](std::size_t n, std::size_t k) {
        const double e = static_cast<double>(k) * a;
        const double tn = h * static_cast<double>(n);
        return std::pow(tn, e + a) * gamma_fn(e + 1.0) / gamma_fn(e + a + 1.0);
    };

    for (std::size_t n = 1; n <= n_max; ++n) {
        const std::size_t m = std::min(k_, n);
        std::vector<Vec> sys(m, Vec(m, 0.0));
        Vec rhs(m, 0.0);
        for (std::size_t k = 1; k <= m; ++k) {
            double quad = 0.0;
            for (std::size_t i = 1; i <= n; ++i)
                quad += w.weight(n, i) * node_pow[k][i];
            // Residual rescaled by h^{-k alpha} so the system matrix is
            // h-independent (entries j^{k alpha}).
            rhs[k - 1] = (moment(n, k) - h_pow[k] * quad) / h_pow[k];
            for (std::size_t j = 1; j <= m; ++j) sys[k - 1][j - 1] = node_pow[k][j];
        }
        solve_dense(sys, rhs);
        coeff_[n] = std::move(rhs);
    }
}

double CorrectionTable::coeff(std::size_t n, std::size_t m) const {
    if (n > n_max_ || m < 1 || m > terms_for_row(n))
        throw std::invalid_argument("CorrectionTable: index out of range");
    return coeff_[n][m - 1];
}

}  // namespace detail

namespace {

std::vector<Vec> sample_input(const GridFunction& f, const UniformGrid& grid) {
    if (f.horizon() < grid.horizon() - 1e-9 * grid.h())
        throw std::invalid_argument("solver: input does not cover the solve horizon");
    std::vector<Vec> out;
    out.reserve(grid.nodes());
    const bool exact = f.grid().h() == grid.h();
    for (std::size_t j = 0; j < grid.nodes(); ++j)
        out.push_back(exact ? f.at_node(j) : f.eval(grid.t(j)));
    return out;
}

struct DiscreteOp {
    const ConvolutionWeights& w;
    const detail::CorrectionTable* corr;  // null when corrections are off

    // History part of row n: all weighted samples with index < n plus the
    // known (index < n) correction terms.
    Vec history(std::size_t n, const std::vector<Vec>& phi) const {
        const std::size_t d = phi[0].size();
        Vec acc(d, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double wk = w.weight(n, k);
            for (std::size_t c = 0; c < d; ++c) acc[c] += wk * phi[k][c];
        }
        if (corr) {
            const std::size_t m_end = std::min(corr->terms_for_row(n), n - 1);
            for (std::size_t m = 1; m <= m_end; ++m) {
                const double cm = corr->coeff(n, m);
                for (std::size_t c = 0; c < d; ++c)
                    acc[c] += cm * (phi[m][c] - phi[0][c]);
            }
        }
        return acc;
    }

    // Coefficient of phi_n in row n (diagonal weight plus its correction).
    double diagonal(std::size_t n) const {
        double v = w.weight(n, n);
        if (corr && corr->terms_for_row(n) == n) v += corr->coeff(n, n);
        return v;
    }

    // phi_0's extra coefficient from the diagonal correction term, if any.
    double diagonal_base(std::size_t n) const {
        return (corr && corr->terms_for_row(n) == n) ? -corr->coeff(n, n) : 0.0;
    }

    // Full corrected row applied to complete samples.
    Vec full(std::size_t n, const std::vector<Vec>& phi) const {
        Vec acc = history(n, phi);
        const double wd = diagonal(n);
        const double wb = diagonal_base(n);
        const std::size_t d = acc.size();
        for (std::size_t c = 0; c < d; ++c)
            acc[c] += wd * phi[n][c] + wb * phi[0][c];
        return acc;
    }
};

struct SolveContext {
    std::shared_ptr<const ConvolutionWeights> weights;
    std::shared_ptr<const detail::CorrectionTable> corrections;
    DiscreteOp op() const {
        return DiscreteOp{*weights, corrections ? corrections.get() : nullptr};
    }
};

SolveContext make_context(FractionalOrder alpha, const UniformGrid& grid,
                          const SolverOptions& opts) {
    SolveContext ctx;
    ctx.weights = conv_weights(Kernel(alpha, opts.beta), grid);
    if (opts.corrections && opts.beta == 0.0)
        ctx.corrections = std::make_shared<const detail::CorrectionTable>(
            alpha, grid.h(), grid.panels(), *ctx.weights);
    return ctx;
}

}  // namespace

Trajectory solve_pece(FractionalOrder alpha, const VectorField& field,
                      const GridFunction& f, const UniformGrid& grid,
                      const SolverOptions& opts) {
    if (field.dim() != f.dim())
        throw std::invalid_argument("solver: field and input dimensions differ");
    const SolveContext ctx = make_context(alpha, grid, opts);
    const DiscreteOp op = ctx.op();
    const std::vector<Vec> fs = sample_input(f, grid);
    const std::size_t n_nodes = grid.nodes();
    const std::size_t d = field.dim();
    const double lip = field.lipschitz();

    std::vector<Vec> x(n_nodes, Vec(d, 0.0));
    std::vector<Vec> phi(n_nodes, Vec(d, 0.0));
    x[0] = fs[0];
    phi[0] = field(grid.t(0), x[0]);
    double worst_residual = 0.0;
    std::size_t corrector_total = 0;

    for (std::size_t n = 1; n < n_nodes; ++n) {
        const double tn = grid.t(n);
        const Vec hist = op.history(n, phi);
        const double wd = op.diagonal(n);
        const double wb = op.diagonal_base(n);
        if (lip * std::abs(wd) >= 1.0)
            throw convergence_error(
                "solve_pece: grid step too large for a contractive corrector");

        // Predict with the product-rectangle rule, then iterate the
        // product-trapezoidal corrector to its fixed point.
        Vec xp = fs[n];
        for (std::size_t k = 0; k < n; ++k) {
            const double bk = ctx.weights->rect_weight(n, k);
            for (std::size_t c = 0; c < d; ++c) xp[c] += bk * phi[k][c];
        }
        Vec cur = std::move(xp);
        bool done = false;
        for (std::size_t it = 0; it < opts.max_corrector_iterations; ++it) {
            const Vec gv = field(tn, cur);
            Vec next = fs[n];
            for (std::size_t c = 0; c < d; ++c)
                next[c] += hist[c] + wd * gv[c] + wb * phi[0][c];
            const double step = dist2(next, cur);
            cur = std::move(next);
            ++corrector_total;
            if (step <= opts.corrector_tolerance * (1.0 + norm2(cur))) {
                worst_residual = std::max(worst_residual, step);
                done = true;
                break;
            }
        }
        if (!done)
            throw convergence_error("solve_pece: corrector failed to converge at node " +
                                    std::to_string(n));
        x[n] = cur;
        phi[n] = field(tn, x[n]);
    }

    Trajectory traj{grid,
                    std::move(x),
                    GridFunction(grid, fs),
                    "pece",
                    corrector_total,
                    worst_residual,
                    {},
                    {}};
    return traj;
}

Trajectory solve_picard(FractionalOrder alpha, const VectorField& field,
                        const GridFunction& f, const UniformGrid& grid,
                        const PicardConfig& cfg, const SolverOptions& opts,
                        const std::vector<Vec>* initial) {
    if (field.dim() != f.dim())
        throw std::invalid_argument("solver: field and input dimensions differ");
    if (!(cfg.gamma > field.lipschitz()))
        throw std::invalid_argument(
            "solve_picard: gamma must exceed the field's Lipschitz constant");
    const SolveContext ctx = make_context(alpha, grid, opts);
    const DiscreteOp op = ctx.op();
    const std::vector<Vec> fs = sample_input(f, grid);
    const std::size_t n_nodes = grid.nodes();
    const std::size_t d = field.dim();

    // Per-node weight E_alpha(gamma t^alpha) of the iteration norm.
    Vec weight(n_nodes);
    for (std::size_t j = 0; j < n_nodes; ++j)
        weight[j] =
            mittag_leffler(alpha.value(), cfg.gamma * std::pow(grid.t(j), alpha.value()));

    std::vector<Vec> x = initial ? *initial : fs;
    if (x.size() != n_nodes)
        throw std::invalid_argument("solve_picard: initial iterate has wrong length");
    for (const Vec& v : x)
        if (v.size() != d)
            throw std::invalid_argument("solve_picard: initial iterate has wrong dimension");

    std::vector<Vec> phi(n_nodes, Vec(d, 0.0));
    std::vector<double> ratios;
    std::vector<std::string> warnings;
    const double ratio_cap = field.lipschitz() / cfg.gamma + opts.contraction_slack;
    double prev_delta = -1.0;
    bool warned = false;

    for (std::size_t iter = 1; iter <= cfg.max_iterations; ++iter) {
        for (std::size_t k = 0; k < n_nodes; ++k) phi[k] = field(grid.t(k), x[k]);
        double delta = 0.0;
        std::vector<Vec> next(n_nodes);
        next[0] = fs[0];
        delta = dist2(next[0], x[0]) / weight[0];
        for (std::size_t n = 1; n < n_nodes; ++n) {
            Vec v = op.full(n, phi);
            for (std::size_t c = 0; c < d; ++c) v[c] += fs[n][c];
            delta = std::max(delta, dist2(v, x[n]) / weight[n]);
            next[n] = std::move(v);
        }
        x = std::move(next);
        if (prev_delta > 0.0) {
            const double r = delta / prev_delta;
            ratios.push_back(r);
            if (!warned && r > ratio_cap && delta > cfg.tolerance) {
                warnings.push_back(
                    "contraction ratio " + std::to_string(r) +
                    " exceeds L/gamma + slack; declared Lipschitz constant may be wrong");
                warned = true;
            }
        }
        prev_delta = delta;
        if (delta <= cfg.tolerance) {
            Trajectory traj{grid,
                            std::move(x),
                            GridFunction(grid, fs),
                            "picard",
                            iter,
                            delta,
                            std::move(ratios),
                            std::move(warnings)};
            return traj;
        }
    }
    throw convergence_error("solve_picard: no convergence within max iterations");
}

double continuity_bound(const GridFunction& f, const GridFunction& h, double L,
                        FractionalOrder alpha, double T) {
    require_common_grid(f, h);
    if (!(L > 0.0) || !std::isfinite(L))
        throw std::domain_error("continuity_bound: L must be positive");
    if (!(T > 0.0) || T > f.horizon() + 1e-9 * f.grid().h())
        throw std::invalid_argument("continuity_bound: T must lie within the horizon");
    const double dist = sup_dist_on(f, h, T);
    return dist * mittag_leffler(alpha.value(), L * std::pow(T, alpha.value()));
}

DefectReport verify_continuity(FractionalOrder alpha, const VectorField& field,
                               const GridFunction& f, const GridFunction& h,
                               const UniformGrid& grid, const SolverOptions& opts,
                               double slack) {
    require_common_grid(f, h);
    const double T = grid.horizon();
    const double input_dist = sup_dist_on(f, h, T);
    const double amplification =
        mittag_leffler(alpha.value(), field.lipschitz() * std::pow(T, alpha.value()));
    const double bound = input_dist * amplification;
    const Trajectory xf = solve_pece(alpha, field, f, grid, opts);
    const Trajectory xh = solve_pece(alpha, field, h, grid, opts);
    double measured = 0.0;
    for (std::size_t j = 0; j < grid.nodes(); ++j)
        measured = std::max(measured, dist2(xf.at(j), xh.at(j)));
    DefectReport r = make_report("gronwall_continuity", measured, bound + slack,
                                 grid.h(), alpha.value());
    r.details["bound"] = bound;
    r.details["input_distance"] = input_dist;
    r.details["amplification"] = amplification;
    return r;
}

double bielecki_norm(const Trajectory& x, const WeightParams& w) {
    if (x.values.empty()) throw std::invalid_argument("bielecki_norm: empty trajectory");
    double best = 0.0;
    for (std::size_t j = 0; j < x.values.size(); ++j) {
        const double e = bielecki_weight(w, x.grid.t(j));
        best = std::max(best, norm2(x.values[j]) / e);
    }
    return best;
}

LipschitzCheck spot_check_lipschitz(const VectorField& field, const Vec& lo,
                                    const Vec& hi, std::size_t pairs,
                                    std::uint64_t seed, double t_max) {
    if (lo.size() != field.dim() || hi.size() != field.dim())
        throw std::invalid_argument("spot_check_lipschitz: box dimension mismatch");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    LipschitzCheck out;
    const std::size_t d = field.dim();
    Vec x(d), y(d);
    for (std::size_t i = 0; i < pairs; ++i) {
        for (std::size_t c = 0; c < d; ++c) {
            x[c] = lo[c] + (hi[c] - lo[c]) * unit(rng);
            y[c] = lo[c] + (hi[c] - lo[c]) * unit(rng);
        }
        const double t = field.time_dependent() ? t_max * unit(rng) : 0.0;
        const double dx = dist2(x, y);
        if (dx < 1e-14) continue;
        const double dg = dist2(field(t, x), field(t, y));
        const double ratio = dg / (field.lipschitz() * dx);
        ++out.samples;
        out.worst_ratio = std::max(out.worst_ratio, ratio);
        if (ratio > 1.0 + 1e-9) ++out.violations;
    }
    return out;
}

}  // namespace caputo
