#include "caputo/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace caputo {

SemigroupEngine::SemigroupEngine(FractionalOrder alpha, VectorField field, double h,
                                 MetricParams metric, EngineOptions opts)
    : alpha_(alpha),
      field_(std::move(field)),
      h_(h),
      metric_(metric),
      opts_(std::move(opts)) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw std::domain_error("SemigroupEngine: step must be positive and finite");
    if (opts_.picard && !opts_.picard_config)
        opts_.picard_config = PicardConfig(2.0 * field_.lipschitz());
}

Trajectory SemigroupEngine::solve(const GridFunction& f, const UniformGrid& grid) const {
    if (opts_.picard)
        return solve_picard(alpha_, field_, f, grid, *opts_.picard_config, opts_.solver);
    return solve_pece(alpha_, field_, f, grid, opts_.solver);
}

namespace detail {

EvolveResult evolve_history(FractionalOrder alpha, const VectorField& field,
                            double tau, const GridFunction& f, double h,
                            const EngineOptions& opts) {
    if (f.grid().h() != h)
        throw std::invalid_argument("evolve_history: history step differs from engine step");
    const std::size_t m = aligned_index(f.grid(), tau, "evolve_history");
    const std::size_t n_panels = f.grid().panels();
    if (m == 0) return {f, std::nullopt};
    if (m >= n_panels)
        throw std::invalid_argument(
            "evolve_history: horizon exhausted (tau must leave at least one panel)");

    const UniformGrid solve_grid(h, m);
    Trajectory x = [&] {
        if (opts.picard) {
            PicardConfig cfg = opts.picard_config
                                   ? *opts.picard_config
                                   : PicardConfig(2.0 * field.lipschitz());
            return solve_picard(alpha, field, f, solve_grid, cfg, opts.solver);
        }
        return solve_pece(alpha, field, f, solve_grid, opts.solver);
    }();

    const std::size_t d = f.dim();
    std::vector<Vec> phi(m + 1, Vec(d, 0.0));
    for (std::size_t k = 0; k <= m; ++k) phi[k] = field(solve_grid.t(k), x.at(k));

    // Memory integrals over [0, tau] against the shifted kernel a(tau+theta-s).
    const UniformGrid out_grid(h, n_panels - m);
    const UniformGrid row_grid(h, n_panels);  // rows up to index m + j
    const Kernel kernel(alpha, opts.solver.beta);
    auto weights = conv_weights(kernel, row_grid);

    std::vector<Vec> out;
    out.reserve(out_grid.nodes());
    for (std::size_t j = 0; j <= n_panels - m; ++j) {
        Vec v = f.at_node(m + j);
        if (opts.window_rule == EngineOptions::WindowRule::trapezoid && j > 0) {
            const double t_row = out_grid.t(j) + tau;
            for (std::size_t k = 0; k <= m; ++k) {
                const double wk = (k == 0 || k == m) ? 0.5 * h : h;
                const double ak = kernel(t_row, solve_grid.t(k));
                for (std::size_t c = 0; c < d; ++c) v[c] += wk * ak * phi[k][c];
            }
        } else {
            for (std::size_t k = 0; k <= m; ++k) {
                const double wk = weights->window_weight(m + j, m, k);
                for (std::size_t c = 0; c < d; ++c) v[c] += wk * phi[k][c];
            }
        }
        out.push_back(std::move(v));
    }
    return {GridFunction(out_grid, std::move(out)), std::move(x)};
}

}  // namespace detail

GridFunction apply_T(const SemigroupEngine& eng, double tau, const GridFunction& f) {
    return detail::evolve_history(eng.order(), eng.field(), tau, f, eng.h(),
                                  eng.options())
        .shifted;
}

namespace {

// Metric truncation level usable on a remaining horizon, or 0 if none.
std::size_t usable_terms(const MetricParams& p, double horizon) {
    const double fl = std::floor(horizon + 1e-12);
    if (fl < 1.0) return 0;
    return std::min<std::size_t>(p.n_max, static_cast<std::size_t>(fl));
}

MetricValue metric_on_remaining(const MetricParams& p, const GridFunction& a,
                                const GridFunction& b, const char* what) {
    const std::size_t terms = usable_terms(p, a.horizon());
    if (terms == 0)
        throw std::invalid_argument(std::string(what) +
                                    ": horizon exhausted (no unit window left for the metric)");
    return rho(a, b, MetricParams(terms));
}

}  // namespace

DefectReport semigroup_defect(const SemigroupEngine& eng, double sigma, double tau,
                              const GridFunction& f, double tolerance) {
    const GridFunction one = apply_T(eng, sigma + tau, f);
    const GridFunction two = apply_T(eng, sigma, apply_T(eng, tau, f));
    const MetricValue m = metric_on_remaining(eng.metric(), one, two, "semigroup_defect");
    DefectReport r = make_report("semigroup_law", m.value, tolerance, eng.h(),
                                 eng.order().value());
    r.details["sigma"] = sigma;
    r.details["tau"] = tau;
    r.details["horizon_consumed"] = sigma + tau;
    r.details["horizon_remaining"] = one.horizon();
    r.details["metric_tail_bound"] = m.tail_bound;
    return r;
}

DefectReport shift_identity_residual(const SemigroupEngine& eng, double tau,
                                     const GridFunction& f, double tolerance) {
    const std::size_t m = aligned_index(f.grid(), tau, "shift_identity_residual");
    const UniformGrid full(eng.h(), f.grid().panels());
    const Trajectory x = eng.solve(f, full);
    const GridFunction shifted = apply_T(eng, tau, f);
    const UniformGrid rest(eng.h(), full.panels() - m);
    const Trajectory psi = eng.solve(shifted, rest);
    double defect = 0.0;
    for (std::size_t j = 0; j <= rest.panels(); ++j)
        defect = std::max(defect, dist2(x.at(m + j), psi.at(j)));
    DefectReport r =
        make_report("shift_identity", defect, tolerance, eng.h(), eng.order().value());
    r.details["tau"] = tau;
    r.details["horizon_remaining"] = rest.horizon();
    return r;
}

DefectReport steady_state_residual(const SemigroupEngine& eng, const Vec& x_star,
                                   double tau, double horizon, double tolerance) {
    if (x_star.size() != eng.field().dim())
        throw std::invalid_argument("steady_state_residual: state dimension mismatch");
    if (horizon <= 0.0)
        horizon = tau + static_cast<double>(eng.metric().n_max);
    const std::size_t n = aligned_index(UniformGrid(eng.h(), 1), horizon,
                                        "steady_state_residual horizon");
    const UniformGrid grid(eng.h(), n);
    const GridFunction f_star(grid, std::vector<Vec>(grid.nodes(), x_star));
    const GridFunction mapped = apply_T(eng, tau, f_star);
    const GridFunction rest(mapped.grid(),
                            std::vector<Vec>(mapped.grid().nodes(), x_star));
    const MetricValue m =
        metric_on_remaining(eng.metric(), mapped, rest, "steady_state_residual");
    DefectReport r = make_report("steady_state", m.value, tolerance, eng.h(),
                                 eng.order().value());
    r.details["tau"] = tau;
    r.details["field_norm_at_x_star"] = norm2(eng.field()(0.0, x_star));
    r.details["metric_tail_bound"] = m.tail_bound;
    return r;
}

DefectReport shift_continuity_bound(const SemigroupEngine& eng, double tau,
                                    const GridFunction& f, const GridFunction& h,
                                    double slack) {
    require_common_grid(f, h);
    const auto rf = detail::evolve_history(eng.order(), eng.field(), tau, f, eng.h(),
                                           eng.options());
    const auto rh = detail::evolve_history(eng.order(), eng.field(), tau, h, eng.h(),
                                           eng.options());
    const MetricValue lhs =
        metric_on_remaining(eng.metric(), rf.shifted, rh.shifted, "shift_continuity");
    const MetricValue base = metric_on_remaining(eng.metric(), f, h, "shift_continuity");

    const double a = eng.order().value();
    const double k = std::ceil(tau - 1e-12);
    const std::size_t n_max = eng.metric().n_max;
    double c = 0.0, pow2 = 1.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        pow2 *= 0.5;
        c += std::pow(k + static_cast<double>(n), a) * pow2;
    }
    c += std::pow(k + static_cast<double>(n_max) + 1.0, a) * pow2;  // series tail
    double sup_sol = 0.0;
    if (rf.solution) {
        for (std::size_t j = 0; j < rf.solution->values.size(); ++j)
            sup_sol = std::max(sup_sol, dist2(rf.solution->at(j), rh.solution->at(j)));
    }
    const double bound = std::pow(2.0, k) * base.value +
                         eng.field().lipschitz() * c / (a * gamma_fn(a)) * sup_sol +
                         std::pow(2.0, k) * base.tail_bound + slack;
    DefectReport r = make_report("operator_continuity", lhs.value, bound, eng.h(),
                                 eng.order().value());
    r.details["tau"] = tau;
    r.details["input_metric"] = base.value;
    r.details["solution_sup_distance"] = sup_sol;
    r.details["bound_constant_c"] = c;
    return r;
}

OmegaReport omega_probe(const SemigroupEngine& eng, const Vec& x0, double horizon,
                        double window, double tolerance, bool keep_trajectory) {
    if (x0.size() != eng.field().dim())
        throw std::invalid_argument("omega_probe: state dimension mismatch");
    if (!(window > 0.0) || !(window < horizon))
        throw std::invalid_argument("omega_probe: need 0 < window < horizon");
    const std::size_t n =
        aligned_index(UniformGrid(eng.h(), 1), horizon, "omega_probe horizon");
    const UniformGrid grid(eng.h(), n);
    const GridFunction f0(grid, std::vector<Vec>(grid.nodes(), x0));
    Trajectory x = eng.solve(f0, grid);

    const double t_from = horizon - window;
    const std::size_t d = x0.size();
    OmegaReport rep;
    rep.mean.assign(d, 0.0);
    rep.min.assign(d, std::numeric_limits<double>::infinity());
    rep.max.assign(d, -std::numeric_limits<double>::infinity());
    std::size_t count = 0;
    for (std::size_t j = 0; j <= grid.panels(); ++j) {
        if (grid.t(j) < t_from - 1e-12) continue;
        ++count;
        for (std::size_t c = 0; c < d; ++c) {
            const double v = x.at(j)[c];
            rep.mean[c] += v;
            rep.min[c] = std::min(rep.min[c], v);
            rep.max[c] = std::max(rep.max[c], v);
        }
    }
    rep.oscillation.assign(d, 0.0);
    double worst = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
        rep.mean[c] /= static_cast<double>(count);
        rep.oscillation[c] = rep.max[c] - rep.min[c];
        worst = std::max(worst, rep.oscillation[c]);
    }
    rep.horizon = horizon;
    rep.window = window;
    rep.tolerance = tolerance;
    rep.converged = worst <= tolerance;
    if (keep_trajectory) rep.trajectory = std::move(x);
    return rep;
}

}  // namespace caputo
