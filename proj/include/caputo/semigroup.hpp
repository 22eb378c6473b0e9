#pragma once
// The history-evolution operator T_tau: (T_tau f)(theta) = f(tau+theta)
// + int_0^tau a(tau+theta,s) g(x_f(s)) ds, its algebraic identities as
// measurable defects, and steady-state / long-run probes.

#include <optional>

#include "caputo/fde_solver.hpp"

namespace caputo {

struct EngineOptions {
    SolverOptions solver{};
    // Internal solves use the iterated predictor-corrector unless picard is set.
    bool picard = false;
    std::optional<PicardConfig> picard_config{};  // default: gamma = 2L, tol 1e-10
    // Quadrature for the memory integral at shifted nodes theta > 0: product
    // integration (exact on the interpolant, uniform accuracy) or composite
    // trapezoid (smooth-integrand rule; accuracy degrades as theta -> 0).
    enum class WindowRule { product, trapezoid };
    WindowRule window_rule = WindowRule::product;
};

class SemigroupEngine {
public:
    SemigroupEngine(FractionalOrder alpha, VectorField field, double h,
                    MetricParams metric = MetricParams(), EngineOptions opts = {});

    FractionalOrder order() const { return alpha_; }
    const VectorField& field() const { return field_; }
    double h() const { return h_; }
    const MetricParams& metric() const { return metric_; }
    const EngineOptions& options() const { return opts_; }

    // Solve the integral equation on [0, grid.horizon()] with this engine's
    // field and solver configuration.
    Trajectory solve(const GridFunction& f, const UniformGrid& grid) const;

private:
    FractionalOrder alpha_;
    VectorField field_;
    double h_;
    MetricParams metric_;
    EngineOptions opts_;
};

struct OmegaReport {
    Vec mean, min, max, oscillation;  // per-coordinate trailing-window stats
    double horizon = 0.0;
    double window = 0.0;
    double tolerance = 0.0;
    bool converged = false;  // max oscillation <= tolerance
    std::optional<Trajectory> trajectory;
};

// T_tau f on the remaining horizon H - tau; tau must be grid-aligned and
// strictly below H (the engine refuses to exhaust the horizon).
GridFunction apply_T(const SemigroupEngine& eng, double tau, const GridFunction& f);

// rho(T_{sigma+tau} f, T_sigma(T_tau f)) on the common remaining horizon.
DefectReport semigroup_defect(const SemigroupEngine& eng, double sigma, double tau,
                              const GridFunction& f, double tolerance = 1e-4);

// sup distance between x_f(tau + .) and the solution driven by T_tau f.
DefectReport shift_identity_residual(const SemigroupEngine& eng, double tau,
                                     const GridFunction& f, double tolerance = 2e-10);

// rho(T_tau f*, f*) for the constant history f* == x_star; the report carries
// ||g(x*)|| so a failure can be attributed to a non-steady point.
DefectReport steady_state_residual(const SemigroupEngine& eng, const Vec& x_star,
                                   double tau, double horizon = 0.0,
                                   double tolerance = 1e-12);

// Checks the operator-continuity estimate rho(T_tau f, T_tau h) <=
// 2^k rho(f,h) + (L c / (alpha Gamma(alpha))) sup_{[0,tau]} ||x_f - x_h||
// with k = ceil(tau) and c = sum_n (k+n)^alpha 2^{-n} (truncation allowances
// are added to the right side).
DefectReport shift_continuity_bound(const SemigroupEngine& eng, double tau,
                                    const GridFunction& f, const GridFunction& h,
                                    double slack = 1e-6);

// Long-run statistics of the solution started from the constant history x0.
OmegaReport omega_probe(const SemigroupEngine& eng, const Vec& x0, double horizon,
                        double window, double tolerance = 1e-6,
                        bool keep_trajectory = false);

namespace detail {

// Shared evolution core (also used by the skew-product extension, whose field
// already carries its time offset).  Returns the shifted history and the
// solution over [0, tau] it was built from.
struct EvolveResult {
    GridFunction shifted;
    std::optional<Trajectory> solution;  // empty when tau = 0
};
EvolveResult evolve_history(FractionalOrder alpha, const VectorField& field,
                            double tau, const GridFunction& f, double h,
                            const EngineOptions& opts);

}  // namespace detail

}  // namespace caputo
