#pragma once
// Solvers for x(t) = f(t) + int_0^t a(t,s) g(x(s)) ds: weighted-norm Picard
// iteration and a product-integration predictor-corrector, plus continuity
// (Gronwall-type) certificates.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>

#include "caputo/defect_report.hpp"
#include "caputo/history_space.hpp"
#include "caputo/special_functions.hpp"

namespace caputo {

// Raised when an iteration fails to reach its tolerance within its budget.
struct convergence_error : std::runtime_error {
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

// The map g with a declared (not estimated) Lipschitz constant.
class VectorField {
public:
    using AutoFn = std::function<Vec(const Vec&)>;
    using TimedFn = std::function<Vec(double, const Vec&)>;

    VectorField(std::size_t dim, AutoFn g, double lipschitz, std::string name = "");
    VectorField(std::size_t dim, TimedFn g, double lipschitz, std::string name = "");

    std::size_t dim() const { return dim_; }
    double lipschitz() const { return lipschitz_; }
    bool time_dependent() const { return time_dependent_; }
    const std::string& name() const { return name_; }
    Vec operator()(double t, const Vec& x) const;

private:
    std::size_t dim_;
    TimedFn fn_;
    double lipschitz_;
    bool time_dependent_;
    std::string name_;
};

struct PicardConfig {
    explicit PicardConfig(double gamma, double tolerance = 1e-10,
                          std::size_t max_iterations = 200)
        : gamma(gamma), tolerance(tolerance), max_iterations(max_iterations) {
        if (!(gamma > 0.0) || !std::isfinite(gamma))
            throw std::domain_error("PicardConfig: gamma must be positive");
        if (!(tolerance > 0.0))
            throw std::domain_error("PicardConfig: tolerance must be positive");
        if (max_iterations < 1)
            throw std::domain_error("PicardConfig: need at least one iteration");
    }
    double gamma;
    double tolerance;
    std::size_t max_iterations;
};

struct SolverOptions {
    // Exponential tempering rate of the kernel (0 = plain power kernel).
    double beta = 0.0;
    // Startup corrections make the quadrature exact on the sub-linear powers
    // s^{k alpha} (k alpha < 1) that dominate solutions near t = 0.  Their
    // moment closed forms assume the untempered kernel, so they are skipped
    // automatically when beta > 0.
    bool corrections = true;
    // Node-level fixed-point control for the corrector sweep.
    double corrector_tolerance = 1e-13;
    std::size_t max_corrector_iterations = 60;
    // Tolerated excess over L/gamma in the observed Picard contraction ratio.
    double contraction_slack = 0.05;
};

struct Trajectory {
    UniformGrid grid;
    std::vector<Vec> values;  // one ℝ^d value per node, index 0 at t = 0
    GridFunction input;
    std::string solver;
    std::size_t iterations = 0;
    double residual = 0.0;  // final stopping measure of the iteration
    std::vector<double> iterate_ratios;
    std::vector<std::string> warnings;

    const Vec& at(std::size_t j) const { return values.at(j); }
    GridFunction as_grid_function() const { return GridFunction(grid, values); }
};

Trajectory solve_picard(FractionalOrder alpha, const VectorField& field,
                        const GridFunction& f, const UniformGrid& grid,
                        const PicardConfig& cfg, const SolverOptions& opts = {},
                        const std::vector<Vec>* initial = nullptr);

Trajectory solve_pece(FractionalOrder alpha, const VectorField& field,
                      const GridFunction& f, const UniformGrid& grid,
                      const SolverOptions& opts = {});

// sup_{[0,T]} ||f-h|| * E_alpha(L T^alpha), the a-priori output distance bound.
double continuity_bound(const GridFunction& f, const GridFunction& h, double L,
                        FractionalOrder alpha, double T);

// Solves for both inputs and compares the measured distance to the bound.
DefectReport verify_continuity(FractionalOrder alpha, const VectorField& field,
                               const GridFunction& f, const GridFunction& h,
                               const UniformGrid& grid,
                               const SolverOptions& opts = {}, double slack = 1e-6);

// max over nodes of ||x(t)|| / E_alpha(gamma t^alpha).
double bielecki_norm(const Trajectory& x, const WeightParams& w);

struct LipschitzCheck {
    std::size_t samples = 0;
    std::size_t violations = 0;
    double worst_ratio = 0.0;  // max ||g(x)-g(y)|| / (L ||x-y||)
};

// Samples pairs in the box [lo, hi]^d (and times in [0, t_max] for
// time-dependent fields) and reports declared-L violations.
LipschitzCheck spot_check_lipschitz(const VectorField& field, const Vec& lo,
                                    const Vec& hi, std::size_t pairs,
                                    std::uint64_t seed, double t_max = 10.0);

namespace detail {

// Coefficients c_{n,m} of the startup correction sum_m c_{n,m}(phi_m - phi_0);
// added to row n of the product-trapezoidal rule they integrate s^{k alpha}
// exactly for every k >= 1 with k alpha < 1 (at most 8 terms).
class CorrectionTable {
public:
    CorrectionTable(FractionalOrder alpha, double h, std::size_t n_max,
                    const ConvolutionWeights& w);
    std::size_t terms() const { return k_; }
    std::size_t terms_for_row(std::size_t n) const { return std::min(k_, n); }
    double coeff(std::size_t n, std::size_t m) const;  // 1 <= m <= terms_for_row(n)

private:
    std::size_t k_;
    std::size_t n_max_;
    std::vector<Vec> coeff_;  // coeff_[n] holds c_{n,1}..c_{n,min(K,n)}
};

}  // namespace detail

}  // namespace caputo
