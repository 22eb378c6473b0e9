#pragma once
// Nonautonomous extension: the shift on time-dependent vector fields, the
// evolution T_tau(f,g), the skew-product map Pi(tau,f,g) = (T_tau(f,g), g_tau),
// and its cocycle defect.

#include "caputo/semigroup.hpp"

namespace caputo {

// A vector field together with an accumulated time offset: evaluation at
// (t, x) reads the base field at (offset + t, x).
class TimedField {
public:
    explicit TimedField(VectorField base, double offset = 0.0)
        : base_(std::move(base)), offset_(offset) {
        if (!(offset >= 0.0) || !std::isfinite(offset))
            throw std::domain_error("TimedField: offset must be >= 0 and finite");
    }
    const VectorField& base() const { return base_; }
    double offset() const { return offset_; }
    Vec operator()(double t, const Vec& x) const { return base_(offset_ + t, x); }
    // The field as seen by the solver machinery (offset folded in).
    VectorField as_vector_field() const;

private:
    VectorField base_;
    double offset_;
};

// g shifted by tau: offsets add.
TimedField shift_field(const TimedField& g, double tau);

struct SkewState {
    GridFunction f;
    TimedField g;
};

class SkewProductEngine {
public:
    SkewProductEngine(FractionalOrder alpha, double h,
                      MetricParams metric = MetricParams(), EngineOptions opts = {});
    FractionalOrder order() const { return alpha_; }
    double h() const { return h_; }
    const MetricParams& metric() const { return metric_; }
    const EngineOptions& options() const { return opts_; }

private:
    FractionalOrder alpha_;
    double h_;
    MetricParams metric_;
    EngineOptions opts_;
};

// First component of Pi: evolve the history under the time-dependent field.
GridFunction apply_T_skew(const SkewProductEngine& eng, double tau, const SkewState& s);

// Pi(tau, f, g) = (T_tau(f,g), g_tau).
SkewState apply_Pi(const SkewProductEngine& eng, double tau, const SkewState& s);

// rho between the history components of Pi(sigma+tau, s) and
// Pi(sigma, Pi(tau, s)); the field components are compared by evaluation on a
// sampled probe set and the maximum discrepancy is reported in the details.
DefectReport cocycle_defect(const SkewProductEngine& eng, double sigma, double tau,
                            const SkewState& s, double tolerance = 1e-3);

}  // namespace caputo
