#pragma once
// Named vector fields and input histories, so every experiment is expressible
// in a config file without user code.

#include <map>
#include <string>

#include "caputo/fde_solver.hpp"
#include "caputo/skew_product.hpp"

namespace caputo {

using ParamMap = std::map<std::string, Vec>;

// Fields: "zero", "constant" (c), "linear" (lambda, optional L override),
// "logistic" (optional L, valid on the declared box), "linear_forced"
// (-x + A sin(omega t); params A, omega).  All are scalar (d = 1) except
// "constant"/"zero"/"linear", which take the dimension from their parameters.
VectorField make_field(const std::string& name, const ParamMap& params);

// Time-dependent presets wrapped with offset 0.
TimedField make_timed_field(const std::string& name, const ParamMap& params);

// Inputs: "constant" (x0, possibly vector), "polynomial" (coeffs c0 c1 ...,
// scalar f(t) = sum c_j t^j), "sinusoid" (a + b sin(omega t + phase)).
GridFunction make_input(const std::string& name, const ParamMap& params,
                        const UniformGrid& grid);

}  // namespace caputo
