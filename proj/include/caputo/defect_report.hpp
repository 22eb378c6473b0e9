#pragma once
// Structured record of one numerically verified identity.

#include <map>
#include <string>

namespace caputo {

struct DefectReport {
    std::string identity;   // which identity was checked
    double defect = 0.0;    // measured violation, >= 0
    double tolerance = 0.0; // acceptance threshold used
    double h = 0.0;         // grid step of the check
    double alpha = 0.0;     // fractional order
    bool pass = false;      // defect <= tolerance
    // free-form numeric context (horizons consumed, tail bounds, norms, ...)
    std::map<std::string, double> details;
};

inline DefectReport make_report(std::string identity, double defect, double tol,
                                double h, double alpha) {
    DefectReport r;
    r.identity = std::move(identity);
    r.defect = defect;
    r.tolerance = tol;
    r.h = h;
    r.alpha = alpha;
    r.pass = defect <= tol;
    return r;
}

}  // namespace caputo
