#pragma once
// Shared small types and helpers used across the library.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace caputo {

using Vec = std::vector<double>;

// Raised when an adaptive algorithm cannot certify its accuracy target.
struct accuracy_error : std::runtime_error {
    explicit accuracy_error(const std::string& what) : std::runtime_error(what) {}
};

// Fractional order restricted to the strictly sub-diffusive range (0,1).
class FractionalOrder {
public:
    explicit FractionalOrder(double a) : value_(a) {
        if (!(a > 0.0) || !(a < 1.0))
            throw std::domain_error("FractionalOrder: alpha must lie in (0,1), got " +
                                    std::to_string(a));
    }
    double value() const { return value_; }

private:
    double value_;
};

inline void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// Euclidean norm of a state vector.
inline double norm2(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double dist2(const Vec& a, const Vec& b) {
    require(a.size() == b.size(), "dist2: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace caputo
