#include "caputo/kernel_quadrature.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "caputo/special_functions.hpp"

namespace caputo {

namespace {

// m^p - (m-1)^p without cancellation for large m.
double power_diff(double m, double p) {
    if (m <= 1.0) return std::pow(m, p);
    return -std::pow(m, p) * std::expm1(p * std::log1p(-1.0 / m));
}

}  // namespace

double Kernel::operator()(double t, double s) const {
    if (!(s >= 0.0) || !(s < t))
        throw std::domain_error("Kernel: require 0 <= s < t");
    const double u = t - s;
    const double a = alpha_.value();
    double v = std::pow(u, a - 1.0) / gamma_fn(a);
    if (beta_ > 0.0) v *= std::exp(-beta_ * u);
    return v;
}

double kernel_eval(const Kernel& k, double t, double s) { return k(t, s); }

double kernel_mass(FractionalOrder alpha, double tau, double theta) {
    if (!(tau >= 0.0) || !(theta >= 0.0))
        throw std::domain_error("kernel_mass: tau and theta must be >= 0");
    if (tau == 0.0) return 0.0;
    const double a = alpha.value();
    double diff;
    if (theta == 0.0) {
        diff = std::pow(tau, a);
    } else {
        // (tau+theta)^a - theta^a, stable when theta >> tau.
        diff = -std::pow(tau + theta, a) *
               std::expm1(a * std::log(theta / (tau + theta)));
    }
    return diff / (a * gamma_fn(a));
}

std::size_t aligned_index(const UniformGrid& g, double x, const char* what) {
    const double q = x / g.h();
    const double r = std::nearbyint(q);
    if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q)) || r < 0.0)
        throw std::invalid_argument(std::string(what) +
                                    ": time is not aligned to the grid step");
    return static_cast<std::size_t>(r);
}

ConvolutionWeights::ConvolutionWeights(const Kernel& k, double h, std::size_t n_max)
    : kernel_(k), h_(h), n_max_(n_max) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw std::domain_error("ConvolutionWeights: step must be positive");
    if (n_max < 1) throw std::domain_error("ConvolutionWeights: need n_max >= 1");
    const double a = k.alpha();
    scale_ = std::pow(h, a) / gamma_fn(a);
    left_.resize(n_max + 1);
    right_.resize(n_max + 1);
    rect_.resize(n_max + 1);
    left_[0] = right_[0] = rect_[0] = 0.0;  // unused slot, m starts at 1
    for (std::size_t m = 1; m <= n_max; ++m) {
        const double md = static_cast<double>(m);
        const double A = power_diff(md, a);        // m^a - (m-1)^a
        const double B = power_diff(md, a + 1.0);  // m^(a+1) - (m-1)^(a+1)
        // Panel [t_{k}, t_{k+1}] at distance index m = n-k from the row time:
        // l(m) goes to the panel's left node, r(m) to its right node.
        double l = B / (a + 1.0) - (md - 1.0) * A / a;
        double r = md * A / a - B / (a + 1.0);
        double rect = A / a;
        if (k.tempered()) {
            const double damp = std::exp(-k.beta() * h * (md - 0.5));
            l *= damp;
            r *= damp;
            rect *= damp;
        }
        left_[m] = l;
        right_[m] = r;
        rect_[m] = rect;
    }
}

double ConvolutionWeights::weight(std::size_t n, std::size_t k) const {
    return window_weight(n, n, k);
}

double ConvolutionWeights::window_weight(std::size_t n, std::size_t i,
                                         std::size_t k) const {
    if (n > n_max_ || i > n || k > i)
        throw std::invalid_argument("ConvolutionWeights: index out of range");
    if (n == 0 || i == 0) return 0.0;
    const std::size_t m = n - k;  // distance index of the panel right of node k
    double w = 0.0;
    if (k < i) w += left_[m];               // node k opens panel [t_k, t_{k+1}]
    if (k > 0) w += right_[m + 1];          // node k closes panel [t_{k-1}, t_k]
    return scale_ * w;
}

double ConvolutionWeights::rect_weight(std::size_t n, std::size_t k) const {
    if (n > n_max_ || k >= n)
        throw std::invalid_argument("ConvolutionWeights: rectangle index out of range");
    return scale_ * rect_[n - k];
}

double ConvolutionWeights::row_sum(std::size_t n) const {
    if (n > n_max_) throw std::invalid_argument("ConvolutionWeights: row out of range");
    if (!kernel_.tempered()) {
        const double a = kernel_.alpha();
        return scale_ * std::pow(static_cast<double>(n), a) / a;
    }
    double s = 0.0;
    for (std::size_t m = 1; m <= n; ++m) s += left_[m] + right_[m];
    return scale_ * s;
}

std::vector<Vec> convolve(const ConvolutionWeights& w,
                          const std::vector<Vec>& samples) {
    if (samples.size() < w.max_row() + 1)
        throw std::invalid_argument("convolve: need one sample per grid node");
    const std::size_t d = samples.empty() ? 0 : samples[0].size();
    for (const Vec& s : samples)
        if (s.size() != d) throw std::invalid_argument("convolve: ragged samples");
    std::vector<Vec> out(w.max_row() + 1, Vec(d, 0.0));
    for (std::size_t n = 1; n <= w.max_row(); ++n) {
        for (std::size_t k = 0; k <= n; ++k) {
            const double wk = w.weight(n, k);
            for (std::size_t c = 0; c < d; ++c) out[n][c] += wk * samples[k][c];
        }
    }
    return out;
}

namespace {

struct WeightKey {
    std::uint64_t alpha_bits, beta_bits, h_bits;
    std::size_t n;
    bool operator<(const WeightKey& o) const {
        return std::tie(alpha_bits, beta_bits, h_bits, n) <
               std::tie(o.alpha_bits, o.beta_bits, o.h_bits, o.n);
    }
};

std::uint64_t bits_of(double x) {
    std::uint64_t b;
    static_assert(sizeof(b) == sizeof(x));
    std::memcpy(&b, &x, sizeof(b));
    return b;
}

}  // namespace

std::shared_ptr<const ConvolutionWeights> conv_weights(const Kernel& k,
                                                       const UniformGrid& grid) {
    static std::mutex mu;
    static std::map<WeightKey, std::shared_ptr<const ConvolutionWeights>> cache;
    const WeightKey key{bits_of(k.alpha()), bits_of(k.beta()), bits_of(grid.h()),
                        grid.panels()};
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto w = std::make_shared<const ConvolutionWeights>(k, grid.h(), grid.panels());
    cache.emplace(key, w);
    return w;
}

std::shared_ptr<const ConvolutionWeights> conv_weights(FractionalOrder alpha,
                                                       const UniformGrid& grid) {
    return conv_weights(Kernel(alpha), grid);
}

}  // namespace caputo
