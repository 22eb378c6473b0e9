#pragma once
// The weakly singular convolution kernel a(t,s) = (t-s)^(alpha-1)/Gamma(alpha)
// (optionally tempered by exp(-beta(t-s))), its closed-form window masses, and
// product-integration quadrature on uniform grids.

#include <cstddef>
#include <memory>

#include "caputo/common.hpp"

namespace caputo {

class Kernel {
public:
    explicit Kernel(FractionalOrder alpha, double beta = 0.0)
        : alpha_(alpha), beta_(beta) {
        if (!(beta >= 0.0) || !std::isfinite(beta))
            throw std::domain_error("Kernel: beta must be >= 0 and finite");
    }
    double alpha() const { return alpha_.value(); }
    FractionalOrder order() const { return alpha_; }
    double beta() const { return beta_; }
    bool tempered() const { return beta_ > 0.0; }
    // a(t,s), weakly singular as s -> t.
    double operator()(double t, double s) const;

private:
    FractionalOrder alpha_;
    double beta_;
};

double kernel_eval(const Kernel& k, double t, double s);

// Exact value of int_0^tau a(tau+theta, s) ds = ((tau+theta)^a - theta^a)/(a Gamma(a)).
double kernel_mass(FractionalOrder alpha, double tau, double theta);

class UniformGrid {
public:
    // n panels of width h; nodes t_j = j*h for j = 0..n.
    UniformGrid(double h, std::size_t n) : h_(h), n_(n) {
        if (!(h > 0.0) || !std::isfinite(h))
            throw std::domain_error("UniformGrid: step must be positive and finite");
        if (n < 1) throw std::domain_error("UniformGrid: need at least one panel");
    }
    double h() const { return h_; }
    std::size_t panels() const { return n_; }
    std::size_t nodes() const { return n_ + 1; }
    double t(std::size_t j) const { return h_ * static_cast<double>(j); }
    double horizon() const { return h_ * static_cast<double>(n_); }
    bool operator==(const UniformGrid& o) const { return h_ == o.h_ && n_ == o.n_; }

private:
    double h_;
    std::size_t n_;
};

// Index of the grid node nearest to time x, requiring x to be grid-aligned.
std::size_t aligned_index(const UniformGrid& g, double x, const char* what);

// Product-trapezoidal weights: for each row n, w_{n,k} integrates the kernel
// a(t_n - s) exactly against the piecewise-linear interpolant of the samples.
// Stored as the two O(N) panel-piece arrays the rows are assembled from.
class ConvolutionWeights {
public:
    ConvolutionWeights(const Kernel& k, double h, std::size_t n_max);

    double alpha() const { return kernel_.alpha(); }
    double beta() const { return kernel_.beta(); }
    double h() const { return h_; }
    std::size_t max_row() const { return n_max_; }

    // w_{n,k} for int_0^{t_n} a(t_n-s) phi(s) ds, 0 <= k <= n <= n_max.
    double weight(std::size_t n, std::size_t k) const;
    // Window variant: weights for int_0^{t_i} a(t_n-s) phi(s) ds with i <= n
    // (phi interpolated over [0, t_i] only); k ranges over 0..i.
    double window_weight(std::size_t n, std::size_t i, std::size_t k) const;
    // Product-rectangle (left endpoint) weight used by the predictor, k < n.
    double rect_weight(std::size_t n, std::size_t k) const;
    // Closed-form row sum t_n^alpha/(alpha Gamma(alpha)) for beta = 0;
    // telescoped panel sum in the tempered case.
    double row_sum(std::size_t n) const;

private:
    Kernel kernel_;
    double h_;
    std::size_t n_max_;
    double scale_;        // h^alpha / Gamma(alpha)
    Vec left_, right_;    // panel pieces l(m), r(m), m = 1..n_max
    Vec rect_;            // rectangle pieces A(m)/alpha, m = 1..n_max
};

// Shared, cached weight tables keyed by the exact bits of (alpha, beta, h, N).
std::shared_ptr<const ConvolutionWeights> conv_weights(const Kernel& k,
                                                       const UniformGrid& grid);
std::shared_ptr<const ConvolutionWeights> conv_weights(FractionalOrder alpha,
                                                       const UniformGrid& grid);

// Discrete convolution: out_j = sum_k w_{j,k} samples_k for j = 0..N, where
// samples holds N+1 stacked ℝ^d values (row-major, dim doubles per node).
std::vector<Vec> convolve(const ConvolutionWeights& w,
                          const std::vector<Vec>& samples);

}  // namespace caputo
