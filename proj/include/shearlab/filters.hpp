#pragma once

#include <vector>

#include "shearlab/common.hpp"

namespace shearlab {

// Parameters of the maximally-flat filter pair. Named Lfilt to avoid the
// collision with the surface patch count L.
struct FilterDesign {
    int K = 15;
    int Lfilt = 10;

    void validate() const {
        if (Lfilt < 10 || 2 * K < 3 * Lfilt || K > 3 * Lfilt - 2)
            throw precondition_error(
                "filter design requires Lfilt >= 10 and 3*Lfilt/2 <= K <= 3*Lfilt - 2");
    }
};

// |m0(x)|^2 = cos^{2K}(pi x) * sum_{n<Lfilt} C(K-1+n, n) sin^{2n}(pi x), and the
// mirror |m1(x)|^2 = |m0(x + 1/2)|^2. Binomial weights are exact integers; the
// magnitude response is normalized by its supremum when it exceeds 1 so that
// |m0| <= 1 keeps the infinite product for phi_hat bounded.
class FilterPair {
  public:
    explicit FilterPair(FilterDesign d);

    double m0_sq(double x) const;          // 1-periodic
    double m1_sq(double x) const { return m0_sq(x + 0.5); }
    double m0(double x) const { return std::sqrt(m0_sq(x)); }  // zero-phase branch
    double m1(double x) const { return std::sqrt(m1_sq(x)); }

    double normalization() const { return norm_; }  // sup of the raw |m0|^2
    const FilterDesign& design() const { return design_; }

  private:
    FilterDesign design_;
    std::vector<double> coeff_;  // C(K-1+n, n), exact in double for the valid range
    double norm_ = 1.0;
};

// Truncated scaling-function transform: prod_{i=0}^{J-1} m0(2^{-i} x), with the
// tail bound |1 - m0(2^{-i}x)| <= c_quad (2^{-i}|x|)^2 from the fitted local
// quadratic of m0 at 0.
struct ScalingFunctionHat {
    const FilterPair* filter = nullptr;
    int j_phi = 24;
    double quad_coeff = 0.0;  // fitted c_quad

    double operator()(double x) const;
    double tail_bound(double x) const;  // truncation error estimate at x
};

ScalingFunctionHat make_scaling_function(const FilterPair& f, int j_phi);

// The Thm-5.4-style shearlet in frequency: m1(4 x1) phi(x1) phi(2 x2) phi(2 x3).
double shearlet_hat_axis(const FilterPair& f, const ScalingFunctionHat& phi, double x1);

// Fast 1D lookup tables (linear interpolation) for the hot loops. The direct
// evaluators stay the source of truth; tables are build-time sampled from them.
class Profile1D {
  public:
    Profile1D() = default;
    // symmetric even profile on [-range, range]
    Profile1D(std::function<double(double)> f, double range, int samples_per_unit);

    double operator()(double x) const {
        double ax = std::fabs(x);
        if (ax >= range_) return 0.0;
        double t = ax * inv_step_;
        std::size_t i = (std::size_t)t;
        double w = t - (double)i;
        return tab_[i] * (1.0 - w) + tab_[i + 1] * w;
    }
    double range() const { return range_; }
    // Largest |x| with |f| >= eps * max|f|; 0 if the profile is identically 0.
    double support_radius(double eps) const;
    double max_abs() const { return max_abs_; }

  private:
    std::vector<double> tab_;
    double range_ = 0.0;
    double inv_step_ = 0.0;
    double max_abs_ = 0.0;
};

}  // namespace shearlab
