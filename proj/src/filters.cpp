#include "shearlab/filters.hpp"

#include <cmath>

namespace shearlab {

FilterPair::FilterPair(FilterDesign d) : design_(d) {
    d.validate();
    // C(K-1+n, n) built by the recurrence C_n = C_{n-1} * (K-1+n)/n, exact in
    // 64-bit integers for the admissible (K, Lfilt) range.
    coeff_.resize((std::size_t)d.Lfilt);
    unsigned long long c = 1;
    coeff_[0] = 1.0;
    for (int n = 1; n < d.Lfilt; ++n) {
        c = c * (unsigned long long)(d.K - 1 + n) / (unsigned long long)n;
        coeff_[(std::size_t)n] = (double)c;
    }
    norm_ = 1.0;
    double sup = 0.0;
    const int grid = 1 << 14;
    for (int i = 0; i <= grid; ++i) sup = std::max(sup, m0_sq((double)i / grid));
    // renormalize only on a real exceedance, not floating-point noise, so that
    // |m0(0)|^2 stays exactly 1
    if (sup > 1.0 + 1e-9) norm_ = sup;
}

double FilterPair::m0_sq(double x) const {
    double s = sq(std::sin(M_PI * x));
    double c = 1.0 - s;
    // Horner over the binomial sum in s
    double acc = 0.0;
    for (std::size_t n = coeff_.size(); n-- > 0;) acc = acc * s + coeff_[n];
    double v = std::pow(c, (double)design_.K) * acc / norm_;
    return v < 0.0 ? 0.0 : v;
}

double ScalingFunctionHat::operator()(double x) const {
    double p = 1.0;
    for (int i = 0; i < j_phi; ++i) {
        p *= filter->m0(std::ldexp(x, -i));
        if (p == 0.0) return 0.0;
    }
    return p;
}

double ScalingFunctionHat::tail_bound(double x) const {
    // sum_{i >= j_phi} c_quad (2^{-i} x)^2, geometric in 4^{-i}
    double t = std::ldexp(std::fabs(x), -j_phi);
    return quad_coeff * t * t / (1.0 - 0.25);
}

ScalingFunctionHat make_scaling_function(const FilterPair& f, int j_phi) {
    if (j_phi < 16) throw precondition_error("scaling function truncation requires J_phi >= 16");
    ScalingFunctionHat phi;
    phi.filter = &f;
    phi.j_phi = j_phi;
    // fit |1 - m0(t)| ~ c t^2 near 0
    double c = 0.0;
    for (double t : {1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512})
        c = std::max(c, std::fabs(1.0 - f.m0(t)) / (t * t));
    phi.quad_coeff = c;
    return phi;
}

double shearlet_hat_axis(const FilterPair& f, const ScalingFunctionHat& phi, double x1) {
    return f.m1(4.0 * x1) * phi(x1);
}

Profile1D::Profile1D(std::function<double(double)> f, double range, int samples_per_unit) {
    range_ = range;
    std::size_t n = (std::size_t)std::ceil(range * samples_per_unit);
    inv_step_ = (double)n / range;
    tab_.resize(n + 2);
    for (std::size_t i = 0; i <= n; ++i) {
        tab_[i] = f((double)i / inv_step_);
        max_abs_ = std::max(max_abs_, std::fabs(tab_[i]));
    }
    tab_[n + 1] = 0.0;
}

double Profile1D::support_radius(double eps) const {
    double cut = eps * max_abs_;
    if (max_abs_ == 0.0) return 0.0;
    for (std::size_t i = tab_.size() - 1; i-- > 0;) {
        if (std::fabs(tab_[i]) >= cut) return (double)(i + 1) / inv_step_;
    }
    return 0.0;
}

}  // namespace shearlab
