#pragma once

#include <functional>
#include <limits>
#include <string>

#include "shearlab/generators.hpp"

namespace shearlab {

// Truncation of the infinite sums and essential suprema. The xi grid is
// equidistributed in log radius over [1, 2^grid_octaves] on the pyramid axis
// with uniform slope sampling on the cross axes; j_max_sum exceeds the grid
// reach by enough scales that the recorded tail bound is a clean geometric
// estimate below the profile's 1/q' knee.
struct TruncationPolicy {
    int j_max_sum = 16;
    int lattice_radius = 4;
    int radial_points = 64;
    int slope_points = 64;
    double grid_octaves = 12.0;  // pyramid-axis log2 range
    int gamma_grid_shrink = 2;   // Gamma scans the grid coarsened by this factor

    void validate() const {
        if (j_max_sum < 8) throw precondition_error("policy: j_max_sum >= 8");
        if (lattice_radius < 4) throw precondition_error("policy: lattice_radius >= 4");
        if (radial_points < 8 || slope_points < 4) throw precondition_error("policy: grid too coarse");
        if (grid_octaves < 8.0) throw precondition_error("policy: grid must span >= 8 octaves");
    }
    TruncationPolicy refined(int factor) const {
        TruncationPolicy p = *this;
        p.radial_points *= factor;
        p.slope_points *= factor;
        return p;
    }
};

// Pyramid-axis grid for ess-inf/ess-sup over P (pair P frame, xi1 >= 1 half;
// the xi1 <= -1 half follows from evenness of |psi_hat|).
std::vector<Vec3> policy_grid(const TruncationPolicy& policy);

double c_gamma(double gamma);  // C(gamma) = 3 + 2/(gamma - 1)

// Riemann zeta for s > 1, truncated Dirichlet series with Euler-Maclaurin tail,
// absolute error < 1e-12.
double zeta(double s);

// Phi(xi, omega): scale/shear overlap sum, truncated at policy.j_max_sum.
double phi_overlap(const Vec3& xi, const Vec3& omega, const GeneratorTables& tabs,
                   const Anisotropy& alpha, const TruncationPolicy& policy);

struct SupResult {
    double value = 0.0;
    Vec3 arg{0, 0, 0};
};

// Gamma(omega) = sup over the policy grid (both P halves) of Phi(xi, omega).
SupResult gamma_sup(const Vec3& omega, const GeneratorTables& tabs, const Anisotropy& alpha,
                    const TruncationPolicy& policy, int threads = 0);

struct LBounds {
    double L_inf = 0.0;
    double L_sup = 0.0;
    Vec3 argmin{0, 0, 0};
    Vec3 argmax{0, 0, 0};
    bool extremum_on_radial_boundary = false;
};

LBounds l_bounds(const GeneratorTables& tabs, const Anisotropy& alpha,
                 const TruncationPolicy& policy, int threads = 0);

struct RcResult {
    double value = 0.0;
    double last_shell = 0.0;  // relative contribution of the last shell added
    int radius_used = 0;
};

// R(c) lattice cross-term sum over max-norm shells; shells are added until the
// last one contributes < 1e-6 relative (and at least policy.lattice_radius).
RcResult r_of_c(const LatticeConstants& c, const GeneratorTables& tabs, const Anisotropy& alpha,
                const TruncationPolicy& policy, int threads = 0);

// Prop 5.1 closed form (hypotheses delta > 1, gamma > 1/2).
double analytic_lsup_bound(const FeasibilityProfile& profile, const Anisotropy& alpha);

struct RcBound {
    double value = 0.0;
    double T1 = 0.0, T2 = 0.0, T3 = 0.0;
};

// Prop 5.2 closed form (hypotheses delta > 2 gamma > 6, c1 >= c2 > 0,
// 1 < gamma_prime < gamma - 2).
RcBound analytic_rc_bound(const LatticeConstants& c, const FeasibilityProfile& profile,
                          double gamma_prime);

struct CoveringResult {
    bool covered = false;
    double worst_margin = 0.0;  // min over grid of max_{j,k} |psi_hat|
    Vec3 worst_point{0, 0, 0};
};

CoveringResult covering_check(const GeneratorTables& tabs, double rho, const Anisotropy& alpha,
                              const TruncationPolicy& policy, int threads = 0);

struct FrameCertificate {
    double alpha = 2.0;
    LatticeConstants c;
    TruncationPolicy policy;
    std::string domain = "P";  // essential extrema domain (P; R3 per Cor-5.6 variant)

    LBounds grid;
    RcResult rc;
    double L_inf = 0.0, L_sup = 0.0, R_c = 0.0;

    FeasibilityProfile profile;
    double feas_constant = 1.0;      // fitted Cfit
    double analytic_Lsup_raw = 0.0;  // Eq (5.4) with implicit constant 1
    double analytic_Lsup = 0.0;      // folded: raw * Cfit^2
    RcBound analytic_Rc_parts;
    double analytic_Rc_raw = 0.0;
    double analytic_Rc = 0.0;
    double gamma_prime = 0.0;

    double det_Mc = 0.0;
    double lower = 0.0;  // (L_inf - R(c)) / det M_c
    double upper = 0.0;  // (L_sup + R(c)) / det M_c
    bool has_lower_bound = false;

    double j_tail_bound = 0.0;  // Appendix-A geometric tail of the j-sum

    double empirical_A = std::numeric_limits<double>::quiet_NaN();
    double empirical_B = std::numeric_limits<double>::quiet_NaN();

    std::string to_json() const;
};

// Thm 5.3 certificate assembly. gamma_prime <= 0 selects the midpoint of
// (1, gamma - 2). Throws precondition_error when the profile violates the
// Thm 5.3 hypothesis set (delta > 2 gamma > 6).
FrameCertificate frame_bound_interval(const GeneratorModel& gen, const Anisotropy& alpha,
                                      const LatticeConstants& c, const TruncationPolicy& policy,
                                      const FeasibilityProfile& profile, double gamma_prime = -1.0,
                                      int threads = 0);

// ---- empirical frame bounds over an abstract self-adjoint PSD operator ----

using LinearOp = std::function<void(const std::vector<double>&, std::vector<double>&)>;

struct EmpiricalBounds {
    double A = 0.0;
    double B = 0.0;
    int iters_B = 0;
    int iters_A = 0;
    bool converged = true;
};

// B by power iteration, A by inverse power iteration with CG solves; both
// stopped at relative change < tol. Deterministic given the seed.
EmpiricalBounds empirical_frame_bounds(const LinearOp& S, std::size_t dim, int iters, double tol,
                                       std::uint64_t seed,
                                       const LinearOp* preconditioner = nullptr);

}  // namespace shearlab
