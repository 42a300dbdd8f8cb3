#include "shearlab/frame_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "json.hpp"

namespace shearlab {

double c_gamma(double gamma) {
    if (!(gamma > 1.0)) throw precondition_error("C(gamma) requires gamma > 1");
    return 3.0 + 2.0 / (gamma - 1.0);
}

double zeta(double s) {
    if (!(s > 1.0)) throw precondition_error("zeta evaluated for s > 1 only");
    const int N = 24;
    double sum = 0.0;
    for (int n = 1; n < N; ++n) sum += std::pow((double)n, -s);
    double Ns = std::pow((double)N, -s);
    sum += 0.5 * Ns + (double)N * Ns / (s - 1.0);
    // Euler-Maclaurin correction terms: B_{2k}/(2k)! * s(s+1)..(s+2k-2) * N^{-s-2k+1}
    static const double b2k_over_fact[] = {1.0 / 12, -1.0 / 720, 1.0 / 30240, -1.0 / 1209600,
                                           1.0 / 47900160, -691.0 / 1307674368000.0};
    double rising = s;             // s (s+1) ... (s+2k-2), accumulated
    double npow = Ns / (double)N;  // N^{-s-2k+1}, starting at k = 1
    for (int k = 1; k <= 6; ++k) {
        sum += b2k_over_fact[k - 1] * rising * npow;
        rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
        npow /= (double)N * (double)N;
    }
    return sum;
}

std::vector<Vec3> policy_grid(const TruncationPolicy& policy) {
    policy.validate();
    std::vector<Vec3> g;
    g.reserve((std::size_t)policy.radial_points * policy.slope_points * policy.slope_points);
    for (int i = 0; i < policy.radial_points; ++i) {
        double t = std::exp2(policy.grid_octaves * (double)i / (double)(policy.radial_points - 1));
        for (int a = 0; a < policy.slope_points; ++a) {
            double s2 = -1.0 + 2.0 * (double)a / (double)(policy.slope_points - 1);
            for (int b = 0; b < policy.slope_points; ++b) {
                double s3 = -1.0 + 2.0 * (double)b / (double)(policy.slope_points - 1);
                g.push_back({t, s2 * t, s3 * t});
            }
        }
    }
    return g;
}

// One inner sum of Phi over a single shear axis: sum_k |cross(u)| |cross(u + w)|
// with u = c - k d, k in [-K, K]. The window of k with both factors inside the
// cross-profile support is solved in closed form.
static double shear_axis_sum(double c, double d, double w, int K, const Profile1D& cross,
                             double rc) {
    if (std::fabs(d) < 1e-300) {
        double v = std::fabs(cross(c) * cross(c + w));
        return v * (double)(2 * K + 1);
    }
    double lo = -rc, hi = rc;                      // need u in [-rc, rc]
    double lo2 = -w - rc, hi2 = -w + rc;           // and u + w in [-rc, rc]
    lo = std::max(lo, lo2);
    hi = std::min(hi, hi2);
    if (lo > hi) return 0.0;
    // u = c - k d  =>  k in [(c - hi)/d, (c - lo)/d] (orientation by sign of d)
    double k1 = (c - hi) / d, k2 = (c - lo) / d;
    if (k1 > k2) std::swap(k1, k2);
    int ka = std::max(-K, (int)std::ceil(k1 - 1e-12));
    int kb = std::min(K, (int)std::floor(k2 + 1e-12));
    double acc = 0.0;
    for (int k = ka; k <= kb; ++k) {
        double u = c - (double)k * d;
        acc += std::fabs(cross(u) * cross(u + w));
    }
    return acc;
}

double phi_overlap(const Vec3& xi, const Vec3& omega, const GeneratorTables& tabs,
                   const Anisotropy& alpha, const TruncationPolicy& policy) {
    const double rc = tabs.cross.range();
    const double ra = tabs.axis.range();
    double total = 0.0;
    for (int j = 0; j <= policy.j_max_sum; ++j) {
        double sa = std::exp2(-0.5 * alpha.alpha * j);
        double sc = std::exp2(-0.5 * j);
        double u1 = sa * xi[0];
        if (std::fabs(u1) > ra && std::fabs(u1 + omega[0]) > ra) continue;
        double b = std::fabs(tabs.axis(u1) * tabs.axis(u1 + omega[0]));
        if (b == 0.0) continue;
        int K = shear_range(j, alpha);
        double a1 = shear_axis_sum(sc * xi[1], u1, omega[1], K, tabs.cross, rc);
        if (a1 == 0.0) continue;
        double a2 = shear_axis_sum(sc * xi[2], u1, omega[2], K, tabs.cross, rc);
        total += b * a1 * a2;
    }
    return total;
}

SupResult gamma_sup(const Vec3& omega, const GeneratorTables& tabs, const Anisotropy& alpha,
                    const TruncationPolicy& policy, int threads) {
    TruncationPolicy p = policy;
    if (policy.gamma_grid_shrink > 1) {
        p.radial_points = std::max(8, policy.radial_points / policy.gamma_grid_shrink);
        p.slope_points = std::max(4, policy.slope_points / policy.gamma_grid_shrink);
    }
    auto grid = policy_grid(p);
    std::vector<double> best(grid.size());
    std::vector<int> sign(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        // both halves of P via Phi(xi, +-omega)
        double vp = phi_overlap(grid[i], omega, tabs, alpha, p);
        Vec3 no{-omega[0], -omega[1], -omega[2]};
        double vn = phi_overlap(grid[i], no, tabs, alpha, p);
        best[i] = std::max(vp, vn);
        sign[i] = vp >= vn ? 1 : -1;
    });
    SupResult r;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (best[i] > r.value) {
            r.value = best[i];
            r.arg = grid[i];
            if (sign[i] < 0) r.arg = {-grid[i][0], -grid[i][1], -grid[i][2]};
        }
    }
    return r;
}

LBounds l_bounds(const GeneratorTables& tabs, const Anisotropy& alpha,
                 const TruncationPolicy& policy, int threads) {
    auto grid = policy_grid(policy);
    std::vector<double> vals(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        vals[i] = phi_overlap(grid[i], {0, 0, 0}, tabs, alpha, policy);
    });
    LBounds lb;
    lb.L_inf = std::numeric_limits<double>::infinity();
    std::size_t imin = 0, imax = 0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (vals[i] < lb.L_inf) { lb.L_inf = vals[i]; imin = i; }
        if (vals[i] > lb.L_sup) { lb.L_sup = vals[i]; imax = i; }
    }
    lb.argmin = grid[imin];
    lb.argmax = grid[imax];
    double t_hi = std::exp2(policy.grid_octaves);
    for (std::size_t i : {imin, imax}) {
        double t = grid[i][0];
        if (t <= 1.0 + 1e-9 || t >= t_hi * (1.0 - 1e-9)) lb.extremum_on_radial_boundary = true;
    }
    return lb;
}

RcResult r_of_c(const LatticeConstants& c, const GeneratorTables& tabs, const Anisotropy& alpha,
                const TruncationPolicy& policy, int threads) {
    RcResult res;
    std::map<std::array<int, 3>, double> cache;
    auto gamma_of = [&](std::array<int, 3> m) {
        // Gamma(omega) = Gamma(-omega) by evenness of the profiles; cache on a
        // canonical sign.
        std::array<int, 3> key = m;
        for (int i = 0; i < 3; ++i) {
            if (key[i] != 0) {
                if (key[i] < 0)
                    for (auto& v : key) v = -v;
                break;
            }
        }
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        Vec3 omega{key[0] / c.c1, key[1] / c.c2, key[2] / c.c2};
        double g = gamma_sup(omega, tabs, alpha, policy, threads).value;
        cache[key] = g;
        return g;
    };

    const int hard_cap = std::max(policy.lattice_radius * 4, 12);
    double total = 0.0;
    for (int radius = 1; radius <= hard_cap; ++radius) {
        double shell = 0.0;
        for (int m1 = -radius; m1 <= radius; ++m1)
            for (int m2 = -radius; m2 <= radius; ++m2)
                for (int m3 = -radius; m3 <= radius; ++m3) {
                    if (std::max({std::abs(m1), std::abs(m2), std::abs(m3)}) != radius) continue;
                    double gp = gamma_of({m1, m2, m3});
                    double gn = gamma_of({-m1, -m2, -m3});
                    shell += std::sqrt(gp * gn);
                }
        total += shell;
        res.radius_used = radius;
        res.last_shell = total > 0 ? shell / total : 0.0;
        if (radius >= policy.lattice_radius && (total == 0.0 || shell < 1e-6 * total)) break;
    }
    res.value = total;
    return res;
}

double analytic_lsup_bound(const FeasibilityProfile& profile, const Anisotropy& alpha) {
    profile.validate();
    if (!(profile.delta > 1.0 && profile.gamma > 0.5))
        throw precondition_error("Prop 5.1 requires delta > 1 and gamma > 1/2");
    double a = alpha.alpha;
    double c2g = c_gamma(2.0 * profile.gamma);
    double geo = 1.0 / (1.0 - std::exp2((-profile.delta + 1.0) * a));
    double logq = std::ceil((2.0 / a) * std::log2(profile.q / profile.q_prime));
    return (profile.q * profile.q / (profile.r * profile.s)) * c2g * c2g * (geo + logq + 1.0);
}

RcBound analytic_rc_bound(const LatticeConstants& c, const FeasibilityProfile& profile,
                          double gamma_prime) {
    profile.validate();
    const double g = profile.gamma, d = profile.delta;
    if (!(d > 2.0 * g && 2.0 * g > 6.0))
        throw precondition_error("Prop 5.2 requires delta > 2 gamma > 6");
    if (!(gamma_prime > 1.0 && gamma_prime < g - 2.0))
        throw precondition_error("Prop 5.2 requires 1 < gamma' < gamma - 2");
    const double q = profile.q, qp = profile.q_prime, r = profile.r, s = profile.s;
    const double pref = q * q / (r * s);
    const double logq = std::ceil(std::log2(q / qp));
    const double e1 = 1.0 / (1.0 - std::exp2(-d + 2.0 * g));
    const double e2 = 1.0 / (1.0 - std::exp2(-g));
    const double e3 = 1.0 / (1.0 - std::exp2(-d + g + gamma_prime));
    const double e4 = 1.0 / (1.0 - std::exp2(-gamma_prime));

    RcBound b;
    b.T1 = pref * sq(c_gamma(g)) * std::pow(2.0 * c.c1 / qp, g) * (logq + e1 + e2);
    b.T2 = pref * c_gamma(g) * c_gamma(gamma_prime) *
           std::pow(2.0 * q * c.c2 / (qp * std::min(r, s)), g - gamma_prime) *
           (2.0 * logq + e1 + e2 + e3 + e4);
    b.T3 = pref * sq(c_gamma(g)) * std::pow(2.0 * c.c1 / qp, g) * e2;

    double mfac = std::min(std::ceil(c.c1 / c.c2), 2.0);
    b.value = b.T1 * (8.0 * zeta(g - 2.0) - 4.0 * zeta(g - 1.0) + 2.0 * zeta(g)) +
              3.0 * mfac * b.T2 * (16.0 * zeta(g - 2.0) - 4.0 * zeta(g - 1.0)) +
              b.T3 * (24.0 * zeta(g - 2.0) + 2.0 * zeta(g));
    return b;
}

CoveringResult covering_check(const GeneratorTables& tabs, double rho, const Anisotropy& alpha,
                              const TruncationPolicy& policy, int threads) {
    if (!(rho > 0)) throw precondition_error("covering_check requires rho > 0");
    auto grid = policy_grid(policy);
    const double rc = tabs.cross.range();
    const double ra = tabs.axis.range();
    std::vector<double> best(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        const Vec3& xi = grid[i];
        double bestv = 0.0;
        for (int j = 0; j <= policy.j_max_sum; ++j) {
            double u1 = std::exp2(-0.5 * alpha.alpha * j) * xi[0];
            if (std::fabs(u1) > ra) continue;
            double b = std::fabs(tabs.axis(u1));
            if (b == 0.0) continue;
            double sc = std::exp2(-0.5 * j);
            int K = shear_range(j, alpha);
            // best |cross| over admissible k per axis
            auto axis_best = [&](double cc) {
                double v = 0.0;
                double d = u1;
                if (std::fabs(d) < 1e-300) return std::fabs(tabs.cross(cc));
                double k1 = (cc - rc) / d, k2 = (cc + rc) / d;
                if (k1 > k2) std::swap(k1, k2);
                int ka = std::max(-K, (int)std::ceil(k1 - 1e-12));
                int kb = std::min(K, (int)std::floor(k2 + 1e-12));
                for (int k = ka; k <= kb; ++k) v = std::max(v, std::fabs(tabs.cross(cc - k * d)));
                return v;
            };
            double v = b * axis_best(sc * xi[1]) * axis_best(sc * xi[2]);
            bestv = std::max(bestv, v);
        }
        best[i] = bestv;
    });
    CoveringResult r;
    r.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (best[i] < r.worst_margin) {
            r.worst_margin = best[i];
            r.worst_point = grid[i];
        }
    }
    r.covered = r.worst_margin > rho;
    return r;
}

FrameCertificate frame_bound_interval(const GeneratorModel& gen, const Anisotropy& alpha,
                                      const LatticeConstants& c, const TruncationPolicy& policy,
                                      const FeasibilityProfile& profile, double gamma_prime,
                                      int threads) {
    policy.validate();
    if (!(profile.delta > 2.0 * profile.gamma && profile.gamma > 3.0))
        throw precondition_error("Thm 5.3 certificate requires delta > 2 gamma > 6");
    FrameCertificate cert;
    cert.alpha = alpha.alpha;
    cert.c = c;
    cert.policy = policy;
    cert.profile = profile;
    cert.gamma_prime = gamma_prime > 0 ? gamma_prime : 1.0 + 0.5 * (profile.gamma - 3.0);

    auto tabs = make_tables(gen);
    cert.grid = l_bounds(tabs, alpha, policy, threads);
    cert.L_inf = cert.grid.L_inf;
    cert.L_sup = cert.grid.L_sup;
    cert.rc = r_of_c(c, tabs, alpha, policy, threads);
    cert.R_c = cert.rc.value;

    auto feas = verify_feasibility(gen, profile,
                                   feasibility_grid(32, 1.0 / 64, std::exp2(policy.grid_octaves)));
    // observed sup of |psi_hat| / bound across calibration and holdout
    cert.feas_constant =
        feas.fitted_constant * std::max(1.0, feas.worst_ratio * 1.05);
    if (cert.feas_constant <= 0.0) cert.feas_constant = 1.0;

    cert.analytic_Lsup_raw = analytic_lsup_bound(profile, alpha);
    cert.analytic_Lsup = cert.analytic_Lsup_raw * sq(cert.feas_constant);
    cert.analytic_Rc_parts = analytic_rc_bound(c, profile, cert.gamma_prime);
    cert.analytic_Rc_raw = cert.analytic_Rc_parts.value;
    cert.analytic_Rc = cert.analytic_Rc_raw * sq(cert.feas_constant);

    cert.det_Mc = c.det();
    cert.lower = (cert.L_inf - cert.R_c) / cert.det_Mc;
    cert.upper = (cert.L_sup + cert.R_c) / cert.det_Mc;
    cert.has_lower_bound = cert.R_c < cert.L_inf;

    // Appendix-A geometric tail of the truncated j-sum at the worst grid point:
    // beyond the cutoff, |q' u1| < 1 and each term is bounded through the
    // fitted profile by (q u1)^{2 delta}; the ratio per scale is 2^{-delta a}.
    {
        double a = alpha.alpha;
        double u_cut = std::exp2(policy.grid_octaves - 0.5 * a * (policy.j_max_sum + 1));
        double qu = std::min(1.0, std::pow(profile.q * u_cut, 2.0 * profile.delta));
        double kfac = sq(profile.q / std::min(profile.r, profile.s) * c_gamma(2.0 * profile.gamma));
        cert.j_tail_bound =
            sq(cert.feas_constant) * kfac * qu / (1.0 - std::exp2(-profile.delta * a));
    }
    return cert;
}

std::string FrameCertificate::to_json() const {
    nlohmann::json j;
    j["alpha"] = alpha;
    j["c1"] = c.c1;
    j["c2"] = c.c2;
    j["domain"] = domain;
    j["L_inf"] = L_inf;
    j["L_sup"] = L_sup;
    j["R_c"] = R_c;
    j["R_c_last_shell_rel"] = rc.last_shell;
    j["R_c_radius"] = rc.radius_used;
    j["argmin"] = {grid.argmin[0], grid.argmin[1], grid.argmin[2]};
    j["argmax"] = {grid.argmax[0], grid.argmax[1], grid.argmax[2]};
    j["extremum_on_radial_boundary"] = grid.extremum_on_radial_boundary;
    j["feasibility"] = {{"delta", profile.delta}, {"gamma", profile.gamma},
                        {"q", profile.q},         {"q_prime", profile.q_prime},
                        {"r", profile.r},         {"s", profile.s}};
    j["feas_constant"] = feas_constant;
    j["analytic_Lsup_raw"] = analytic_Lsup_raw;
    j["analytic_Lsup"] = analytic_Lsup;
    j["analytic_Rc_raw"] = analytic_Rc_raw;
    j["analytic_Rc"] = analytic_Rc;
    j["T1"] = analytic_Rc_parts.T1;
    j["T2"] = analytic_Rc_parts.T2;
    j["T3"] = analytic_Rc_parts.T3;
    j["gamma_prime"] = gamma_prime;
    j["det_Mc"] = det_Mc;
    j["lower"] = lower;
    j["upper"] = upper;
    j["has_lower_bound"] = has_lower_bound;
    j["j_tail_bound"] = j_tail_bound;
    j["policy"] = {{"j_max_sum", policy.j_max_sum},
                   {"lattice_radius", policy.lattice_radius},
                   {"radial_points", policy.radial_points},
                   {"slope_points", policy.slope_points},
                   {"grid_octaves", policy.grid_octaves},
                   {"gamma_grid_shrink", policy.gamma_grid_shrink}};
    if (std::isfinite(empirical_A)) {
        j["empirical_A"] = empirical_A;
        j["empirical_B"] = empirical_B;
    }
    return j.dump(2);
}

// ---- empirical bounds ----

static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

static double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// CG solve S x = b; returns iterations used, -1 on non-convergence.
static int cg_solve(const LinearOp& S, const std::vector<double>& b, std::vector<double>& x,
                    double tol, int max_iter, const LinearOp* M) {
    std::size_t n = b.size();
    x.assign(n, 0.0);
    std::vector<double> r = b, z(n), p(n), sp(n);
    double bn = norm2(b);
    if (bn == 0.0) return 0;
    if (M) (*M)(r, z); else z = r;
    p = z;
    double rz = dot(r, z);
    for (int it = 1; it <= max_iter; ++it) {
        S(p, sp);
        double pAp = dot(p, sp);
        if (pAp <= 0.0) throw convergence_error("CG: operator not positive definite");
        double a = rz / pAp;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += a * p[i];
            r[i] -= a * sp[i];
        }
        if (norm2(r) <= tol * bn) return it;
        if (M) (*M)(r, z); else z = r;
        double rz2 = dot(r, z);
        double beta = rz2 / rz;
        rz = rz2;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    return -1;
}

EmpiricalBounds empirical_frame_bounds(const LinearOp& S, std::size_t dim, int iters, double tol,
                                       std::uint64_t seed, const LinearOp* preconditioner) {
    EmpiricalBounds out;
    std::mt19937_64 rng(seed);
    std::vector<double> x(dim), y(dim);
    for (auto& v : x) v = normal_sample(rng);
    double nx = norm2(x);
    for (auto& v : x) v /= nx;

    // power iteration for B
    double lam = 0.0, prev = 0.0;
    for (int it = 1; it <= iters; ++it) {
        S(x, y);
        lam = dot(x, y);
        double ny = norm2(y);
        if (ny == 0.0) { lam = 0.0; break; }
        for (std::size_t i = 0; i < dim; ++i) x[i] = y[i] / ny;
        out.iters_B = it;
        if (it > 2 && std::fabs(lam - prev) <= tol * std::fabs(lam)) break;
        prev = lam;
    }
    out.B = lam;
    if (out.iters_B >= iters) out.converged = false;

    // inverse power iteration for A
    for (auto& v : x) v = normal_sample(rng);
    nx = norm2(x);
    for (auto& v : x) v /= nx;
    double mu = 0.0;
    prev = 0.0;
    for (int it = 1; it <= iters; ++it) {
        int cg = cg_solve(S, x, y, 1e-8, 400, preconditioner);
        if (cg < 0) throw convergence_error("empirical bounds: CG failed to converge");
        double ny = norm2(y);
        if (ny == 0.0) throw convergence_error("empirical bounds: inverse iteration collapsed");
        mu = dot(x, y);  // Rayleigh quotient of S^{-1}
        for (std::size_t i = 0; i < dim; ++i) x[i] = y[i] / ny;
        out.iters_A = it;
        if (it > 2 && std::fabs(mu - prev) <= tol * std::fabs(mu)) break;
        prev = mu;
    }
    out.A = mu > 0 ? 1.0 / mu : 0.0;
    if (out.iters_A >= iters) out.converged = false;
    return out;
}

}  // namespace shearlab
