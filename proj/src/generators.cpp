#include "shearlab/generators.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace shearlab {

double FeasibilityProfile::bound(const Vec3& xi) const {
    auto m = [](double v) { return std::min(1.0, v); };
    double b = m(std::pow(std::fabs(q * xi[0]), delta));
    b *= m(std::pow(std::fabs(q_prime * xi[0]), -gamma));
    b *= m(std::pow(std::fabs(r * xi[1]), -gamma));
    b *= m(std::pow(std::fabs(s * xi[2]), -gamma));
    return b;
}

GeneratorModel GeneratorModel::filter_based(FilterDesign design, int j_phi) {
    GeneratorModel g;
    g.kind_ = GeneratorKind::filter_based;
    g.filter_ = std::make_shared<FilterPair>(design);
    g.phi_ = std::make_shared<ScalingFunctionHat>(make_scaling_function(*g.filter_, j_phi));
    g.j_phi_ = j_phi;
    auto filt = g.filter_;
    auto phi = g.phi_;
    g.axis_ = [filt, phi](double t) { return filt->m1(4.0 * t) * (*phi)(t); };
    g.cross_ = [phi](double t) { return (*phi)(2.0 * t); };
    g.low_ = [phi](double t) { return (*phi)(t); };
    return g;
}

GeneratorModel GeneratorModel::separable(std::function<double(double)> eta_hat,
                                         std::function<double(double)> phi_hat_1d) {
    GeneratorModel g;
    g.kind_ = GeneratorKind::separable;
    g.axis_ = std::move(eta_hat);
    g.cross_ = phi_hat_1d;
    g.low_ = std::move(phi_hat_1d);
    return g;
}

double GeneratorModel::normalization() const {
    return filter_ ? filter_->normalization() : 1.0;
}

double GeneratorModel::psi_hat(PyramidPair pair, const Vec3& xi) const {
    switch (pair) {
        case PyramidPair::P:      return axis_(xi[0]) * cross_(xi[1]) * cross_(xi[2]);
        case PyramidPair::PTilde: return axis_(xi[1]) * cross_(xi[0]) * cross_(xi[2]);
        case PyramidPair::PBreve: return axis_(xi[2]) * cross_(xi[1]) * cross_(xi[0]);
    }
    return 0.0;
}

double GeneratorModel::phi_truncation_tail(double x) const {
    return phi_ ? phi_->tail_bound(x) : 0.0;
}

std::string GeneratorModel::descriptor_json(const FeasibilityProfile* profile) const {
    nlohmann::json j;
    j["kind"] = kind_ == GeneratorKind::filter_based ? "filter_based" : "separable";
    if (filter_) {
        j["K"] = filter_->design().K;
        j["Lfilt"] = filter_->design().Lfilt;
        j["normalization"] = filter_->normalization();
    }
    j["J_phi"] = j_phi_;
    if (profile) {
        j["feasibility"] = {{"delta", profile->delta}, {"gamma", profile->gamma},
                            {"q", profile->q},         {"q_prime", profile->q_prime},
                            {"r", profile->r},         {"s", profile->s},
                            {"fit_residual", profile->fit_residual}};
    }
    return j.dump(2);
}

GeneratorTables make_tables(const GeneratorModel& gen, double support_eps, int samples_per_unit) {
    GeneratorTables t;
    t.axis = Profile1D([&](double x) { return gen.axis_factor(x); }, 16.0, samples_per_unit);
    t.cross = Profile1D([&](double x) { return gen.cross_factor(x); }, 16.0, samples_per_unit);
    t.low = Profile1D([&](double x) { return gen.lowpass_factor(x); }, 16.0, samples_per_unit);
    t.axis_hi = t.axis.support_radius(support_eps);
    t.cross_hi = t.cross.support_radius(support_eps);
    t.low_hi = t.low.support_radius(support_eps);
    // inner edge of the axis lobe
    double cut = support_eps * t.axis.max_abs();
    double lo = 0.0;
    for (double x = 0.0; x < t.axis_hi; x += 1.0 / samples_per_unit) {
        if (std::fabs(t.axis(x)) >= cut) { lo = x; break; }
    }
    t.axis_lo = lo;
    return t;
}

std::vector<Vec3> feasibility_grid(int per_axis, double lo, double hi) {
    if (per_axis < 2) throw precondition_error("feasibility grid needs >= 2 points per axis");
    std::vector<double> ax;
    int half = per_axis / 2;
    for (int i = 0; i < half; ++i) {
        double t = lo * std::pow(hi / lo, double(i) / double(half - 1));
        ax.push_back(t);
        ax.push_back(-t);
    }
    std::sort(ax.begin(), ax.end());
    std::vector<Vec3> grid;
    grid.reserve(ax.size() * ax.size() * ax.size());
    for (double x : ax)
        for (double y : ax)
            for (double z : ax) grid.push_back({x, y, z});
    return grid;
}

// Radial log-ring index of a grid point (grid steps from the innermost ring).
// Calibration and holdout interleave by ring parity, with the outermost ring
// always held out: a fitted constant must transfer outward, which is what a
// profile with overstated decay cannot do.
static int ring_index(const Vec3& p, double lo, double step) {
    double m = std::max({std::fabs(p[0]), std::fabs(p[1]), std::fabs(p[2])});
    return (int)std::lround(std::log(m / lo) / std::log(step));
}

FeasibilityReport verify_feasibility(const GeneratorModel& gen, const FeasibilityProfile& profile,
                                     const std::vector<Vec3>& grid, double fit_slack) {
    profile.validate();
    if (grid.empty()) throw precondition_error("feasibility grid must be nonempty");
    FeasibilityReport rep;
    double lo = 1e300, hi = 0.0;
    for (const auto& p : grid) {
        for (double v : p) {
            double a = std::fabs(v);
            if (a > 0) { lo = std::min(lo, a); hi = std::max(hi, a); }
        }
    }
    int rings = 1;
    double step = 2.0;
    if (hi > lo) {
        // infer per-axis ring count from the distinct magnitudes present
        std::vector<double> mags;
        for (const auto& p : grid)
            for (double v : p)
                if (v > 0) mags.push_back(v);
        std::sort(mags.begin(), mags.end());
        mags.erase(std::unique(mags.begin(), mags.end(),
                               [](double a, double b) { return std::fabs(a - b) < 1e-12 * b; }),
                   mags.end());
        rings = (int)mags.size();
        step = rings > 1 ? std::pow(hi / lo, 1.0 / double(rings - 1)) : 2.0;
    }
    const int outer = rings - 1;
    auto is_holdout = [&](const Vec3& p) {
        return (outer - ring_index(p, lo, step)) % 2 == 0;
    };

    double cal = 0.0;
    for (const auto& p : grid) {
        if (is_holdout(p)) continue;
        double b = profile.bound(p);
        if (b <= 0.0) continue;
        cal = std::max(cal, std::fabs(gen.psi_hat(p)) / b);
    }
    rep.fitted_constant = cal;
    if (cal == 0.0) {  // zero generator: passes with worst_ratio 0
        rep.passes = true;
        return rep;
    }
    double denom = cal * (1.0 + fit_slack);
    double worst = 0.0;
    Vec3 wp{0, 0, 0};
    for (const auto& p : grid) {
        if (!is_holdout(p)) continue;
        double b = profile.bound(p);
        if (b <= 0.0) continue;
        double ratio = std::fabs(gen.psi_hat(p)) / (denom * b);
        if (ratio > worst) { worst = ratio; wp = p; }
    }
    rep.worst_ratio = worst;
    rep.worst_point = wp;
    rep.passes = worst <= 1.0;
    return rep;
}

double vanishing_moment_order(const GeneratorModel& gen) {
    std::vector<double> lx, ly;
    for (int i = 0; i <= 48; ++i) {
        double t = std::exp2(-12.0 + 6.0 * i / 48.0);
        double v = std::fabs(gen.psi_hat({t, 0.0, 0.0}));
        if (v > 0.0) { lx.push_back(std::log(t)); ly.push_back(std::log(v)); }
    }
    if (lx.size() < 8) throw convergence_error("degenerate vanishing-moment fit: psi_hat vanishes on probe set");
    double n = (double)lx.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace shearlab
