#pragma once

#include <functional>
#include <memory>
#include <string>

#include "shearlab/filters.hpp"
#include "shearlab/geometry.hpp"

namespace shearlab {

enum class GeneratorKind { filter_based, separable };

struct FeasibilityProfile {
    double delta = 8.5;
    double gamma = 4.0;
    double q = 8.0;
    double q_prime = 8.0;
    double r = 2.0;
    double s = 2.0;
    double fit_residual = 0.0;

    void validate() const {
        if (!(delta > 0 && gamma > 0)) throw precondition_error("feasibility: delta, gamma > 0");
        if (!(q >= q_prime && q_prime > 0 && q >= r && r > 0 && q >= s && s > 0))
            throw precondition_error("feasibility: requires q >= q' > 0, q >= r > 0, q >= s > 0");
        if (!(fit_residual >= 0)) throw precondition_error("feasibility: fit_residual >= 0");
    }
    // The four-factor decay bound evaluated at xi (implicit constant 1).
    double bound(const Vec3& xi) const;
};

// Fourier-domain generator. All profiles are real (zero-phase): the magnitude
// |m0|^2 fixes only |m0|, and every frame quantity sees the generator through
// |psi_hat|, so we take the nonnegative square root. In the P frame
//   psi_hat(u) = axis(u1) * cross(u2) * cross(u3),
// and the other pyramid generators are coordinate permutations of psi
// (psi~(x1,x2,x3) = psi(x2,x1,x3), psi'(x1,x2,x3) = psi(x3,x2,x1)).
class GeneratorModel {
  public:
    static GeneratorModel filter_based(FilterDesign design, int j_phi = 24);
    static GeneratorModel separable(std::function<double(double)> eta_hat,
                                    std::function<double(double)> phi_hat_1d);

    GeneratorKind kind() const { return kind_; }
    int j_phi() const { return j_phi_; }
    double normalization() const;  // sup of raw |m0|^2 (1 when already bounded)

    double axis_factor(double t) const { return axis_(t); }
    double cross_factor(double t) const { return cross_(t); }
    double lowpass_factor(double t) const { return low_(t); }

    // psi_hat in the frame of the given pair; pure coordinate permutation.
    double psi_hat(PyramidPair pair, const Vec3& xi) const;
    double psi_hat(const Vec3& xi) const { return psi_hat(PyramidPair::P, xi); }
    // full low-pass phi(x1)phi(x2)phi(x3) in frequency
    double lowpass_hat(const Vec3& xi) const { return low_(xi[0]) * low_(xi[1]) * low_(xi[2]); }

    double phi_truncation_tail(double x) const;  // truncation error estimate

    const FilterPair* filter() const { return filter_.get(); }

    std::string descriptor_json(const FeasibilityProfile* profile = nullptr) const;

  private:
    GeneratorKind kind_ = GeneratorKind::filter_based;
    std::shared_ptr<FilterPair> filter_;
    std::shared_ptr<ScalingFunctionHat> phi_;
    std::function<double(double)> axis_, cross_, low_;
    int j_phi_ = 24;
};

// Sampled 1D profiles + support radii for hot loops.
struct GeneratorTables {
    Profile1D axis, cross, low;
    double axis_lo = 0.0;   // inner edge of the axis lobe (vanishing-moment side)
    double axis_hi = 0.0;   // outer support radius
    double cross_hi = 0.0;
    double low_hi = 0.0;
};

GeneratorTables make_tables(const GeneratorModel& gen, double support_eps = 3e-4,
                            int samples_per_unit = 4096);

struct FeasibilityReport {
    bool passes = false;
    double fitted_constant = 0.0;  // max ratio on the calibration half
    double worst_ratio = 0.0;      // max |psi_hat| / (C * bound) on the holdout half
    Vec3 worst_point{0, 0, 0};
};

// Log-spaced symmetric grid; even indices calibrate, odd indices hold out.
std::vector<Vec3> feasibility_grid(int per_axis, double lo, double hi);

FeasibilityReport verify_feasibility(const GeneratorModel& gen, const FeasibilityProfile& profile,
                                     const std::vector<Vec3>& grid, double fit_slack = 0.05);

// Least-squares slope of log|psi_hat(t,0,0)| vs log t, t in [2^-12, 2^-6].
double vanishing_moment_order(const GeneratorModel& gen);

}  // namespace shearlab
