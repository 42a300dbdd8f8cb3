#pragma once

#include <memory>
#include <optional>

#include "shearlab/frame_analysis.hpp"
#include "shearlab/generators.hpp"
#include "shearlab/volume.hpp"

namespace shearlab {

// One analysis band: a (pair, j, k) shearlet atom family on a snapped
// coefficient lattice, or the low-pass family (j < 0 marks it). The box L is a
// per-axis power of two: the smaller of the snapped continuum lattice density
// and the band's occupied frequency extent. Cross-axis periodization is
// centered on the shear per pyramid-axis row (the digital form of the sheared
// translation lattice (S_k A)^{-1} M_c Z^3), which keeps the boxes narrow. The
// density-compensation weight sqrt(density / box volume) pins the frame
// operator's frequency diagonal to the continuum Calderon sum.
struct BandPlan {
    PyramidPair pair = PyramidPair::P;
    int j = -1;  // -1: low-pass
    std::array<int, 2> k{0, 0};
    std::array<int, 3> L{1, 1, 1};  // coefficient box, volume-axis order
    double weight = 1.0;
    std::size_t offset = 0;  // position in the packed coefficient vector
    std::size_t count = 0;   // L[0] L[1] L[2]
};

struct SystemOptions {
    int j_min = 0;
    int j_max = -1;  // -1: Nyquist default ceil((2/alpha)(log2 n + 2))
    bool include_lowpass = true;
    bool pair_P = true, pair_PTilde = true, pair_PBreve = true;
    double support_eps = 3e-4;
};

// Digital realization of SH(phi, psi, psi~, psi'; c, alpha) on an n^3 grid:
// analytic Fourier-domain band sampling, per-band periodization onto the
// snapped lattice, small inverse FFTs.
class ShearletSystem {
  public:
    ShearletSystem(GeneratorModel gen, const Anisotropy& alpha, const LatticeConstants& c, int n,
                   SystemOptions opt = {}, int threads = 0);

    const std::vector<BandPlan>& bands() const { return bands_; }
    std::size_t coefficient_count() const { return total_; }
    int grid_n() const { return n_; }
    const Anisotropy& alpha() const { return alpha_; }
    const LatticeConstants& lattice() const { return c_; }
    const GeneratorModel& generator() const { return gen_; }
    const SystemOptions& options() const { return opt_; }
    int threads() const { return threads_; }

    // recorded lower frame bound (from a certificate or empirical run); gates
    // dual reconstruction
    std::optional<double> lower_bound;

    int band_index(PyramidPair pair, int j, std::array<int, 2> k) const;  // -1 if absent

    std::string manifest_json() const;

    const GeneratorTables& tables() const { return tabs_; }

    // per (pair, j): in-support pyramid-axis samples (signed frequency,
    // warped coordinate, axis-profile value); shared across shears
    struct AxisRow {
        std::vector<int> xp;
        std::vector<double> u1;
        std::vector<double> val;
    };
    const AxisRow& axis_samples(PyramidPair pair, int j) const {
        return axis_rows_[(std::size_t)pair * (rows_jmax_ + 1) + j];
    }

    // frame-operator frequency diagonal sum_b w^2 |L| band^2 (lazy; first call
    // is not thread-safe)
    const std::vector<double>& frame_diag() const;

  private:
    GeneratorModel gen_;
    GeneratorTables tabs_;
    Anisotropy alpha_;
    LatticeConstants c_;
    int n_;
    SystemOptions opt_;
    int threads_;
    std::vector<BandPlan> bands_;
    std::size_t total_ = 0;
    std::vector<AxisRow> axis_rows_;  // indexed pair * (j_max+1) + j
    int rows_jmax_ = 0;
    mutable std::vector<double> diag_;
};

// Packed per-band real coefficients.
struct CoefficientSet {
    const ShearletSystem* system = nullptr;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double* band_data(const BandPlan& b) { return values.data() + b.offset; }
    const double* band_data(const BandPlan& b) const { return values.data() + b.offset; }
};

class Transform {
  public:
    explicit Transform(const ShearletSystem& sys) : sys_(sys) {}

    CoefficientSet analyze(const Volume& f) const;
    Volume synthesize(const CoefficientSet& c) const;
    Volume frame_operator_apply(const Volume& f) const;

    struct CgResult {
        Volume x;
        int iterations = 0;
        double relative_residual = 0.0;
        std::vector<double> residual_history;
    };
    // Canonical-dual reconstruction: solve S x = synthesize(c) by CG with the
    // diagonal frequency preconditioner. Throws convergence_error (carrying
    // the residual history in the message) when max_iter is exhausted.
    CgResult dual_reconstruct(const CoefficientSet& c, double tol = 1e-6, int max_iter = 200,
                              const Volume* warm_start = nullptr) const;

    // Analytic frequency samples of one atom's response (real-valued,
    // full-grid layout) with the 2^{-j(alpha+2)/4} normalization.
    std::vector<double> band_function(PyramidPair pair, int j, std::array<int, 2> k) const;

  private:
    const ShearletSystem& sys_;
};

// Frame-operator linear maps for empirical bound estimation.
LinearOp full_frame_operator_op(const ShearletSystem& sys);
// Restriction of the pair-P subsystem to volumes with spectrum on the digital
// pyramid-P mask (mask symmetrized under negation so real volumes stay inside).
LinearOp pyramid_subsystem_op(const ShearletSystem& sys_pair_only);
Volume project_pyramid_mask(const Volume& f, PyramidPair pair);
Volume random_volume(int n, std::uint64_t seed);

// Coefficient export: one raw array per band plus a manifest document.
void write_coefficients(const std::string& dir, const CoefficientSet& c,
                        const std::string& config_hash);

}  // namespace shearlab
