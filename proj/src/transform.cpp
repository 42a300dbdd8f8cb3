#include "shearlab/transform.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "json.hpp"

#include "shearlab/fftw_util.hpp"

namespace shearlab {

namespace {

inline int ilog2(int n) {
    int p = 0;
    while ((1 << (p + 1)) <= n) ++p;
    return p;
}

inline int next_pow2(int e) {
    int p = 1;
    while (p < e) p <<= 1;
    return p;
}

// volume-axis order of (pyramid, cross-a, cross-b) per pair; k1 shears axis a,
// k2 shears axis b
inline std::array<int, 3> band_axes(PyramidPair pair) {
    switch (pair) {
        case PyramidPair::P:      return {0, 1, 2};
        case PyramidPair::PTilde: return {1, 0, 2};
        default:                  return {2, 0, 1};
    }
}

inline std::size_t vol_index(int xs, int ys, int zs, int n) {
    unsigned m = (unsigned)n - 1;
    return (std::size_t)((unsigned)xs & m) +
           (std::size_t)n * ((std::size_t)((unsigned)ys & m) +
                             (std::size_t)n * (std::size_t)((unsigned)zs & m));
}

}  // namespace

ShearletSystem::ShearletSystem(GeneratorModel gen, const Anisotropy& alpha,
                               const LatticeConstants& c, int n, SystemOptions opt, int threads)
    : gen_(std::move(gen)), alpha_(alpha), c_(c), n_(n), opt_(opt), threads_(threads) {
    Volume::validate_n(n);
    if (opt_.j_max < 0)
        opt_.j_max = (int)std::ceil((2.0 / alpha_.alpha) * (ilog2(n_) + 2));
    if (opt_.j_min < 0 || opt_.j_min > opt_.j_max)
        throw precondition_error("system: requires 0 <= j_min <= j_max");

    tabs_ = make_tables(gen_, opt_.support_eps);
    rows_jmax_ = opt_.j_max;
    axis_rows_.resize(3 * (std::size_t)(rows_jmax_ + 1));

    const int half = n_ / 2;
    for (PyramidPair pair : {PyramidPair::P, PyramidPair::PTilde, PyramidPair::PBreve}) {
        for (int j = opt_.j_min; j <= opt_.j_max; ++j) {
            AxisRow& row = axis_rows_[(std::size_t)pair * (rows_jmax_ + 1) + j];
            double sa = std::exp2(-0.5 * alpha_.alpha * j);
            for (int xp = -half; xp < half; ++xp) {
                double u1 = sa * xp;
                if (std::fabs(u1) > tabs_.axis_hi) continue;
                double v = tabs_.axis(u1);
                if (v == 0.0) continue;
                row.xp.push_back(xp);
                row.u1.push_back(u1);
                row.val.push_back(v);
            }
        }
    }

    const double det = c_.det();
    auto push_band = [&](BandPlan b) {
        b.offset = total_;
        b.count = (std::size_t)b.L[0] * b.L[1] * b.L[2];
        total_ += b.count;
        bands_.push_back(b);
    };

    if (opt_.include_lowpass) {
        BandPlan lp;
        lp.j = -1;
        int ext = 2 * (int)std::floor(tabs_.low_hi) + 1;
        int Lden = snapped_lattice_size(1.0 / c_.c1, n_);
        int L = std::max(1, std::min(Lden, next_pow2(ext)));
        lp.L = {L, L, L};
        lp.weight = std::sqrt((1.0 / (c_.c1 * c_.c1 * c_.c1)) / ((double)L * L * L));
        push_band(lp);
    }

    for (PyramidPair pair : {PyramidPair::P, PyramidPair::PTilde, PyramidPair::PBreve}) {
        if ((pair == PyramidPair::P && !opt_.pair_P) ||
            (pair == PyramidPair::PTilde && !opt_.pair_PTilde) ||
            (pair == PyramidPair::PBreve && !opt_.pair_PBreve))
            continue;
        for (int j = opt_.j_min; j <= opt_.j_max; ++j) {
            const AxisRow& row = axis_samples(pair, j);
            int K = shear_range(j, alpha_);

            // shared per-(pair, j) geometry
            double sc = std::exp2(-0.5 * j);
            double density_fast = std::exp2(0.5 * alpha_.alpha * j) / c_.c1;
            double density_slow = std::exp2(0.5 * j) / c_.c2;
            int Lden_fast = snapped_lattice_size(density_fast, n_);
            int Lden_slow = snapped_lattice_size(density_slow, n_);
            double density_vol = std::exp2(0.5 * (alpha_.alpha + 2.0) * j) / det;

            int plo = n_, phi = 0;
            for (int a : row.xp) {
                plo = std::min(plo, std::abs(a));
                phi = std::max(phi, std::abs(a));
            }
            bool empty = row.xp.empty();
            int ext_p = empty ? 1 : std::min({2 * phi + 1, n_ - 2 * plo + 1, n_});
            // cross boxes are centered on the shear (per-row frequency offset),
            // so their extent is the cross-profile width plus rounding slack
            int ext_c = 2 * (int)std::ceil(tabs_.cross_hi / sc + 0.5) + 1;
            int Lp = std::max(1, std::min({Lden_fast, next_pow2(ext_p), n_}));
            int Lc = std::max(1, std::min({Lden_slow, next_pow2(std::min(ext_c, n_)), n_}));

            auto axes = band_axes(pair);
            for (int k1 = -K; k1 <= K; ++k1) {
                for (int k2 = -K; k2 <= K; ++k2) {
                    BandPlan b;
                    b.pair = pair;
                    b.j = j;
                    b.k = {k1, k2};
                    std::array<int, 3> L{1, 1, 1};
                    if (!empty) {
                        L[axes[0]] = Lp;
                        L[axes[1]] = Lc;
                        L[axes[2]] = Lc;
                    }
                    b.L = L;
                    double lvol = (double)L[0] * L[1] * L[2];
                    b.weight = std::sqrt(density_vol / lvol);
                    push_band(b);
                }
            }
        }
    }
}

int ShearletSystem::band_index(PyramidPair pair, int j, std::array<int, 2> k) const {
    for (std::size_t i = 0; i < bands_.size(); ++i) {
        const BandPlan& b = bands_[i];
        if (b.pair == pair && b.j == j && b.k == k) return (int)i;
    }
    return -1;
}

std::string ShearletSystem::manifest_json() const {
    nlohmann::json j;
    j["grid_n"] = n_;
    j["alpha"] = alpha_.alpha;
    j["c1"] = c_.c1;
    j["c2"] = c_.c2;
    j["j_min"] = opt_.j_min;
    j["j_max"] = opt_.j_max;
    j["support_eps"] = opt_.support_eps;
    j["total_coefficients"] = total_;
    j["bands"] = nlohmann::json::array();
    for (const auto& b : bands_) {
        j["bands"].push_back({{"pair", (int)b.pair},
                              {"j", b.j},
                              {"k", {b.k[0], b.k[1]}},
                              {"L", {b.L[0], b.L[1], b.L[2]}},
                              {"weight", b.weight},
                              {"offset", b.offset}});
    }
    return j.dump();
}

// ---- band sample traversal ----

// Calls fn(volume_linear_index, box_linear_index, value) for every in-support
// digital frequency of the band. Deterministic traversal order.
struct BandTraverse {
    template <class F>
    static void run(const ShearletSystem& sys, const BandPlan& b, const GeneratorTables& tabs,
                    F&& fn) {
        const int n = sys.grid_n();
        const int half = n / 2;
        if (b.j < 0) {  // low-pass: small cube around 0
            int r = std::min(half - 1, (int)std::floor(tabs.low_hi));
            auto& low = tabs.low;
            for (int z = -r; z <= r; ++z) {
                double vz = low((double)z);
                if (vz == 0.0) continue;
                for (int y = -r; y <= r; ++y) {
                    double vy = low((double)y);
                    if (vy == 0.0) continue;
                    double vyz = vy * vz;
                    for (int x = -r; x <= r; ++x) {
                        double v = low((double)x) * vyz;
                        if (v == 0.0) continue;
                        std::size_t vi = vol_index(x, y, z, n);
                        std::size_t bi =
                            (std::size_t)((unsigned)x & (unsigned)(b.L[0] - 1)) +
                            (std::size_t)b.L[0] *
                                ((std::size_t)((unsigned)y & (unsigned)(b.L[1] - 1)) +
                                 (std::size_t)b.L[1] *
                                     (std::size_t)((unsigned)z & (unsigned)(b.L[2] - 1)));
                        fn(vi, bi, v);
                    }
                }
            }
            return;
        }

        const auto& row = sys.axis_samples(b.pair, b.j);
        const auto axes = band_axes(b.pair);
        const double sc = std::exp2(-0.5 * b.j);
        const double ch = tabs.cross_hi;
        const double norm = std::exp2(-0.25 * (sys.alpha().alpha + 2.0) * b.j);
        const auto& cross = tabs.cross;

        const unsigned m0 = (unsigned)(b.L[0] - 1), m1 = (unsigned)(b.L[1] - 1),
                       m2 = (unsigned)(b.L[2] - 1);
        const std::size_t s1 = (std::size_t)b.L[0], s2 = (std::size_t)b.L[0] * b.L[1];

        std::array<int, 3> xi{};   // signed frequency, volume axes
        std::array<int, 3> off{};  // per-row shear-centering offsets, volume axes
        const int ap = axes[0], aa = axes[1], ab = axes[2];

        // Shear-centering offset for the box periodization (digital sheared
        // lattice). Keyed on the row sign, floor(x+1/2)-based: translation
        // equivariance in integer shifts gives the exact shear covariance,
        // oddness across mirrored rows keeps the boxes Hermitian so real
        // coefficients lose nothing.
        auto shear_offset = [&](int k, double u1_sub, int row_sign) -> int {
            double x = (double)k * u1_sub / sc;
            if (row_sign > 0) return (int)std::floor(x + 0.5);
            return -(int)std::floor(-x + 0.5);
        };
        // Cross-axis sample value; the Nyquist plane t = -n/2 is its own
        // mirror and takes the average of the two aliased readings.
        auto cval = [&](int t, int k, double u1_sub) -> double {
            double v = cross(sc * t - (double)k * u1_sub);
            if (t == -half) v = 0.5 * (v + cross(-sc * t - (double)k * u1_sub));
            return v;
        };

        for (std::size_t i = 0; i < row.xp.size(); ++i) {
            xi[ap] = row.xp[i];
            // The pyramid-axis Nyquist row is likewise its own mirror: it
            // splits into two half-weight sub-rows with u1 = +-|u1| so the
            // digital atom stays real-even on the torus.
            const int nsub = (xi[ap] == -half) ? 2 : 1;
            for (int sub = 0; sub < nsub; ++sub) {
                double u1 = row.u1[i];
                double v1 = row.val[i] * norm;
                int row_sign = xi[ap] > 0 ? 1 : -1;
                if (nsub == 2) {
                    v1 *= 0.5;
                    u1 = sub == 0 ? std::fabs(row.u1[i]) : -std::fabs(row.u1[i]);
                    row_sign = sub == 0 ? 1 : -1;
                }
                off[ap] = 0;
                off[aa] = shear_offset(b.k[0], u1, row_sign);
                off[ab] = shear_offset(b.k[1], u1, row_sign);
                // windows: | sc * t - k * u1 | <= ch, clamped to the signed
                // range; a window reaching +n/2 contributes through the
                // Nyquist plane bin instead
                auto window = [&](int k, int& lo, int& hi, bool& add_nyq) {
                    double cmid = (double)k * u1;
                    int lo_u = (int)std::ceil((cmid - ch) / sc - 1e-12);
                    int hi_u = (int)std::floor((cmid + ch) / sc + 1e-12);
                    add_nyq = hi_u >= half && lo_u > -half;
                    lo = std::max(lo_u, -half);
                    hi = std::min(hi_u, half - 1);
                };
                int alo, ahi, blo, bhi;
                bool nyq_a, nyq_b;
                window(b.k[0], alo, ahi, nyq_a);
                window(b.k[1], blo, bhi, nyq_b);
                bool a_any = alo <= ahi || nyq_a;
                bool b_any = blo <= bhi || nyq_b;
                if (!a_any || !b_any) continue;

                auto emit_b = [&](int xb, double vb) {
                    if (vb == 0.0) return;
                    double v1b = v1 * vb;
                    xi[ab] = xb;
                    auto emit_a = [&](int xa, double va) {
                        if (va == 0.0) return;
                        xi[aa] = xa;
                        std::size_t vi = vol_index(xi[0], xi[1], xi[2], n);
                        std::size_t bi = (std::size_t)((unsigned)(xi[0] - off[0]) & m0) +
                                         s1 * (std::size_t)((unsigned)(xi[1] - off[1]) & m1) +
                                         s2 * (std::size_t)((unsigned)(xi[2] - off[2]) & m2);
                        fn(vi, bi, v1b * va);
                    };
                    for (int xa = alo; xa <= ahi; ++xa) emit_a(xa, cval(xa, b.k[0], u1));
                    if (nyq_a) emit_a(-half, cval(-half, b.k[0], u1));
                };
                for (int xb = blo; xb <= bhi; ++xb) emit_b(xb, cval(xb, b.k[1], u1));
                if (nyq_b) emit_b(-half, cval(-half, b.k[1], u1));
            }
        }
    }
};

CoefficientSet Transform::analyze(const Volume& f) const {
    if (f.n != sys_.grid_n()) throw precondition_error("analyze: volume grid mismatch");
    const int n = sys_.grid_n();
    const std::size_t nv = f.size();
    auto& fft = FftPlanCache::instance();

    std::vector<cplx> fhat(nv);
    {
        FftBuffer buf(nv);
        for (std::size_t i = 0; i < nv; ++i) buf.data()[i] = f.data[i];
        fft.execute({n, n, n}, FFTW_FORWARD, buf.data());
        double inv = 1.0 / (double)nv;
        for (std::size_t i = 0; i < nv; ++i) fhat[i] = buf.data()[i] * inv;
    }

    CoefficientSet out;
    out.system = &sys_;
    out.values.assign(sys_.coefficient_count(), 0.0);
    const auto& bands = sys_.bands();
    const auto& tabs = sys_.tables();

    parallel_for(bands.size(), sys_.threads(), [&](std::size_t bi) {
        const BandPlan& b = bands[bi];
        FftBuffer box(b.count);
        std::memset(box.data(), 0, b.count * sizeof(cplx));
        BandTraverse::run(sys_, b, tabs, [&](std::size_t vi, std::size_t ci, double v) {
            box.data()[ci] += fhat[vi] * v;
        });
        fft.execute({b.L[2], b.L[1], b.L[0]}, FFTW_BACKWARD, box.data());
        double* dst = out.values.data() + b.offset;
        for (std::size_t i = 0; i < b.count; ++i) dst[i] = box.data()[i].real() * b.weight;
    });
    return out;
}

Volume Transform::synthesize(const CoefficientSet& c) const {
    if (c.system != &sys_ || c.values.size() != sys_.coefficient_count())
        throw precondition_error("synthesize: coefficient set does not match system");
    const int n = sys_.grid_n();
    const std::size_t nv = (std::size_t)n * n * n;
    auto& fft = FftPlanCache::instance();
    const auto& bands = sys_.bands();
    const auto& tabs = sys_.tables();

    // fixed virtual chunks keep the accumulation order independent of the
    // thread count
    const int chunks = 8;
    std::vector<std::vector<cplx>> acc((std::size_t)chunks);
    parallel_for((std::size_t)chunks, sys_.threads(), [&](std::size_t ch) {
        auto& shat = acc[ch];
        shat.assign(nv, cplx(0.0, 0.0));
        FftBuffer box;
        for (std::size_t bi = ch; bi < bands.size(); bi += chunks) {
            const BandPlan& b = bands[bi];
            box.resize(b.count);
            const double* src = c.values.data() + b.offset;
            for (std::size_t i = 0; i < b.count; ++i) box.data()[i] = src[i];
            fft.execute({b.L[2], b.L[1], b.L[0]}, FFTW_FORWARD, box.data());
            const double w = b.weight;
            BandTraverse::run(sys_, b, tabs, [&](std::size_t vi, std::size_t ci, double v) {
                shat[vi] += box.data()[ci] * (v * w);
            });
        }
    });

    FftBuffer full(nv);
    std::memset(full.data(), 0, nv * sizeof(cplx));
    for (int ch = 0; ch < chunks; ++ch)
        for (std::size_t i = 0; i < nv; ++i) full.data()[i] += acc[(std::size_t)ch][i];
    fft.execute({n, n, n}, FFTW_BACKWARD, full.data());
    Volume out(n);
    for (std::size_t i = 0; i < nv; ++i) out.data[i] = full.data()[i].real();
    return out;
}

// Fused synthesize(analyze(f)): per band gather -> inverse box FFT -> real
// projection -> forward box FFT -> scatter with weight^2; no coefficient
// storage. Chunked accumulation keeps summation order fixed.
Volume Transform::frame_operator_apply(const Volume& f) const {
    if (f.n != sys_.grid_n()) throw precondition_error("frame operator: volume grid mismatch");
    const int n = sys_.grid_n();
    const std::size_t nv = f.size();
    auto& fft = FftPlanCache::instance();
    const auto& bands = sys_.bands();
    const auto& tabs = sys_.tables();

    std::vector<cplx> fhat(nv);
    {
        FftBuffer buf(nv);
        for (std::size_t i = 0; i < nv; ++i) buf.data()[i] = f.data[i];
        fft.execute({n, n, n}, FFTW_FORWARD, buf.data());
        double inv = 1.0 / (double)nv;
        for (std::size_t i = 0; i < nv; ++i) fhat[i] = buf.data()[i] * inv;
    }

    const int chunks = 8;
    std::vector<std::vector<cplx>> acc((std::size_t)chunks);
    parallel_for((std::size_t)chunks, sys_.threads(), [&](std::size_t ch) {
        auto& shat = acc[ch];
        shat.assign(nv, cplx(0.0, 0.0));
        FftBuffer box;
        for (std::size_t bi = ch; bi < bands.size(); bi += chunks) {
            const BandPlan& b = bands[bi];
            box.resize(b.count);
            std::memset(box.data(), 0, b.count * sizeof(cplx));
            BandTraverse::run(sys_, b, tabs, [&](std::size_t vi, std::size_t ci, double v) {
                box.data()[ci] += fhat[vi] * v;
            });
            fft.execute({b.L[2], b.L[1], b.L[0]}, FFTW_BACKWARD, box.data());
            for (std::size_t i = 0; i < b.count; ++i)
                box.data()[i] = cplx(box.data()[i].real(), 0.0);
            fft.execute({b.L[2], b.L[1], b.L[0]}, FFTW_FORWARD, box.data());
            const double w2 = b.weight * b.weight;
            BandTraverse::run(sys_, b, tabs, [&](std::size_t vi, std::size_t ci, double v) {
                shat[vi] += box.data()[ci] * (v * w2);
            });
        }
    });

    FftBuffer full(nv);
    std::memset(full.data(), 0, nv * sizeof(cplx));
    for (int ch = 0; ch < chunks; ++ch)
        for (std::size_t i = 0; i < nv; ++i) full.data()[i] += acc[(std::size_t)ch][i];
    fft.execute({n, n, n}, FFTW_BACKWARD, full.data());
    Volume out(n);
    for (std::size_t i = 0; i < nv; ++i) out.data[i] = full.data()[i].real();
    return out;
}

const std::vector<double>& ShearletSystem::frame_diag() const {
    if (diag_.empty()) {
        diag_.assign((std::size_t)n_ * n_ * n_, 0.0);
        for (const auto& b : bands_) {
            double w2l = b.weight * b.weight * (double)b.count;
            BandTraverse::run(*this, b, tabs_, [&](std::size_t vi, std::size_t, double v) {
                diag_[vi] += w2l * v * v;
            });
        }
    }
    return diag_;
}

Transform::CgResult Transform::dual_reconstruct(const CoefficientSet& c, double tol, int max_iter,
                                                const Volume* warm_start) const {
    if (sys_.lower_bound && *sys_.lower_bound <= 0.0)
        throw precondition_error("dual_reconstruct: system has no positive lower frame bound");
    const int n = sys_.grid_n();
    const std::size_t nv = (std::size_t)n * n * n;
    Volume b = synthesize(c);

    // diagonal frequency preconditioner, clipped below
    const auto& diag = sys_.frame_diag();
    double dmax = 0.0;
    for (double v : diag) dmax = std::max(dmax, v);
    double floor_v = dmax * 1e-6;
    if (sys_.lower_bound && *sys_.lower_bound > 0.0)
        floor_v = std::max(floor_v, 0.5 * *sys_.lower_bound);
    auto& fft = FftPlanCache::instance();
    auto precond = [&](const Volume& r) {
        FftBuffer buf(nv);
        for (std::size_t i = 0; i < nv; ++i) buf.data()[i] = r.data[i];
        fft.execute({n, n, n}, FFTW_FORWARD, buf.data());
        for (std::size_t i = 0; i < nv; ++i) buf.data()[i] /= std::max(diag[i], floor_v);
        fft.execute({n, n, n}, FFTW_BACKWARD, buf.data());
        Volume out(n);
        double inv = 1.0 / (double)nv;
        for (std::size_t i = 0; i < nv; ++i) out.data[i] = buf.data()[i].real() * inv;
        return out;
    };

    auto vdot = [](const Volume& a, const Volume& bb) {
        double s = 0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a.data[i] * bb.data[i];
        return s;
    };

    CgResult res;
    res.x = warm_start ? *warm_start : Volume(n);
    double bn = std::sqrt(vdot(b, b));
    if (bn == 0.0) {
        res.x = Volume(n);
        return res;
    }
    Volume r = b;
    if (warm_start) {
        Volume sx = frame_operator_apply(res.x);
        for (std::size_t i = 0; i < nv; ++i) r.data[i] -= sx.data[i];
    }
    Volume z = precond(r);
    Volume p = z;
    double rz = vdot(r, z);
    double rn = std::sqrt(vdot(r, r));
    res.residual_history.push_back(rn / bn);
    for (int it = 1; it <= max_iter; ++it) {
        Volume sp = frame_operator_apply(p);
        double pap = vdot(p, sp);
        if (pap <= 0.0) throw convergence_error("dual_reconstruct: frame operator not SPD");
        double a = rz / pap;
        for (std::size_t i = 0; i < nv; ++i) {
            res.x.data[i] += a * p.data[i];
            r.data[i] -= a * sp.data[i];
        }
        rn = std::sqrt(vdot(r, r));
        res.iterations = it;
        res.relative_residual = rn / bn;
        res.residual_history.push_back(res.relative_residual);
        if (res.relative_residual <= tol) return res;
        z = precond(r);
        double rz2 = vdot(r, z);
        double beta = rz2 / rz;
        rz = rz2;
        for (std::size_t i = 0; i < nv; ++i) p.data[i] = z.data[i] + beta * p.data[i];
    }
    std::string hist;
    for (double h : res.residual_history) hist += " " + std::to_string(h);
    throw convergence_error("dual_reconstruct: CG did not reach tolerance; residuals:" + hist);
}

std::vector<double> Transform::band_function(PyramidPair pair, int j,
                                             std::array<int, 2> k) const {
    const int n = sys_.grid_n();
    std::vector<double> out((std::size_t)n * n * n, 0.0);
    BandPlan b;
    b.pair = pair;
    b.j = j;
    b.k = k;
    b.L = {n, n, n};
    b.count = out.size();
    // accumulate: Nyquist sub-rows may emit the same bin twice
    BandTraverse::run(sys_, b, sys_.tables(),
                      [&](std::size_t vi, std::size_t, double v) { out[vi] += v; });
    return out;
}

LinearOp full_frame_operator_op(const ShearletSystem& sys) {
    auto t = std::make_shared<Transform>(sys);
    int n = sys.grid_n();
    return [t, n](const std::vector<double>& x, std::vector<double>& y) {
        Volume f(n);
        f.data = x;
        Volume s = t->frame_operator_apply(f);
        y = std::move(s.data);
    };
}

Volume project_pyramid_mask(const Volume& f, PyramidPair pair) {
    const int n = f.n;
    const std::size_t nv = f.size();
    auto& fft = FftPlanCache::instance();
    FftBuffer buf(nv);
    for (std::size_t i = 0; i < nv; ++i) buf.data()[i] = f.data[i];
    fft.execute({n, n, n}, FFTW_FORWARD, buf.data());
    const int half = n / 2;
    auto in_pair = [&](int x, int y, int z) {
        Vec3 xi{(double)x, (double)y, (double)z};
        Vec3 mxi{-xi[0], -xi[1], -xi[2]};
        auto id = classify_frequency(xi);
        if (id != PyramidId::CenterCube && pair_of(id) == pair) return true;
        auto mid = classify_frequency(mxi);
        return mid != PyramidId::CenterCube && pair_of(mid) == pair;
    };
    for (int z = -half; z < half; ++z)
        for (int y = -half; y < half; ++y)
            for (int x = -half; x < half; ++x)
                if (!in_pair(x, y, z)) buf.data()[vol_index(x, y, z, n)] = 0.0;
    fft.execute({n, n, n}, FFTW_BACKWARD, buf.data());
    Volume out(n);
    double inv = 1.0 / (double)nv;
    for (std::size_t i = 0; i < nv; ++i) out.data[i] = buf.data()[i].real() * inv;
    return out;
}

LinearOp pyramid_subsystem_op(const ShearletSystem& sys_pair_only) {
    auto t = std::make_shared<Transform>(sys_pair_only);
    int n = sys_pair_only.grid_n();
    return [t, n](const std::vector<double>& x, std::vector<double>& y) {
        Volume f(n);
        f.data = x;
        Volume pf = project_pyramid_mask(f, PyramidPair::P);
        Volume s = t->frame_operator_apply(pf);
        Volume ps = project_pyramid_mask(s, PyramidPair::P);
        y = std::move(ps.data);
    };
}

Volume random_volume(int n, std::uint64_t seed) {
    Volume v(n);
    std::mt19937_64 rng(seed);
    for (auto& x : v.data) x = normal_sample(rng);
    return v;
}

void write_coefficients(const std::string& dir, const CoefficientSet& c,
                        const std::string& config_hash) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    const auto& bands = c.system->bands();
    for (std::size_t i = 0; i < bands.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof name, "/band_%05zu.f64", i);
        std::ofstream raw(dir + name, std::ios::binary);
        if (!raw) throw io_error("cannot write coefficient band file");
        raw.write(reinterpret_cast<const char*>(c.band_data(bands[i])),
                  (std::streamsize)(bands[i].count * sizeof(double)));
    }
    nlohmann::json j = nlohmann::json::parse(c.system->manifest_json());
    j["config_hash"] = config_hash;
    std::ofstream mf(dir + "/manifest.json");
    if (!mf) throw io_error("cannot write coefficient manifest");
    mf << j.dump(2) << "\n";
}

}  // namespace shearlab
