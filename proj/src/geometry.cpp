#include "shearlab/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace shearlab {

Mat3 scaling_matrix(int j, const Anisotropy& alpha, PyramidPair pair) {
    if (j < 0) throw precondition_error("scaling_matrix requires j >= 0");
    double fast = std::exp2(0.5 * alpha.alpha * j);
    double slow = std::exp2(0.5 * j);
    Vec3 d{slow, slow, slow};
    d[pyramid_axis(pair)] = fast;
    return Mat3::diag(d[0], d[1], d[2]);
}

Mat3 shear_matrix(std::array<int, 2> k, PyramidPair pair) {
    Mat3 m = Mat3::identity();
    int r = pyramid_axis(pair);
    // the two non-pyramid axes, in ascending order
    int a = (r == 0) ? 1 : 0;
    int b = (r == 2) ? 1 : 2;
    m(r, a) = (double)k[0];
    m(r, b) = (double)k[1];
    return m;
}

PyramidId classify_frequency(const Vec3& xi) {
    const double ax = std::fabs(xi[0]), ay = std::fabs(xi[1]), az = std::fabs(xi[2]);
    if (std::max({ax, ay, az}) < 1.0) return PyramidId::CenterCube;
    // P1..P6 in order; first match wins (ties go to the lowest number).
    if (xi[0] >= 1.0 && ay <= ax && az <= ax) return PyramidId::P1;
    if (xi[1] >= 1.0 && ax <= ay && az <= ay) return PyramidId::P2;
    if (xi[2] >= 1.0 && ax <= az && ay <= az) return PyramidId::P3;
    if (xi[0] <= -1.0 && ay <= ax && az <= ax) return PyramidId::P4;
    if (xi[1] <= -1.0 && ax <= ay && az <= ay) return PyramidId::P5;
    if (xi[2] <= -1.0 && ax <= az && ay <= az) return PyramidId::P6;
    // |xi|_inf >= 1 always matches one of the six cases above.
    throw std::logic_error("classify_frequency: unreachable");
}

int shear_range(int j, const Anisotropy& alpha) {
    if (j < 0) throw precondition_error("shear_range requires j >= 0");
    return (int)std::ceil(std::exp2(0.5 * (alpha.alpha - 1.0) * j) - 1e-12);
}

int snapped_lattice_size(double density, int grid_n) {
    if (density <= 1.0) return 1;
    int p = (int)std::lround(std::log2(density));
    if (p < 0) p = 0;
    long long L = 1LL << p;
    if (L > grid_n) return grid_n;
    return (int)L;
}

static std::array<int, 3> lattice_sizes(int j, const Anisotropy& alpha, const LatticeConstants& c,
                                        PyramidPair pair, int grid_n) {
    double fast = std::exp2(0.5 * alpha.alpha * j) / c.c1;
    double slow = std::exp2(0.5 * j) / c.c2;
    std::array<int, 3> L{snapped_lattice_size(slow, grid_n), snapped_lattice_size(slow, grid_n),
                         snapped_lattice_size(slow, grid_n)};
    L[pyramid_axis(pair)] = snapped_lattice_size(fast, grid_n);
    return L;
}

std::vector<ShearletIndex> enumerate_indices(int j_min, int j_max, const Anisotropy& alpha,
                                             const LatticeConstants& c, int grid_n) {
    if (j_min < 0) throw precondition_error("enumerate_indices requires j_min >= 0");
    std::vector<ShearletIndex> out;
    if (j_min > j_max) return out;
    for (PyramidPair pair : {PyramidPair::P, PyramidPair::PTilde, PyramidPair::PBreve}) {
        for (int j = j_min; j <= j_max; ++j) {
            int K = shear_range(j, alpha);
            auto L = lattice_sizes(j, alpha, c, pair, grid_n);
            for (int k1 = -K; k1 <= K; ++k1)
                for (int k2 = -K; k2 <= K; ++k2)
                    for (int m0 = 0; m0 < L[0]; ++m0)
                        for (int m1 = 0; m1 < L[1]; ++m1)
                            for (int m2 = 0; m2 < L[2]; ++m2)
                                out.push_back({pair, j, {k1, k2}, {m0, m1, m2}});
        }
    }
    return out;
}

IndexCounts count_indices(int j_min, int j_max, const Anisotropy& alpha, const LatticeConstants& c,
                          int grid_n) {
    IndexCounts ic;
    if (j_min > j_max) return ic;
    for (int j = j_min; j <= j_max; ++j) {
        std::size_t K = (std::size_t)shear_range(j, alpha);
        ic.per_scale_shear_cells.push_back((2 * K + 1) * (2 * K + 1));
    }
    for (PyramidPair pair : {PyramidPair::P, PyramidPair::PTilde, PyramidPair::PBreve}) {
        for (int j = j_min; j <= j_max; ++j) {
            auto L = lattice_sizes(j, alpha, c, pair, grid_n);
            ic.total += ic.per_scale_shear_cells[(std::size_t)(j - j_min)] *
                        (std::size_t)L[0] * L[1] * L[2];
        }
    }
    return ic;
}

}  // namespace shearlab
