#pragma once

#include <optional>
#include <vector>

#include "shearlab/common.hpp"

namespace shearlab {

// Anisotropy exponent alpha in (1, 2]. Kept together with an optional exact
// rational form; rational alpha enables exact lattice snapping claims.
struct Anisotropy {
    double alpha = 2.0;
    std::optional<Rational> exact;

    Anisotropy() = default;
    explicit Anisotropy(double a) : alpha(a) { validate(); }
    explicit Anisotropy(Rational r) : alpha(r.value()), exact(r) { validate(); }

    void validate() const {
        if (!(alpha > 1.0 && alpha <= 2.0))
            throw precondition_error("anisotropy alpha must lie in (1, 2]");
    }
};

enum class PyramidId { P1 = 1, P2, P3, P4, P5, P6, CenterCube };

// The three pyramid pairs P = P1 u P4, P~ = P2 u P5, P' = P3 u P6. The pair
// index doubles as the distinguished ("pyramid") axis: 0, 1, 2.
enum class PyramidPair { P = 0, PTilde = 1, PBreve = 2 };

inline int pyramid_axis(PyramidPair p) { return (int)p; }

inline PyramidPair pair_of(PyramidId id) {
    switch (id) {
        case PyramidId::P1: case PyramidId::P4: return PyramidPair::P;
        case PyramidId::P2: case PyramidId::P5: return PyramidPair::PTilde;
        case PyramidId::P3: case PyramidId::P6: return PyramidPair::PBreve;
        default: throw precondition_error("center cube has no pyramid pair");
    }
}

struct ShearletIndex {
    PyramidPair pair = PyramidPair::P;
    int j = 0;
    std::array<int, 2> k{0, 0};
    std::array<int, 3> m{0, 0, 0};
};

struct LatticeConstants {
    double c1 = 0.25;
    double c2 = 0.125;

    LatticeConstants() = default;
    LatticeConstants(double a, double b) : c1(a), c2(b) {
        if (!(c1 > 0 && c2 > 0)) throw precondition_error("lattice constants must be positive");
        if (c2 > c1) throw precondition_error("lattice requires c2 <= c1");
    }
    // Translation matrix for the pair: c1 on the pyramid axis, c2 elsewhere.
    Mat3 matrix(PyramidPair p) const {
        Vec3 d{c2, c2, c2};
        d[pyramid_axis(p)] = c1;
        return Mat3::diag(d[0], d[1], d[2]);
    }
    double det() const { return c1 * c2 * c2; }
};

// diag with 2^{j*alpha/2} on the pair's axis, 2^{j/2} on the other two.
Mat3 scaling_matrix(int j, const Anisotropy& alpha, PyramidPair pair);

// Unimodular shear; k sits in the row of the pair's axis.
Mat3 shear_matrix(std::array<int, 2> k, PyramidPair pair);

// Frequency partition into six pyramids and the center cube. Boundary ties
// resolve to the lowest-numbered matching pyramid.
PyramidId classify_frequency(const Vec3& xi);

// K_j = ceil(2^{j(alpha-1)/2}).
int shear_range(int j, const Anisotropy& alpha);

// Per-scale snapped coefficient-lattice size along one axis: power of two
// approximating the continuum density (axis scale / c), clamped to [1, n].
int snapped_lattice_size(double density, int grid_n);

struct IndexCounts {
    std::size_t total = 0;
    std::vector<std::size_t> per_scale_shear_cells;  // (2 K_j + 1)^2 per j
};

// Deterministic enumeration: pair, then j ascending, then k lexicographic,
// then m lexicographic. Lattice sizes follow snapped_lattice_size per axis.
std::vector<ShearletIndex> enumerate_indices(int j_min, int j_max, const Anisotropy& alpha,
                                             const LatticeConstants& c, int grid_n);

IndexCounts count_indices(int j_min, int j_max, const Anisotropy& alpha,
                          const LatticeConstants& c, int grid_n);

}  // namespace shearlab
