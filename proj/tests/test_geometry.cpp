#include "doctest.h"

#include <random>

#include "shearlab/geometry.hpp"

using namespace shearlab;

TEST_CASE("scaling matrix examples") {
    Anisotropy a2(2.0);
    Mat3 id = scaling_matrix(0, a2, PyramidPair::P);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(id(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));

    Mat3 m = scaling_matrix(2, a2, PyramidPair::P);
    CHECK(m(0, 0) == doctest::Approx(4.0));
    CHECK(m(1, 1) == doctest::Approx(2.0));
    CHECK(m(2, 2) == doctest::Approx(2.0));

    // j=3, alpha=1.5, pair PBreve: diag(2^1.5, 2^1.5, 2^2.25); frozen from an
    // independent extended-precision evaluation.
    Mat3 b = scaling_matrix(3, Anisotropy(1.5), PyramidPair::PBreve);
    CHECK(b(0, 0) == doctest::Approx(2.8284271247461900976).epsilon(1e-14));
    CHECK(b(1, 1) == doctest::Approx(2.8284271247461900976).epsilon(1e-14));
    CHECK(b(2, 2) == doctest::Approx(4.7568284600108842669).epsilon(1e-14));
}

TEST_CASE("scaling matrix determinant invariant") {
    for (double alpha : {1.1, 1.5, 1.75, 2.0}) {
        Anisotropy a(alpha);
        for (int j = 0; j <= 12; ++j) {
            for (auto pair : {PyramidPair::P, PyramidPair::PTilde, PyramidPair::PBreve}) {
                double expect = std::exp2(0.5 * (alpha + 2.0) * j);
                CHECK(scaling_matrix(j, a, pair).det() ==
                      doctest::Approx(expect).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("shear matrix structure and group law") {
    Mat3 s = shear_matrix({1, 2}, PyramidPair::P);
    CHECK(s(0, 0) == 1.0); CHECK(s(0, 1) == 1.0); CHECK(s(0, 2) == 2.0);
    CHECK(s(1, 0) == 0.0); CHECK(s(1, 1) == 1.0); CHECK(s(1, 2) == 0.0);
    CHECK(s(2, 2) == 1.0);
    CHECK(s.det() == doctest::Approx(1.0));

    Mat3 id = shear_matrix({0, 0}, PyramidPair::PTilde);
    for (int i = 0; i < 3; ++i) CHECK(id(i, i) == 1.0);
    CHECK(id.det() == doctest::Approx(1.0));

    // inverse: S_k S_{-k} = I at k = (-3, 5)
    for (auto pair : {PyramidPair::P, PyramidPair::PTilde, PyramidPair::PBreve}) {
        Mat3 p = shear_matrix({-3, 5}, pair).mul(shear_matrix({3, -5}, pair));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(p(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
    }

    // additivity within a pair: S_a S_b = S_{a+b}
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        int a1 = int(rng() % 9) - 4, a2 = int(rng() % 9) - 4;
        int b1 = int(rng() % 9) - 4, b2 = int(rng() % 9) - 4;
        auto pair = PyramidPair(rng() % 3);
        Mat3 lhs = shear_matrix({a1, a2}, pair).mul(shear_matrix({b1, b2}, pair));
        Mat3 rhs = shear_matrix({a1 + b1, a2 + b2}, pair);
        for (int i = 0; i < 9; ++i) CHECK(lhs.a[i] == doctest::Approx(rhs.a[i]));
    }
}

TEST_CASE("classify_frequency examples and totality") {
    CHECK(classify_frequency({2, 1, 0}) == PyramidId::P1);
    CHECK(classify_frequency({0.5, 0.5, 0.5}) == PyramidId::CenterCube);
    // tie among P4/P5/P6 resolves lowest-first
    CHECK(classify_frequency({-1, -1, -1}) == PyramidId::P4);
    CHECK(classify_frequency({1, 1, 1}) == PyramidId::P1);
    CHECK(classify_frequency({0, 3, -3}) == PyramidId::P2);
    CHECK(classify_frequency({0, 0, -2}) == PyramidId::P6);

    std::mt19937_64 rng(7);
    auto u = [&]() { return (rng() >> 11) * 0x1.0p-53 * 20.0 - 10.0; };
    for (int t = 0; t < 20000; ++t) {
        Vec3 xi{u(), u(), u()};
        PyramidId id = classify_frequency(xi);  // total: never throws
        double mx = std::max({std::fabs(xi[0]), std::fabs(xi[1]), std::fabs(xi[2])});
        if (mx >= 1.0)
            CHECK(id != PyramidId::CenterCube);
        else
            CHECK(id == PyramidId::CenterCube);
    }
}

TEST_CASE("shear_range values and monotonicity") {
    Anisotropy a2(2.0), a15(1.5);
    CHECK(shear_range(0, a2) == 1);
    CHECK(shear_range(4, a2) == 4);
    CHECK(shear_range(5, a15) == 3);  // ceil(2^1.25) = ceil(2.3784...) = 3
    for (double al : {1.2, 1.5, 2.0}) {
        Anisotropy a(al);
        for (int j = 0; j < 16; ++j) CHECK(shear_range(j + 1, a) >= shear_range(j, a));
    }
}

TEST_CASE("enumerate_indices ordering, counts, determinism") {
    Anisotropy a2(2.0);
    LatticeConstants c(0.25, 0.125);

    auto counts = count_indices(0, 0, a2, c, 16);
    CHECK(counts.per_scale_shear_cells[0] == 9);  // (2*1+1)^2 per pair at j=0

    auto counts4 = count_indices(0, 4, a2, c, 16);
    CHECK(counts4.per_scale_shear_cells[4] == 81);  // (2*4+1)^2

    // monotone in j_max
    std::size_t prev = 0;
    for (int jm = 0; jm <= 4; ++jm) {
        auto ci = count_indices(0, jm, a2, c, 16);
        CHECK(ci.total >= prev);
        prev = ci.total;
    }

    // empty range
    CHECK(enumerate_indices(3, 2, a2, c, 16).empty());

    auto idx = enumerate_indices(0, 1, a2, c, 8);
    CHECK(idx.size() == count_indices(0, 1, a2, c, 8).total);
    // deterministic ordering: pair, then j, then k lexicographic, then m
    auto key = [](const ShearletIndex& s) {
        return std::array<long long, 7>{(long long)s.pair, s.j, s.k[0], s.k[1],
                                        s.m[0], s.m[1], s.m[2]};
    };
    for (std::size_t i = 1; i < idx.size(); ++i) CHECK(key(idx[i - 1]) < key(idx[i]));

    auto idx2 = enumerate_indices(0, 1, a2, c, 8);
    REQUIRE(idx.size() == idx2.size());
    for (std::size_t i = 0; i < idx.size(); ++i) CHECK(key(idx[i]) == key(idx2[i]));
}

TEST_CASE("snapped lattice sizes are powers of two within grid") {
    for (double d : {0.3, 1.0, 3.9, 4.0, 17.8, 90.5, 512.0}) {
        int L = snapped_lattice_size(d, 64);
        CHECK(L >= 1);
        CHECK(L <= 64);
        CHECK((L & (L - 1)) == 0);
    }
    CHECK(snapped_lattice_size(4.0, 64) == 4);
    CHECK(snapped_lattice_size(90.5, 64) == 64);   // clamped to grid
    CHECK(snapped_lattice_size(0.5, 64) == 1);
}

TEST_CASE("lattice constants validation") {
    CHECK_THROWS_AS(LatticeConstants(0.1, 0.2), precondition_error);  // c2 > c1
    CHECK_THROWS_AS(LatticeConstants(-1.0, 0.5), precondition_error);
    CHECK_THROWS_AS(Anisotropy(1.0), precondition_error);
    CHECK_THROWS_AS(Anisotropy(2.5), precondition_error);
}
