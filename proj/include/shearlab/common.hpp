#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <array>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>
#include <functional>

namespace shearlab {

// Error taxonomy mapped to CLI exit codes (2/3/4).
struct precondition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Vec3 = std::array<double, 3>;

struct Mat3 {
    // row-major
    std::array<double, 9> a{};

    static Mat3 identity() {
        Mat3 m;
        m.a = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        return m;
    }
    static Mat3 diag(double d0, double d1, double d2) {
        Mat3 m;
        m.a = {d0, 0, 0, 0, d1, 0, 0, 0, d2};
        return m;
    }
    double operator()(int r, int c) const { return a[3 * r + c]; }
    double& operator()(int r, int c) { return a[3 * r + c]; }

    Vec3 apply(const Vec3& v) const {
        return {a[0] * v[0] + a[1] * v[1] + a[2] * v[2],
                a[3] * v[0] + a[4] * v[1] + a[5] * v[2],
                a[6] * v[0] + a[7] * v[1] + a[8] * v[2]};
    }
    Mat3 mul(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }
    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }
    double det() const {
        return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
               a[2] * (a[3] * a[7] - a[4] * a[6]);
    }
};

// Exact rational with 64-bit terms; used where the configuration supplies a
// rational anisotropy exponent and for the tau() oracle.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw std::invalid_argument("rational with zero denominator");
        if (den < 0) { num = -num; den = -den; }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }
    static Rational from128(__int128 n, __int128 d) {
        if (d < 0) { n = -n; d = -d; }
        __int128 an = n < 0 ? -n : n;
        __int128 g = gcd128(an, d);
        if (g > 1) { n /= g; d /= g; }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw std::overflow_error("rational overflow");
        return Rational((std::int64_t)n, (std::int64_t)d);
    }
    static __int128 gcd128(__int128 a, __int128 b) {
        while (b) { __int128 t = a % b; a = b; b = t; }
        return a;
    }
    Rational operator+(const Rational& o) const {
        return from128((__int128)num * o.den + (__int128)o.num * den, (__int128)den * o.den);
    }
    Rational operator-(const Rational& o) const {
        return from128((__int128)num * o.den - (__int128)o.num * den, (__int128)den * o.den);
    }
    Rational operator*(const Rational& o) const {
        return from128((__int128)num * o.num, (__int128)den * o.den);
    }
    Rational operator/(const Rational& o) const {
        if (o.num == 0) throw std::domain_error("rational division by zero");
        return from128((__int128)num * o.den, (__int128)den * o.num);
    }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    double value() const { return double(num) / double(den); }
};

// Deterministic parallel map over [0, count): work is split into fixed chunks,
// each result slot written by exactly one task, so output order never depends
// on the thread count.
inline void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t nt = threads > 0 ? (std::size_t)threads : (hw ? hw : 1);
    if (nt > count) nt = count;
    if (nt <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::atomic<std::size_t> next{0};
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) break;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

// FNV-1a, used for config hashes embedded in every output file.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)v);
    return std::string(buf);
}

// Portable deterministic normal deviates (std::normal_distribution is
// implementation-defined; Box-Muller over mt19937_64 is not).
template <class Rng>
inline double normal_sample(Rng& rng) {
    for (;;) {
        double u1 = (rng() >> 11) * 0x1.0p-53;
        double u2 = (rng() >> 11) * 0x1.0p-53;
        if (u1 <= 0.0) continue;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
}

inline double sq(double x) { return x * x; }

}  // namespace shearlab
