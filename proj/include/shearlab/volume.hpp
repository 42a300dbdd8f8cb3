#pragma once

#include <complex>
#include <string>
#include <vector>

#include "shearlab/common.hpp"

namespace shearlab {

// Real scalar field on an n^3 grid over [0,1]^3, x-fastest storage, voxel
// spacing 1/n. Grid inner products carry the 1/n^3 cell volume so they
// approximate L^2([0,1]^3).
struct Volume {
    int n = 0;
    std::vector<double> data;

    Volume() = default;
    explicit Volume(int n_) : n(n_), data((std::size_t)n_ * n_ * n_, 0.0) { validate_n(n_); }

    static void validate_n(int n) {
        if (n != 16 && n != 32 && n != 64 && n != 128 && n != 256)
            throw precondition_error("volume grid size must be one of 16, 32, 64, 128, 256");
    }
    std::size_t size() const { return data.size(); }
    double& at(int x, int y, int z) {
        return data[(std::size_t)x + (std::size_t)n * ((std::size_t)y + (std::size_t)n * z)];
    }
    double at(int x, int y, int z) const {
        return data[(std::size_t)x + (std::size_t)n * ((std::size_t)y + (std::size_t)n * z)];
    }
};

double dot_grid(const Volume& a, const Volume& b);   // (1/n^3) sum a b
double norm_grid(const Volume& a);                   // sqrt(dot_grid(a, a))

// Raw little-endian f64 array (x-fastest) + JSON sidecar
// {n, dtype, domain, seed, provenance}.
void write_volume(const std::string& path_base, const Volume& v, std::uint64_t seed,
                  const std::string& provenance);
Volume read_volume(const std::string& path_base);

}  // namespace shearlab
