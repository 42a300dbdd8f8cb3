#include "shearlab/volume.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace shearlab {

double dot_grid(const Volume& a, const Volume& b) {
    if (a.n != b.n) throw precondition_error("volume shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.data[i] * b.data[i];
    return s / ((double)a.n * a.n * a.n);
}

double norm_grid(const Volume& a) { return std::sqrt(dot_grid(a, a)); }

void write_volume(const std::string& path_base, const Volume& v, std::uint64_t seed,
                  const std::string& provenance) {
    std::ofstream raw(path_base + ".f64", std::ios::binary);
    if (!raw) throw io_error("cannot open " + path_base + ".f64 for writing");
    raw.write(reinterpret_cast<const char*>(v.data.data()),
              (std::streamsize)(v.data.size() * sizeof(double)));
    if (!raw) throw io_error("short write to " + path_base + ".f64");

    nlohmann::json j;
    j["n"] = v.n;
    j["dtype"] = "float64-le";
    j["order"] = "x-fastest";
    j["domain"] = {0.0, 1.0};
    j["seed"] = seed;
    j["provenance"] = provenance;
    std::ofstream side(path_base + ".json");
    if (!side) throw io_error("cannot open " + path_base + ".json for writing");
    side << j.dump(2) << "\n";
}

Volume read_volume(const std::string& path_base) {
    std::ifstream side(path_base + ".json");
    if (!side) throw io_error("cannot open " + path_base + ".json");
    nlohmann::json j;
    side >> j;
    int n = j.at("n").get<int>();
    Volume v(n);
    std::ifstream raw(path_base + ".f64", std::ios::binary);
    if (!raw) throw io_error("cannot open " + path_base + ".f64");
    raw.read(reinterpret_cast<char*>(v.data.data()),
             (std::streamsize)(v.data.size() * sizeof(double)));
    if ((std::size_t)raw.gcount() != v.data.size() * sizeof(double))
        throw io_error("short read from " + path_base + ".f64");
    return v;
}

}  // namespace shearlab
