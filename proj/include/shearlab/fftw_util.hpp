#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "shearlab/common.hpp"

namespace shearlab {

using cplx = std::complex<double>;

// fftw_malloc-backed buffer so cached plans can be executed on it.
class FftBuffer {
  public:
    FftBuffer() = default;
    explicit FftBuffer(std::size_t count) { resize(count); }
    ~FftBuffer() { if (ptr_) fftw_free(ptr_); }
    FftBuffer(const FftBuffer&) = delete;
    FftBuffer& operator=(const FftBuffer&) = delete;
    FftBuffer(FftBuffer&& o) noexcept : ptr_(o.ptr_), count_(o.count_) { o.ptr_ = nullptr; }

    void resize(std::size_t count) {
        if (count <= count_) return;
        if (ptr_) fftw_free(ptr_);
        ptr_ = static_cast<cplx*>(fftw_malloc(count * sizeof(cplx)));
        if (!ptr_) throw std::bad_alloc();
        count_ = count;
    }
    cplx* data() { return ptr_; }
    const cplx* data() const { return ptr_; }

  private:
    cplx* ptr_ = nullptr;
    std::size_t count_ = 0;
};

// Process-wide cache of in-place c2c plans keyed by shape and sign. Plan
// creation is serialized (FFTW planning is not thread-safe); execution uses
// the new-array interface and is safe from many threads.
class FftPlanCache {
  public:
    static FftPlanCache& instance() {
        static FftPlanCache c;
        return c;
    }

    // dims = {nz, ny, nx}, x fastest. sign: FFTW_FORWARD or FFTW_BACKWARD.
    void execute(const std::array<int, 3>& dims, int sign, cplx* buf) {
        fftw_plan p = plan(dims, sign);
        fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(buf),
                         reinterpret_cast<fftw_complex*>(buf));
    }

  private:
    fftw_plan plan(const std::array<int, 3>& dims, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_pair(dims, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::size_t count = (std::size_t)dims[0] * dims[1] * dims[2];
        FftBuffer scratch(count);
        fftw_plan p = fftw_plan_dft_3d(dims[0], dims[1], dims[2],
                                       reinterpret_cast<fftw_complex*>(scratch.data()),
                                       reinterpret_cast<fftw_complex*>(scratch.data()), sign,
                                       FFTW_ESTIMATE);
        if (!p) throw convergence_error("fftw plan creation failed");
        plans_.emplace(key, p);
        return p;
    }

    std::mutex mu_;
    std::map<std::pair<std::array<int, 3>, int>, fftw_plan> plans_;
};

}  // namespace shearlab
