// Unitary DFT on top of FFTW3. Plans are created once per (length, direction) and shared; execution is
// thread-safe because FFTW's new-array execute functions only read the plan.
#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "netcom/error.hpp"

namespace netcom::dsp {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

enum class Direction { forward, inverse };

namespace detail {

class PlanCache {
  public:
    PlanCache() = default;
    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;
    ~PlanCache() {
        for (auto& [key, plan] : plans_) {
            fftw_destroy_plan(plan);
        }
    }

    fftw_plan get(std::size_t n, Direction dir) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_pair(n, dir);
        if (auto it = plans_.find(key); it != plans_.end()) {
            return it->second;
        }
        std::vector<fftw_complex> scratch(n);
        fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), scratch.data(), scratch.data(),
                                       dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) {
            throw argument_error("FFTW could not plan a transform of length " + std::to_string(n));
        }
        plans_.emplace(key, p);
        return p;
    }

  private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, Direction>, fftw_plan> plans_;
};

inline PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

}  // namespace detail

/// In-place unitary DFT (scaled by 1/sqrt(n)); inverse(forward(x)) == x.
inline void dft_inplace(std::span<cplx> data, Direction dir) {
    const std::size_t n = data.size();
    if (n == 0) {
        throw argument_error("dft of an empty sequence");
    }
    auto* raw = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(detail::plan_cache().get(n, dir), raw, raw);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& x : data) {
        x *= scale;
    }
}

[[nodiscard]] inline cvec dft(std::span<const cplx> in, Direction dir) {
    cvec out(in.begin(), in.end());
    dft_inplace(out, dir);
    return out;
}

}  // namespace netcom::dsp
