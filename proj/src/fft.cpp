#include "oam/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "oam/errors.hpp"

namespace oam {

namespace {

// FFTW's planner is not thread-safe; execution with the new-array interface is.
class PlanCache {
public:
    fftw_plan get(int n, FftDirection dir) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_pair(n, dir);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        auto* buf = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
        const int sign = dir == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD;
        fftw_plan plan = fftw_plan_dft_2d(n, n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        if (!plan) throw NumericError("fft: FFTW failed to create a plan");
        plans_.emplace(key, plan);
        return plan;
    }

    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, FftDirection>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

}  // namespace

void fft2d(std::span<std::complex<double>> data, int n, FftDirection dir) {
    require(n > 0 && data.size() == static_cast<std::size_t>(n) * n, "fft: size mismatch");
    fftw_plan plan = cache().get(n, dir);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace oam
