#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>

#include <fftw3.h>

namespace aimc::fft {

namespace detail {

inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

/// FFTW plan plus its own aligned buffers. Planning is not thread-safe in
/// FFTW, execution on distinct plans is.
class Plan {
public:
    Plan(std::size_t n, int sign) : n_(n) {
        std::lock_guard lock(planner_mutex());
        in_ = fftw_alloc_complex(n);
        out_ = fftw_alloc_complex(n);
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_, out_, sign, FFTW_ESTIMATE);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    ~Plan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }

    std::complex<double>* input() noexcept { return reinterpret_cast<std::complex<double>*>(in_); }
    const std::complex<double>* output() const noexcept { return reinterpret_cast<const std::complex<double>*>(out_); }
    void execute() noexcept { fftw_execute(plan_); }
    std::size_t size() const noexcept { return n_; }

private:
    std::size_t n_;
    fftw_complex* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

inline Plan& cached_plan(std::size_t n, int sign) {
    thread_local std::unordered_map<std::size_t, std::unique_ptr<Plan>> forward_plans, inverse_plans;
    auto& cache = sign == FFTW_FORWARD ? forward_plans : inverse_plans;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Plan>(n, sign);
    return *slot;
}

inline void run(std::span<const std::complex<double>> in, std::span<std::complex<double>> out, int sign) {
    Plan& plan = cached_plan(in.size(), sign);
    std::copy(in.begin(), in.end(), plan.input());
    plan.execute();
    std::copy(plan.output(), plan.output() + in.size(), out.begin());
}

}  // namespace detail

/// Unnormalized forward DFT, X[k] = sum x[n] e^{-j 2 pi k n / N}. `out` must hold in.size() values.
inline void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
    detail::run(in, out, FFTW_FORWARD);
}

/// Unnormalized inverse DFT (no 1/N factor).
inline void inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
    detail::run(in, out, FFTW_BACKWARD);
}

}  // namespace aimc::fft
