#include "chirpsense/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace chirpsense {

namespace {

// One cached plan (and its aligned scratch buffers) per (size, direction).
// FFTW_ESTIMATE keeps planning deterministic; execution copies through the
// scratch buffers so callers can pass ordinary vectors.
struct PlanEntry {
    fftw_plan plan = nullptr;
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;

    ~PlanEntry() {
        if (plan) fftw_destroy_plan(plan);
        if (in) fftw_free(in);
        if (out) fftw_free(out);
    }
};

std::mutex g_fft_mutex;
std::map<std::pair<std::size_t, int>, PlanEntry> g_plans;

std::vector<std::complex<double>> run(const std::vector<std::complex<double>>& in, int sign) {
    const std::size_t n = in.size();
    if (n == 0) {
        throw std::invalid_argument("FFT of an empty sequence");
    }
    std::lock_guard<std::mutex> lock(g_fft_mutex);
    PlanEntry& e = g_plans[{n, sign}];
    if (!e.plan) {
        e.in = fftw_alloc_complex(n);
        e.out = fftw_alloc_complex(n);
        e.plan = fftw_plan_dft_1d(static_cast<int>(n), e.in, e.out, sign, FFTW_ESTIMATE);
        if (!e.plan) {
            throw std::runtime_error("FFTW failed to create a plan");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        e.in[i][0] = in[i].real();
        e.in[i][1] = in[i].imag();
    }
    fftw_execute(e.plan);
    std::vector<std::complex<double>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = {e.out[i][0], e.out[i][1]};
    }
    return out;
}

}  // namespace

std::vector<std::complex<double>> fft_forward(const std::vector<std::complex<double>>& in) {
    return run(in, FFTW_FORWARD);
}

std::vector<std::complex<double>> fft_inverse(const std::vector<std::complex<double>>& in) {
    std::vector<std::complex<double>> out = run(in, FFTW_BACKWARD);
    const double inv = 1.0 / static_cast<double>(out.size());
    for (auto& v : out) {
        v *= inv;
    }
    return out;
}

}  // namespace chirpsense
