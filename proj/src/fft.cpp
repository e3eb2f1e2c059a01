#include "qmeas/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

namespace qmeas::fft {

namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using Buffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
Buffer<T> allocate(std::size_t n) {
    return Buffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

std::vector<double> linear_convolution(std::span<const double> x, std::span<const double> y) {
    const std::size_t out_n = x.size() + y.size() - 1;
    const std::size_t n = next_pow2(out_n);
    const std::size_t nc = n / 2 + 1;

    auto rx = allocate<double>(n);
    auto ry = allocate<double>(n);
    auto cx = allocate<fftw_complex>(nc);
    auto cy = allocate<fftw_complex>(nc);
    std::fill(rx.get(), rx.get() + n, 0.0);
    std::fill(ry.get(), ry.get() + n, 0.0);
    std::copy(x.begin(), x.end(), rx.get());
    std::copy(y.begin(), y.end(), ry.get());

    Plan fx, fy, back;
    {
        std::lock_guard lock(planner_mutex());
        const int ni = static_cast<int>(n);
        fx.reset(fftw_plan_dft_r2c_1d(ni, rx.get(), cx.get(), FFTW_ESTIMATE));
        fy.reset(fftw_plan_dft_r2c_1d(ni, ry.get(), cy.get(), FFTW_ESTIMATE));
        back.reset(fftw_plan_dft_c2r_1d(ni, cx.get(), rx.get(), FFTW_ESTIMATE));
    }
    fftw_execute(fx.get());
    fftw_execute(fy.get());
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < nc; ++k) {
        const double re = cx[k][0] * cy[k][0] - cx[k][1] * cy[k][1];
        const double im = cx[k][0] * cy[k][1] + cx[k][1] * cy[k][0];
        cx[k][0] = re * scale;
        cx[k][1] = im * scale;
    }
    fftw_execute(back.get());
    return std::vector<double>(rx.get(), rx.get() + out_n);
}

void transform_1d(std::span<std::complex<double>> data, int sign) {
    const int n = static_cast<int>(data.size());
    auto buf = allocate<fftw_complex>(data.size());
    Plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_dft_1d(n, buf.get(), buf.get(), sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                    FFTW_ESTIMATE));
    }
    std::copy(data.begin(), data.end(), reinterpret_cast<std::complex<double>*>(buf.get()));
    fftw_execute(plan.get());
    std::copy_n(reinterpret_cast<std::complex<double>*>(buf.get()), data.size(), data.begin());
}

void transform_2d(std::span<std::complex<double>> data, std::size_t rows, std::size_t cols, int sign) {
    auto buf = allocate<fftw_complex>(data.size());
    Plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), buf.get(), buf.get(),
                                    sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE));
    }
    std::copy(data.begin(), data.end(), reinterpret_cast<std::complex<double>*>(buf.get()));
    fftw_execute(plan.get());
    std::copy_n(reinterpret_cast<std::complex<double>*>(buf.get()), data.size(), data.begin());
}

}  // namespace qmeas::fft
