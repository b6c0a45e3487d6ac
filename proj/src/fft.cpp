#include "fft.hpp"

#include "error.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <utility>

namespace tfpr::fft
{
    namespace
    {
        struct Plans
        {
            fftw_plan forward = nullptr;
            fftw_plan inverse = nullptr;
        };

        // FFTW's planner is not re-entrant; execution of an existing plan on other
        // buffers (fftw_execute_dft_*) is.
        std::mutex& planner_mutex()
        {
            static std::mutex m;
            return m;
        }

        const Plans& real_plans(std::size_t n)
        {
            static std::map<std::size_t, Plans> cache;
            std::lock_guard lock(planner_mutex());
            auto it = cache.find(n);
            if (it != cache.end())
                return it->second;
            auto* r = static_cast<double*>(fftw_malloc(sizeof(double) * n));
            auto* c = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
            Plans p;
            const int len = static_cast<int>(n);
            p.forward = fftw_plan_dft_r2c_1d(len, r, c, FFTW_ESTIMATE);
            p.inverse = fftw_plan_dft_c2r_1d(len, c, r, FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
            fftw_free(r);
            fftw_free(c);
            return cache.emplace(n, p).first->second;
        }

        const Plans& complex_plans(std::size_t n)
        {
            static std::map<std::size_t, Plans> cache;
            std::lock_guard lock(planner_mutex());
            auto it = cache.find(n);
            if (it != cache.end())
                return it->second;
            auto* a = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
            auto* b = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
            Plans p;
            const int len = static_cast<int>(n);
            p.forward = fftw_plan_dft_1d(len, a, b, FFTW_FORWARD, FFTW_ESTIMATE);
            p.inverse = fftw_plan_dft_1d(len, a, b, FFTW_BACKWARD, FFTW_ESTIMATE);
            fftw_free(a);
            fftw_free(b);
            return cache.emplace(n, p).first->second;
        }
    }  // namespace

    struct RealFft::Impl
    {
        const Plans* plans = nullptr;
        double* real = nullptr;
        fftw_complex* spec = nullptr;

        ~Impl()
        {
            fftw_free(real);
            fftw_free(spec);
        }
    };

    RealFft::RealFft(std::size_t n) : m_n(n), m_impl(std::make_unique<Impl>())
    {
        require(n > 0, ErrorKind::InvalidArgument, "FFT size must be positive");
        m_impl->plans = &real_plans(n);
        m_impl->real = static_cast<double*>(fftw_malloc(sizeof(double) * n));
        m_impl->spec = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    }

    RealFft::~RealFft() = default;
    RealFft::RealFft(RealFft&&) noexcept = default;
    RealFft& RealFft::operator=(RealFft&&) noexcept = default;

    double* RealFft::real() noexcept { return m_impl->real; }

    cplx* RealFft::spectrum() noexcept { return reinterpret_cast<cplx*>(m_impl->spec); }

    void RealFft::forward() { fftw_execute_dft_r2c(m_impl->plans->forward, m_impl->real, m_impl->spec); }

    void RealFft::inverse() { fftw_execute_dft_c2r(m_impl->plans->inverse, m_impl->spec, m_impl->real); }

    void complex_dft(std::span<const cplx> in, std::span<cplx> out, bool inverse)
    {
        require(in.size() == out.size() && !in.empty(), ErrorKind::Dimension, "DFT size mismatch");
        const std::size_t n = in.size();
        const Plans& p = complex_plans(n);
        auto* a = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        auto* b = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        std::memcpy(a, in.data(), sizeof(fftw_complex) * n);
        fftw_execute_dft(inverse ? p.inverse : p.forward, a, b);
        std::memcpy(static_cast<void*>(out.data()), b, sizeof(fftw_complex) * n);
        fftw_free(a);
        fftw_free(b);
    }
}  // namespace tfpr::fft
