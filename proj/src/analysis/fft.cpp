#include "gyrolev/analysis/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "gyrolev/core/errors.hpp"

namespace gyrolev::analysis {
namespace {

// The planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> allocate(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (!p) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (!plan_) throw std::runtime_error("FFTW planning failed");
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

std::vector<double> cross_correlate_fft(std::span<const double> vi, std::span<const double> vj,
                                        std::size_t max_lag) {
  const std::size_t n = vi.size();
  if (vj.size() != n) throw std::invalid_argument("correlation inputs differ in length");
  if (n == 0 || max_lag >= n) throw std::invalid_argument("max_lag must be below the trace length");

  // Padding to >= n + max_lag keeps the circular wrap out of the requested lags.
  const std::size_t p = next_pow2(n + max_lag + 1);
  const std::size_t nc = p / 2 + 1;
  auto a = allocate<double>(p);
  auto b = allocate<double>(p);
  auto fa = allocate<fftw_complex>(nc);
  auto fb = allocate<fftw_complex>(nc);

  std::unique_ptr<Plan> fwd_a, fwd_b, inv;
  {
    std::lock_guard lock(planner_mutex());
    fwd_a = std::make_unique<Plan>(fftw_plan_dft_r2c_1d(static_cast<int>(p), a.get(), fa.get(), FFTW_ESTIMATE));
    fwd_b = std::make_unique<Plan>(fftw_plan_dft_r2c_1d(static_cast<int>(p), b.get(), fb.get(), FFTW_ESTIMATE));
    inv = std::make_unique<Plan>(fftw_plan_dft_c2r_1d(static_cast<int>(p), fa.get(), a.get(), FFTW_ESTIMATE));
  }
  std::fill(a.get(), a.get() + p, 0.0);
  std::fill(b.get(), b.get() + p, 0.0);
  std::copy(vi.begin(), vi.end(), a.get());
  std::copy(vj.begin(), vj.end(), b.get());
  fwd_a->execute();
  fwd_b->execute();
  // IDFT(A conj(B))[k] = sum_n vi[n + k] vj[n]
  for (std::size_t k = 0; k < nc; ++k) {
    const double re = fa[k][0] * fb[k][0] + fa[k][1] * fb[k][1];
    const double im = fa[k][1] * fb[k][0] - fa[k][0] * fb[k][1];
    fa[k][0] = re;
    fa[k][1] = im;
  }
  inv->execute();

  const double scale = 1.0 / static_cast<double>(p);
  std::vector<double> out(2 * max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    out[max_lag + k] = a[k] * scale;
    if (k > 0) out[max_lag - k] = a[p - k] * scale;
  }
  return out;
}

double spectral_peak(std::span<const double> y, double dt, double omega_lo, double omega_hi) {
  if (y.size() < 4 || !(dt > 0.0) || !(omega_hi > omega_lo) || !(omega_lo >= 0.0))
    throw std::invalid_argument("spectral_peak: bad arguments");
  const std::size_t p = next_pow2(8 * y.size());
  const std::size_t nc = p / 2 + 1;
  auto in = allocate<double>(p);
  auto out = allocate<fftw_complex>(nc);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(fftw_plan_dft_r2c_1d(static_cast<int>(p), in.get(), out.get(), FFTW_ESTIMATE));
  }
  std::fill(in.get(), in.get() + p, 0.0);
  std::copy(y.begin(), y.end(), in.get());
  plan->execute();

  const double bin = 2.0 * M_PI / (static_cast<double>(p) * dt);
  auto mag = [&](std::size_t k) { return std::hypot(out[k][0], out[k][1]); };
  const std::size_t lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(omega_lo / bin)));
  const std::size_t hi = std::min(nc - 2, static_cast<std::size_t>(std::floor(omega_hi / bin)));
  if (lo > hi) throw AnalysisError("frequency search band below spectral resolution");
  std::size_t best = lo;
  for (std::size_t k = lo; k <= hi; ++k)
    if (mag(k) > mag(best)) best = k;

  const double m0 = mag(best - 1), m1 = mag(best), m2 = mag(best + 1);
  const double denom = m0 - 2.0 * m1 + m2;
  double shift = denom != 0.0 ? 0.5 * (m0 - m2) / denom : 0.0;
  shift = std::clamp(shift, -0.5, 0.5);
  return (static_cast<double>(best) + shift) * bin;
}

}  // namespace gyrolev::analysis
