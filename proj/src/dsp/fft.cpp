#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "nxs/dsp/analysis.hpp"

namespace nxs::dsp {

namespace {

// FFTW planning is not thread-safe; execution with new-array functions is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

fftw_plan r2c_plan(int n) {
  thread_local std::map<int, Plan> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second.get();
  std::lock_guard lock(planner_mutex());
  std::vector<double> in(static_cast<std::size_t>(n));
  std::vector<fftw_complex> out(static_cast<std::size_t>(n / 2 + 1));
  Plan p(fftw_plan_dft_r2c_1d(n, in.data(), out.data(), kFlags));
  return cache.emplace(n, std::move(p)).first->second.get();
}

fftw_plan c2c_plan(int n, bool inverse) {
  thread_local std::map<std::pair<int, bool>, Plan> cache;
  auto it = cache.find({n, inverse});
  if (it != cache.end()) return it->second.get();
  std::lock_guard lock(planner_mutex());
  std::vector<fftw_complex> in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
  Plan p(fftw_plan_dft_1d(n, in.data(), out.data(), inverse ? FFTW_BACKWARD : FFTW_FORWARD, kFlags));
  return cache.emplace(std::pair{n, inverse}, std::move(p)).first->second.get();
}

}  // namespace

std::vector<std::complex<double>> rfft(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  if (n == 0) return {};
  std::vector<double> in(x.begin(), x.end());  // r2c may clobber its input
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n / 2 + 1));
  fftw_execute_dft_r2c(r2c_plan(n), in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x, bool inverse) {
  const int n = static_cast<int>(x.size());
  if (n == 0) return {};
  std::vector<std::complex<double>> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(x.size());
  fftw_execute_dft(c2c_plan(n, inverse), reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace nxs::dsp
