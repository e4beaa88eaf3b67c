#include "qhydro/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace qhydro::fft {
namespace {

using PlanKey = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t, int>;

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, std::size_t howmany, std::size_t stride, std::size_t dist,
                int sign) {
    const PlanKey key{n, howmany, stride, dist, sign};
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    // The planner only needs a correctly shaped scratch array; FFTW_ESTIMATE
    // never touches its contents and FFTW_UNALIGNED lets the plan run on any
    // std::vector storage via the new-array execute interface.
    const std::size_t extent = (howmany - 1) * dist + (n - 1) * stride + 1;
    std::vector<Complex> scratch(extent);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const int dims[1] = {static_cast<int>(n)};
    fftw_plan plan = fftw_plan_many_dft(1, dims, static_cast<int>(howmany), buf, nullptr,
                                        static_cast<int>(stride), static_cast<int>(dist), buf,
                                        nullptr, static_cast<int>(stride),
                                        static_cast<int>(dist), sign,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("fftw: failed to create plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void transform(std::span<Complex> data, std::size_t n, std::size_t howmany, std::size_t stride,
               std::size_t dist, Direction direction) {
  if (n == 0 || howmany == 0) return;
  const std::size_t extent = (howmany - 1) * dist + (n - 1) * stride + 1;
  if (data.size() < extent) throw std::invalid_argument("fft: buffer smaller than layout");
  const int sign = direction == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan plan = cache().get(n, howmany, stride, dist, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

void inverse(std::span<Complex> data) {
  transform(data, data.size(), 1, 1, data.size(), Direction::inverse);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= scale;
}

void forward2d(std::span<Complex> data, std::size_t n1, std::size_t n2) {
  transform(data, n2, n1, 1, n2, Direction::forward);  // rows
  transform(data, n1, n2, n2, 1, Direction::forward);  // columns
}

void inverse2d(std::span<Complex> data, std::size_t n1, std::size_t n2) {
  transform(data, n2, n1, 1, n2, Direction::inverse);
  transform(data, n1, n2, n2, 1, Direction::inverse);
  const double scale = 1.0 / static_cast<double>(n1 * n2);
  for (auto& v : data) v *= scale;
}

}  // namespace qhydro::fft
