#include <vector>

#include <benchmark/benchmark.h>

#include "vgplan/kernels.hpp"
#include "vgplan/rng.hpp"

namespace {

std::vector<float> random_vec(std::size_t n, std::uint64_t seed) {
  vgplan::Rng rng(seed);
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.uniform01() - 0.5);
  return v;
}

// Shapes from the desk model: M token rows, K = width, N = width or 4×width.
void BM_LinearForward(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const auto n = static_cast<std::size_t>(state.range(2));
  const auto x = random_vec(m * k, 1), w = random_vec(k * n, 2), b = random_vec(n, 3);
  std::vector<float> y(m * n);
  for (auto _ : state) {
    vgplan::kernels::linear_forward(x.data(), m, k, w.data(), n, b.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * m * k * n));
}
BENCHMARK(BM_LinearForward)->Args({1024, 128, 128})->Args({1024, 128, 512})->Args({1024, 512, 128})->Args({32, 128, 384});

void BM_LinearBackward(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const auto n = static_cast<std::size_t>(state.range(2));
  const auto x = random_vec(m * k, 1), w = random_vec(k * n, 2), dy = random_vec(m * n, 3);
  std::vector<float> dx(m * k), dw(k * n), db(n);
  for (auto _ : state) {
    vgplan::kernels::linear_backward(x.data(), m, k, w.data(), n, dy.data(), dx.data(), dw.data(), db.data());
    benchmark::DoNotOptimize(dw.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * 2 * m * k * n));
}
BENCHMARK(BM_LinearBackward)->Args({1024, 128, 128})->Args({1024, 128, 512})->Args({1024, 512, 128});

void BM_AttendOne(benchmark::State& state) {
  const auto len = static_cast<std::size_t>(state.range(0));
  constexpr std::size_t dh = 32, stride = 128;
  const auto q = random_vec(dh, 1), keys = random_vec(len * stride, 2), values = random_vec(len * stride, 3);
  std::vector<float> probs(len), out(dh);
  for (auto _ : state) {
    vgplan::kernels::attend_one(q.data(), keys.data(), values.data(), stride, len, dh, 0.17f, probs.data(),
                                out.data());
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_AttendOne)->Arg(64)->Arg(256);

void BM_Gelu(benchmark::State& state) {
  const auto f = random_vec(4096, 1);
  std::vector<float> g(f.size());
  for (auto _ : state) {
    vgplan::kernels::gelu_forward(f.data(), f.size(), g.data());
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.size()));
}
BENCHMARK(BM_Gelu);

}  // namespace
