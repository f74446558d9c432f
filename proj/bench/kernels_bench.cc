#include <benchmark/benchmark.h>

#include "tncert/certifier.h"
#include "tncert/presets.h"
#include "tncert/sdp.h"
#include "tncert/sos.h"

namespace {

using namespace tncert;

// Dense-ish matrix over the ball of radius r in the free group of rank 2.
GroupRingMatrix free_matrix(int r, std::size_t n) {
  auto ball = enumerate_ball(preset_presentation("free:2"), 2 * r);
  GroupRingMatrix m(n, n, ball);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::pair<int, Rational>> terms;
      for (std::size_t g = 0; g < ball->size(); ++g)
        if (ball->word_length(static_cast<int>(g)) <= r && (g + i + 2 * j) % 3 == 0) terms.emplace_back(static_cast<int>(g), Rational(static_cast<long>(g % 5) - 2));
      m.set(i, j, GroupRingElement(ball, terms));
    }
  return m;
}

void BM_MatMulParallel(benchmark::State& st) {
  const int r = static_cast<int>(st.range(0));
  auto a = free_matrix(r, 4);
  for (auto _ : st) benchmark::DoNotOptimize(mat_mul(a, a, a.ball()));
}

void BM_MatMulSerial(benchmark::State& st) {
  const int r = static_cast<int>(st.range(0));
  auto a = free_matrix(r, 4);
  for (auto _ : st) benchmark::DoNotOptimize(serial::mat_mul(a, a, a.ball()));
}

SOSProblem problem(const char* preset, SOSMode mode, int d) {
  EncodeOptions eo;
  eo.half_radius = d;
  return encode(preset_complex(preset, mode.degree + 1), mode, eo);
}

void BM_EncodeParallel(benchmark::State& st) {
  auto c = preset_complex("free:2");
  EncodeOptions eo;
  eo.half_radius = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(encode(c, {SOSKind::kOzawa, 0}, eo));
}

void BM_EncodeSerial(benchmark::State& st) {
  auto c = preset_complex("free:2");
  EncodeOptions eo;
  eo.half_radius = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(serial::encode(c, {SOSKind::kOzawa, 0}, eo));
}

// Gram with entries 1/(1+p+q) over the Ozawa basis of free:2.
struct GramFixture {
  SOSProblem p;
  RationalMatrix gram;
  BallPtr ball;
  explicit GramFixture(int d) : p(problem("free:2", {SOSKind::kOzawa, 0}, d)) {
    const std::size_t n = p.gram_size();
    gram = RationalMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) gram(i, j) = Rational(1, static_cast<long>(1 + i + j));
    ball = enumerate_ball(preset_presentation("free:2"), 2 * d);
  }
};

void BM_ExpandGramParallel(benchmark::State& st) {
  GramFixture f(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(expand_gram(f.p.basis, 1, f.gram, f.ball));
}

void BM_ExpandGramSerial(benchmark::State& st) {
  GramFixture f(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(serial::expand_gram(f.p.basis, 1, f.gram, f.ball));
}

void BM_SolveCyclic(benchmark::State& st) {
  auto p = problem("cyclic:7", {SOSKind::kBracket, 1}, 3);
  for (auto _ : st) benchmark::DoNotOptimize(solve(p));
}

}  // namespace

BENCHMARK(BM_MatMulParallel)->Arg(2)->Arg(3);
BENCHMARK(BM_MatMulSerial)->Arg(2)->Arg(3);
BENCHMARK(BM_EncodeParallel)->Arg(2)->Arg(3);
BENCHMARK(BM_EncodeSerial)->Arg(2)->Arg(3);
BENCHMARK(BM_ExpandGramParallel)->Arg(2)->Arg(3);
BENCHMARK(BM_ExpandGramSerial)->Arg(2)->Arg(3);
BENCHMARK(BM_SolveCyclic);

BENCHMARK_MAIN();
