#include <vector>

#include <benchmark/benchmark.h>

#include "vgplan/dataset.hpp"
#include "vgplan/decoder.hpp"
#include "vgplan/pipeline.hpp"
#include "vgplan/sampling.hpp"
#include "vgplan/training.hpp"
#include "vgplan/transformer.hpp"

namespace {

using namespace vgplan;

const Vocabulary& vocab() {
  static const Vocabulary v;
  return v;
}

ModelConfig desk_model() {
  ModelConfig c = make_run_config().model;
  c.vocab_size = static_cast<int>(vocab().size());
  return c;
}

const std::vector<LmExample>& desk_batch() {
  static const std::vector<LmExample> batch = [] {
    const Corpus corpus = build_trajectory_corpus(CorpusOptions{8, 0, 3, 5, 20}, 5);
    auto t = build_generator_corpus(corpus.train);
    t.resize(16);
    return make_lm_examples(vocab(), t, 512);
  }();
  return batch;
}

// One optimizer step's worth of forward+backward on a batch of 16 desk
// transitions.
void BM_LmLossAndGradient(benchmark::State& state) {
  Transformer<float> m(desk_model(), HeadKind::kLanguageModel);
  Rng rng(1);
  m.init(rng);
  std::vector<float> grad(m.params().size());
  for (auto _ : state) {
    std::fill(grad.begin(), grad.end(), 0.0f);
    benchmark::DoNotOptimize(lm_loss(m, desk_batch(), std::span<float>(grad)).loss);
  }
}
BENCHMARK(BM_LmLossAndGradient)->Unit(benchmark::kMillisecond);

void BM_LmLossForwardOnly(benchmark::State& state) {
  Transformer<float> m(desk_model(), HeadKind::kLanguageModel);
  Rng rng(1);
  m.init(rng);
  for (auto _ : state) benchmark::DoNotOptimize(lm_loss(m, desk_batch()).loss);
}
BENCHMARK(BM_LmLossForwardOnly)->Unit(benchmark::kMillisecond);

// Decoding throughput: `slots` sequences advancing one token per call.
void BM_DecodeStep(benchmark::State& state) {
  const auto slots = static_cast<std::size_t>(state.range(0));
  Transformer<float> m(desk_model(), HeadKind::kLanguageModel);
  Rng rng(1);
  m.init(rng);
  Decoder<float> dec(m);
  const TokenSequence prompt(desk_batch()[0].tokens.begin(),
                             desk_batch()[0].tokens.begin() + static_cast<long>(desk_batch()[0].loss_from));
  std::vector<KvCache<float>> caches(slots, KvCache<float>(m.config()));
  std::vector<KvCache<float>*> ptrs;
  for (auto& c : caches) ptrs.push_back(&c);
  const TokenId next = vocab().action_marker();
  for (auto _ : state) {
    state.PauseTiming();
    for (auto& c : caches) c.truncate(0);
    dec.advance(ptrs, std::vector<std::span<const TokenId>>(slots, std::span<const TokenId>(prompt)));
    state.ResumeTiming();
    for (int t = 0; t < 32; ++t) {
      benchmark::DoNotOptimize(
          dec.advance(ptrs, std::vector<std::span<const TokenId>>(slots, std::span<const TokenId>(&next, 1))));
    }
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * slots * 32));
}
BENCHMARK(BM_DecodeStep)->Arg(1)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_NucleusSample(benchmark::State& state) {
  Rng rng(2);
  std::vector<float> logits(vocab().size());
  for (auto& x : logits) x = static_cast<float>(rng.normal() * 3.0);
  const SamplingParams p{1.0, 0.99, 192};
  for (auto _ : state) benchmark::DoNotOptimize(sample_token<float>(logits, p, rng));
}
BENCHMARK(BM_NucleusSample);

}  // namespace
