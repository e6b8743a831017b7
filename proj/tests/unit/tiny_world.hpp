#pragma once

// A small trained generator/verifier pair on 3-block problems, built once
// per test binary and shared by the planner and evaluation tests.

#include <vector>

#include "vgplan/dataset.hpp"
#include "vgplan/eval.hpp"
#include "vgplan/training.hpp"
#include "vgplan/transformer.hpp"
#include "vgplan/vocabulary.hpp"

namespace testing_support {

struct TinyWorld {
  vgplan::Vocabulary vocab;
  vgplan::Transformer<float> generator;
  vgplan::Transformer<float> verifier;
  std::vector<vgplan::Transition> transitions;
  std::vector<vgplan::PlanningInstance> instances;
};

inline vgplan::ModelConfig tiny_world_config() { return vgplan::ModelConfig{2, 2, 32, 160, 26}; }

inline const TinyWorld& tiny_world() {
  static const TinyWorld world = [] {
    using namespace vgplan;
    TinyWorld w{Vocabulary(), Transformer<float>(tiny_world_config(), HeadKind::kLanguageModel),
                Transformer<float>(tiny_world_config(), HeadKind::kClassifier), {}, {}};
    const Corpus corpus = build_trajectory_corpus({400, 0, 3, 3, 8}, 42);
    w.transitions = build_generator_corpus(corpus.train);
    TestSetOptions topt;
    topt.count = 24;
    topt.max_len = 6;
    topt.min_blocks = topt.max_blocks = 3;
    w.instances = to_planning_instances(build_test_set(topt, 42));

    Rng init(1);
    w.generator.init(init);
    TrainConfig tc;
    tc.epochs = 3;
    tc.learning_rate = 3e-3;
    tc.warmup_steps = 20;
    tc.context = 160;
    train_generator(w.generator, make_lm_examples(w.vocab, w.transitions, 160), {}, tc);

    Rng neg(2);
    const VerifierCorpus vc = build_verifier_corpus(w.transitions, {}, neg);
    w.verifier = make_verifier(VerifierInit::kFromGenerator, &w.generator, tiny_world_config(), 3);
    TrainConfig vt = tc;
    vt.epochs = 1;
    train_verifier(w.verifier, make_cls_examples(w.vocab, vc.examples, 160), {}, vt);
    return w;
  }();
  return world;
}

}  // namespace testing_support
