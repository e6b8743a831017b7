#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vgplan/dataset.hpp"
#include "vgplan/transformer.hpp"
#include "vgplan/vocabulary.hpp"

namespace vgplan {

struct TrainConfig {
  int batch_size = 16;
  int epochs = 1;
  double learning_rate = 3e-4;
  int warmup_steps = 50;
  std::uint64_t seed = 0;
  int context = 512;
  // Cosine decay from learning_rate to learning_rate * min_lr_ratio.
  bool cosine_decay = true;
  double min_lr_ratio = 0.1;
  double grad_clip = 1.0;  // global L2 norm; <= 0 disables
  double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  // Stop after this many optimizer steps (0 = run every epoch to the end).
  int max_steps = 0;
  // Generator only: also train on prompt tokens.
  bool full_sequence_loss = false;

  // Throws ConfigError. `total_steps` is the planned optimizer step count.
  void validate(std::size_t total_steps) const;
};

// Named reference settings.
TrainConfig desk_generator_train_config();
TrainConfig desk_verifier_train_config();
TrainConfig paper_generator_train_config();  // batch 16, 20 epochs, lr 5e-6, warmup 50
TrainConfig paper_verifier_train_config();   // batch 8, 1 epoch, lr 5e-6, warmup 20

// Learning rate for a 0-based step.
double scheduled_lr(const TrainConfig& c, std::size_t step, std::size_t total_steps);

struct StepRecord {
  std::size_t step = 0;  // 1-based
  int epoch = 0;         // 1-based
  double loss = 0.0;
  double accuracy = 0.0;
  double lr = 0.0;
  double grad_norm = 0.0;
};

struct EpochRecord {
  int epoch = 0;
  std::string split;  // "train" or "validation"
  double loss = 0.0;
  double accuracy = 0.0;
  std::size_t count = 0;
};

struct TrainLog {
  std::vector<StepRecord> steps;
  std::vector<EpochRecord> epochs;
};

std::string encode_step(const StepRecord& r);
std::string encode_epoch(const EpochRecord& r);
// One line per record; throws IoError.
void write_train_log(const std::string& step_path, const std::string& epoch_path, const TrainLog& log);

using StepCallback = std::function<void(const StepRecord&)>;

// Adam over a flat parameter vector. The update is a fixed sequential loop,
// so equal inputs give bitwise-equal runs.
class Adam {
 public:
  Adam(std::size_t n, const TrainConfig& c);
  void step(std::span<float> params, std::span<const float> grad, double lr);

 private:
  std::vector<float> m_, v_;
  double beta1_, beta2_, eps_;
  std::size_t t_ = 0;
};

// Token-level examples for the generator: prompt followed by completion,
// loss on the completion unless full_sequence_loss.
std::vector<LmExample> make_lm_examples(const Vocabulary& vocab,
                                        const std::vector<Transition>& transitions,
                                        std::size_t context, bool full_sequence_loss = false);

std::vector<ClsExample> make_cls_examples(const Vocabulary& vocab,
                                          const std::vector<VerifierExample>& examples,
                                          std::size_t context);

// Mean loss / accuracy over a dataset without gradients.
LossStats evaluate_lm(const Transformer<float>& model, const std::vector<LmExample>& data,
                      std::size_t batch_size = 32);
LossStats evaluate_classifier(const Transformer<float>& model, const std::vector<ClsExample>& data,
                              std::size_t batch_size = 64);

// Trains `model` in place. Batches are drawn from a per-epoch shuffle seeded
// by (config.seed, epoch). epochs == 0 leaves the model untouched. Throws
// DivergenceError when the loss or gradient stops being finite.
TrainLog train_generator(Transformer<float>& model, const std::vector<LmExample>& train,
                         const std::vector<LmExample>& validation, const TrainConfig& config,
                         const StepCallback& on_step = {});

TrainLog train_verifier(Transformer<float>& model, const std::vector<ClsExample>& train,
                        const std::vector<ClsExample>& validation, const TrainConfig& config,
                        const StepCallback& on_step = {});

enum class VerifierInit { kFromGenerator, kFresh };
std::string to_string(VerifierInit v);
VerifierInit verifier_init_from_string(const std::string& s);

// The verifier's starting point: the generator's backbone (V_generator) or a
// fresh random backbone (V_base), each with a fresh head seeded from `seed`.
Transformer<float> make_verifier(VerifierInit init, const Transformer<float>* generator,
                                 const ModelConfig& config, std::uint64_t seed);

}  // namespace vgplan
