#include "vgplan/training.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "vgplan/errors.hpp"

namespace vgplan {

void TrainConfig::validate(std::size_t total_steps) const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be finite and > 0");
  }
  if (warmup_steps < 0) throw ConfigError("warmup_steps must be >= 0");
  if (total_steps > 0 && static_cast<std::size_t>(warmup_steps) > total_steps) {
    throw ConfigError("warmup_steps (" + std::to_string(warmup_steps) + ") exceeds total steps (" +
                      std::to_string(total_steps) + ")");
  }
  if (context < 2) throw ConfigError("context must be >= 2");
  if (min_lr_ratio < 0.0 || min_lr_ratio > 1.0) throw ConfigError("min_lr_ratio must lie in [0, 1]");
  if (max_steps < 0) throw ConfigError("max_steps must be >= 0");
}

TrainConfig desk_generator_train_config() {
  TrainConfig c;
  c.batch_size = 16;
  c.epochs = 4;
  c.learning_rate = 3e-4;
  c.warmup_steps = 50;
  return c;
}

TrainConfig desk_verifier_train_config() {
  TrainConfig c;
  c.batch_size = 16;
  c.epochs = 1;
  c.learning_rate = 3e-4;
  c.warmup_steps = 50;
  return c;
}

TrainConfig paper_generator_train_config() {
  TrainConfig c;
  c.batch_size = 16;
  c.epochs = 20;
  c.learning_rate = 5e-6;
  c.warmup_steps = 50;
  c.cosine_decay = false;
  return c;
}

TrainConfig paper_verifier_train_config() {
  TrainConfig c;
  c.batch_size = 8;
  c.epochs = 1;
  c.learning_rate = 5e-6;
  c.warmup_steps = 20;
  c.cosine_decay = false;
  return c;
}

double scheduled_lr(const TrainConfig& c, std::size_t step, std::size_t total_steps) {
  const auto warmup = static_cast<std::size_t>(c.warmup_steps);
  if (step < warmup) {
    return c.learning_rate * static_cast<double>(step + 1) / static_cast<double>(warmup);
  }
  if (!c.cosine_decay || total_steps <= warmup + 1) return c.learning_rate;
  const double progress = static_cast<double>(step - warmup) / static_cast<double>(total_steps - warmup - 1);
  const double cosine = 0.5 * (1.0 + std::cos(M_PI * std::min(progress, 1.0)));
  return c.learning_rate * (c.min_lr_ratio + (1.0 - c.min_lr_ratio) * cosine);
}

std::string encode_step(const StepRecord& r) {
  nlohmann::ordered_json j;
  j["step"] = r.step;
  j["epoch"] = r.epoch;
  j["split"] = "train";
  j["loss"] = r.loss;
  j["accuracy"] = r.accuracy;
  j["lr"] = r.lr;
  j["grad_norm"] = r.grad_norm;
  return j.dump();
}

std::string encode_epoch(const EpochRecord& r) {
  nlohmann::ordered_json j;
  j["epoch"] = r.epoch;
  j["split"] = r.split;
  j["loss"] = r.loss;
  j["accuracy"] = r.accuracy;
  j["count"] = r.count;
  return j.dump();
}

void write_train_log(const std::string& step_path, const std::string& epoch_path, const TrainLog& log) {
  std::ofstream steps(step_path, std::ios::trunc);
  if (!steps) throw IoError("cannot write " + step_path);
  for (const auto& r : log.steps) steps << encode_step(r) << '\n';
  std::ofstream epochs(epoch_path, std::ios::trunc);
  if (!epochs) throw IoError("cannot write " + epoch_path);
  for (const auto& r : log.epochs) epochs << encode_epoch(r) << '\n';
  if (!steps || !epochs) throw IoError("write failed for training log");
}

Adam::Adam(std::size_t n, const TrainConfig& c)
    : m_(n, 0.0f), v_(n, 0.0f), beta1_(c.beta1), beta2_(c.beta2), eps_(c.adam_eps) {}

void Adam::step(std::span<float> params, std::span<const float> grad, double lr) {
  ++t_;
  const auto b1 = static_cast<float>(beta1_);
  const auto b2 = static_cast<float>(beta2_);
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const auto step_size = static_cast<float>(lr / bc1);
  const auto inv_bc2 = static_cast<float>(1.0 / bc2);
  const auto eps = static_cast<float>(eps_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = b1 * m_[i] + (1.0f - b1) * grad[i];
    v_[i] = b2 * v_[i] + (1.0f - b2) * grad[i] * grad[i];
    params[i] -= step_size * m_[i] / (std::sqrt(v_[i] * inv_bc2) + eps);
  }
}

std::vector<LmExample> make_lm_examples(const Vocabulary& vocab,
                                        const std::vector<Transition>& transitions,
                                        std::size_t context, bool full_sequence_loss) {
  std::vector<LmExample> out;
  out.reserve(transitions.size());
  for (const auto& t : transitions) {
    auto tt = tokenize_transition(vocab, t.goal_text, t.state_text, t.action_text, t.next_state_text,
                                  context);
    out.push_back({std::move(tt.tokens), full_sequence_loss ? 1 : tt.prompt_length});
  }
  return out;
}

std::vector<ClsExample> make_cls_examples(const Vocabulary& vocab,
                                          const std::vector<VerifierExample>& examples,
                                          std::size_t context) {
  std::vector<ClsExample> out;
  out.reserve(examples.size());
  for (const auto& e : examples) {
    auto tokens = build_verifier_input(vocab, e.state_text, e.action_text);
    if (tokens.size() > context) {
      throw ContextOverflow("verifier input needs " + std::to_string(tokens.size()) + " tokens");
    }
    out.push_back({std::move(tokens), e.valid});
  }
  return out;
}

namespace {

template <class Example, class LossFn>
LossStats evaluate_all(const std::vector<Example>& data, std::size_t batch_size, LossFn loss) {
  LossStats total;
  double weighted = 0.0;
  for (std::size_t i = 0; i < data.size(); i += batch_size) {
    const std::vector<Example> batch(data.begin() + static_cast<std::ptrdiff_t>(i),
                                     data.begin() + static_cast<std::ptrdiff_t>(std::min(data.size(), i + batch_size)));
    const LossStats s = loss(batch);
    weighted += s.loss * static_cast<double>(s.count);
    total.correct += s.correct;
    total.count += s.count;
  }
  total.loss = total.count ? weighted / static_cast<double>(total.count) : 0.0;
  return total;
}

double accuracy(const LossStats& s) {
  return s.count ? static_cast<double>(s.correct) / static_cast<double>(s.count) : 0.0;
}

template <class Example, class LossFn>
TrainLog train_loop(Transformer<float>& model, const std::vector<Example>& train,
                    const std::vector<Example>& validation, const TrainConfig& config,
                    const StepCallback& on_step, LossFn loss, std::size_t eval_batch) {
  const auto bs = static_cast<std::size_t>(config.batch_size);
  const std::size_t per_epoch = config.batch_size > 0 ? (train.size() + bs - 1) / bs : 0;
  std::size_t total = per_epoch * static_cast<std::size_t>(std::max(config.epochs, 0));
  if (config.max_steps > 0) total = std::min(total, static_cast<std::size_t>(config.max_steps));
  config.validate(total);
  TrainLog log;
  if (config.epochs == 0) return log;
  if (train.empty()) throw ConfigError("training corpus is empty");

  Adam adam(model.params().size(), config);
  std::vector<float> grad(model.params().size());
  std::vector<std::size_t> order(train.size());
  std::size_t step = 0;
  for (int epoch = 1; epoch <= config.epochs && step < total; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(config.seed, StreamDomain::kTrainShuffle, {static_cast<std::uint64_t>(epoch)}));
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t epoch_correct = 0, epoch_count = 0;
    for (std::size_t b = 0; b < per_epoch && step < total; ++b) {
      std::vector<Example> batch;
      for (std::size_t i = b * bs; i < std::min(train.size(), (b + 1) * bs); ++i) {
        batch.push_back(train[order[i]]);
      }
      std::fill(grad.begin(), grad.end(), 0.0f);
      const LossStats s = loss(batch, std::span<float>(grad));
      double norm2 = 0.0;
      for (float g : grad) norm2 += static_cast<double>(g) * g;
      const double norm = std::sqrt(norm2);
      if (!std::isfinite(s.loss) || !std::isfinite(norm)) {
        throw DivergenceError("non-finite loss or gradient at step " + std::to_string(step + 1));
      }
      if (config.grad_clip > 0.0 && norm > config.grad_clip) {
        const auto f = static_cast<float>(config.grad_clip / norm);
        for (float& g : grad) g *= f;
      }
      const double lr = scheduled_lr(config, step, total);
      adam.step(model.params(), grad, lr);
      ++step;
      StepRecord rec{step, epoch, s.loss, accuracy(s), lr, norm};
      log.steps.push_back(rec);
      if (on_step) on_step(rec);
      epoch_loss += s.loss * static_cast<double>(s.count);
      epoch_correct += s.correct;
      epoch_count += s.count;
    }
    if (!model.all_finite()) throw DivergenceError("parameters became non-finite");
    log.epochs.push_back({epoch, "train", epoch_count ? epoch_loss / static_cast<double>(epoch_count) : 0.0,
                          epoch_count ? static_cast<double>(epoch_correct) / static_cast<double>(epoch_count) : 0.0,
                          epoch_count});
    if (!validation.empty()) {
      const LossStats v = evaluate_all(validation, eval_batch,
                                       [&](const std::vector<Example>& batch) { return loss(batch, std::span<float>()); });
      log.epochs.push_back({epoch, "validation", v.loss, accuracy(v), v.count});
    }
  }
  return log;
}

}  // namespace

LossStats evaluate_lm(const Transformer<float>& model, const std::vector<LmExample>& data,
                      std::size_t batch_size) {
  return evaluate_all(data, batch_size, [&](const std::vector<LmExample>& b) { return lm_loss(model, b); });
}

LossStats evaluate_classifier(const Transformer<float>& model, const std::vector<ClsExample>& data,
                              std::size_t batch_size) {
  return evaluate_all(data, batch_size,
                      [&](const std::vector<ClsExample>& b) { return classifier_loss(model, b); });
}

TrainLog train_generator(Transformer<float>& model, const std::vector<LmExample>& train,
                         const std::vector<LmExample>& validation, const TrainConfig& config,
                         const StepCallback& on_step) {
  if (model.head() != HeadKind::kLanguageModel) throw ShapeMismatch("generator needs an LM head");
  return train_loop(model, train, validation, config, on_step,
                    [&](const std::vector<LmExample>& b, std::span<float> g) { return lm_loss(model, b, g); },
                    32);
}

TrainLog train_verifier(Transformer<float>& model, const std::vector<ClsExample>& train,
                        const std::vector<ClsExample>& validation, const TrainConfig& config,
                        const StepCallback& on_step) {
  if (model.head() != HeadKind::kClassifier) throw ShapeMismatch("verifier needs a classifier head");
  bool pos = false, neg = false;
  for (const auto& e : train) (e.label ? pos : neg) = true;
  if (config.epochs > 0 && !(pos && neg)) throw ConfigError("verifier corpus needs both labels");
  return train_loop(model, train, validation, config, on_step,
                    [&](const std::vector<ClsExample>& b, std::span<float> g) { return classifier_loss(model, b, g); },
                    64);
}

std::string to_string(VerifierInit v) {
  return v == VerifierInit::kFromGenerator ? "from_generator" : "fresh";
}

VerifierInit verifier_init_from_string(const std::string& s) {
  if (s == "from_generator" || s == "generator") return VerifierInit::kFromGenerator;
  if (s == "fresh" || s == "base") return VerifierInit::kFresh;
  throw ConfigError("unknown verifier init '" + s + "' (expected from_generator or fresh)");
}

Transformer<float> make_verifier(VerifierInit init, const Transformer<float>* generator,
                                 const ModelConfig& config, std::uint64_t seed) {
  Rng rng(derive_seed(seed, StreamDomain::kModelInit, {1}));
  if (init == VerifierInit::kFromGenerator) {
    if (!generator) throw MissingArtifact("verifier from_generator needs a generator");
    if (!(generator->config() == config)) throw ShapeMismatch("generator geometry differs from config");
    return classifier_from_generator(*generator, rng);
  }
  Transformer<float> v(config, HeadKind::kClassifier);
  v.init(rng);
  return v;
}

}  // namespace vgplan
