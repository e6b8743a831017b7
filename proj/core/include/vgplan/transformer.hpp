#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vgplan/rng.hpp"
#include "vgplan/vocabulary.hpp"

namespace vgplan {

struct ModelConfig {
  int layers = 4;
  int heads = 4;
  int width = 128;
  int context = 512;
  int vocab_size = 0;

  int head_dim() const { return width / heads; }
  int ffn_width() const { return 4 * width; }
  // Throws ConfigError on inconsistent values.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

// What sits on top of the final layer norm: a next-token projection
// (generator) or a two-layer perceptron on the last position (verifier).
enum class HeadKind { kLanguageModel, kClassifier };

// Named slice of the flat parameter vector.
struct ParamGroup {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
};

// Offsets of every tensor inside the flat parameter vector. Matrices are
// row-major [in × out].
struct ParamLayout {
  struct Layer {
    std::size_t ln1_g, ln1_b, w_qkv, b_qkv, w_proj, b_proj;
    std::size_t ln2_g, ln2_b, w_fc, b_fc, w_out, b_out;
  };
  std::size_t tok_emb = 0, pos_emb = 0;
  std::vector<Layer> layers;
  std::size_t lnf_g = 0, lnf_b = 0;
  // Language-model head.
  std::size_t w_lm = 0, b_lm = 0;
  // Classifier head.
  std::size_t w_h1 = 0, b_h1 = 0, w_h2 = 0, b_h2 = 0;
  // End of the shared backbone (embeddings, layers, final norm).
  std::size_t backbone_size = 0;
  std::size_t total = 0;
  std::vector<ParamGroup> groups;

  ParamLayout(const ModelConfig& config, HeadKind head);
};

// Decoder-only transformer: learned token and position embeddings, pre-norm
// blocks (causal multi-head attention, GELU MLP), final layer norm, then the
// head. All weights live in one flat vector.
template <class T>
class Transformer {
 public:
  Transformer(const ModelConfig& config, HeadKind head);

  // Normal(0, 0.02) weights, residual projections scaled by 1/sqrt(2·layers),
  // unit norm gains, zero biases. The classifier's output layer starts at
  // zero, so an untrained verifier scores 0.5.
  void init(Rng& rng);

  const ModelConfig& config() const { return config_; }
  HeadKind head() const { return head_; }
  const ParamLayout& layout() const { return layout_; }

  std::span<T> params() { return params_; }
  std::span<const T> params() const { return params_; }
  const T* at(std::size_t offset) const { return params_.data() + offset; }
  T* at(std::size_t offset) { return params_.data() + offset; }

  bool all_finite() const;

  // Converts precision (float training weights -> double for checks).
  template <class U>
  Transformer<U> cast() const {
    Transformer<U> out(config_, head_);
    auto dst = out.params();
    for (std::size_t i = 0; i < params_.size(); ++i) dst[i] = static_cast<U>(params_[i]);
    return out;
  }

 private:
  ModelConfig config_;
  HeadKind head_;
  ParamLayout layout_;
  std::vector<T> params_;
};

// Verifier with its backbone copied from a trained generator and a fresh
// classification head.
template <class T>
Transformer<T> classifier_from_generator(const Transformer<T>& generator, Rng& rng);

// ---------------------------------------------------------------------------
// Training-time forward/backward over a packed batch of sequences.

struct LmExample {
  TokenSequence tokens;
  // Positions predicting tokens at index >= loss_from contribute to the loss.
  std::size_t loss_from = 1;
};

struct ClsExample {
  TokenSequence tokens;
  bool label = false;
};

struct LossStats {
  double loss = 0.0;         // mean over counted positions / examples
  std::size_t correct = 0;   // argmax hits (LM) or thresholded hits (classifier)
  std::size_t count = 0;     // counted positions / examples
};

// Mean next-token cross-entropy over masked positions. When `grad` is
// non-empty it must match the parameter count; the gradient of the mean loss
// is accumulated into it. Throws ShapeMismatch, ContextOverflow, and
// std::invalid_argument when no position is counted.
template <class T>
LossStats lm_loss(const Transformer<T>& model, const std::vector<LmExample>& batch,
                  std::span<T> grad = {});

// Mean binary cross-entropy of the classifier probability on each sequence's
// last token.
template <class T>
LossStats classifier_loss(const Transformer<T>& model, const std::vector<ClsExample>& batch,
                          std::span<T> grad = {});

// Logits [length × vocab] for one sequence, row-major.
template <class T>
std::vector<T> forward_logits(const Transformer<T>& model, const TokenSequence& tokens);

// Valid-probability for each sequence (classifier head).
template <class T>
std::vector<T> classify_sequences(const Transformer<T>& model,
                                  const std::vector<TokenSequence>& sequences);

// Pre-sigmoid classifier scores; thresholding these avoids the saturation of
// the probability near 0 and 1.
template <class T>
std::vector<T> classifier_logits(const Transformer<T>& model,
                                 const std::vector<TokenSequence>& sequences);

// Largest |row sum - 1| over every attention probability row of every layer
// and head when running `tokens` through the model.
template <class T>
double max_attention_row_error(const Transformer<T>& model, const TokenSequence& tokens);

}  // namespace vgplan
