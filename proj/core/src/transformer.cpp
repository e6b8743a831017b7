#include "vgplan/transformer.hpp"

#include <algorithm>
#include <cmath>

#include "vgplan/errors.hpp"
#include "vgplan/kernels.hpp"

namespace vgplan {

namespace k = kernels;

void ModelConfig::validate() const {
  if (layers < 0) throw ConfigError("layers must be >= 0");
  if (heads < 1 || width < 1 || width % heads != 0) {
    throw ConfigError("width must be a positive multiple of heads");
  }
  if (context < 2) throw ConfigError("context must be >= 2");
  if (vocab_size < 1) throw ConfigError("vocab_size must be set");
}

ParamLayout::ParamLayout(const ModelConfig& c, HeadKind head) {
  c.validate();
  const auto d = static_cast<std::size_t>(c.width);
  const auto f = static_cast<std::size_t>(c.ffn_width());
  const auto v = static_cast<std::size_t>(c.vocab_size);
  std::size_t at = 0;
  auto take = [&](const std::string& name, std::size_t n) {
    groups.push_back({name, at, n});
    const std::size_t off = at;
    at += n;
    return off;
  };
  tok_emb = take("tok_emb", v * d);
  pos_emb = take("pos_emb", static_cast<std::size_t>(c.context) * d);
  for (int l = 0; l < c.layers; ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    Layer L{};
    L.ln1_g = take(p + "ln1_g", d);
    L.ln1_b = take(p + "ln1_b", d);
    L.w_qkv = take(p + "w_qkv", d * 3 * d);
    L.b_qkv = take(p + "b_qkv", 3 * d);
    L.w_proj = take(p + "w_proj", d * d);
    L.b_proj = take(p + "b_proj", d);
    L.ln2_g = take(p + "ln2_g", d);
    L.ln2_b = take(p + "ln2_b", d);
    L.w_fc = take(p + "w_fc", d * f);
    L.b_fc = take(p + "b_fc", f);
    L.w_out = take(p + "w_out", f * d);
    L.b_out = take(p + "b_out", d);
    layers.push_back(L);
  }
  lnf_g = take("lnf_g", d);
  lnf_b = take("lnf_b", d);
  backbone_size = at;
  if (head == HeadKind::kLanguageModel) {
    w_lm = take("w_lm", d * v);
    b_lm = take("b_lm", v);
  } else {
    w_h1 = take("w_h1", d * d);
    b_h1 = take("b_h1", d);
    w_h2 = take("w_h2", d);
    b_h2 = take("b_h2", 1);
  }
  total = at;
}

template <class T>
Transformer<T>::Transformer(const ModelConfig& config, HeadKind head)
    : config_(config), head_(head), layout_(config, head), params_(layout_.total, T(0)) {}

template <class T>
void Transformer<T>::init(Rng& rng) {
  std::fill(params_.begin(), params_.end(), T(0));
  const auto d = static_cast<std::size_t>(config_.width);
  const auto f = static_cast<std::size_t>(config_.ffn_width());
  const auto v = static_cast<std::size_t>(config_.vocab_size);
  auto normal = [&](std::size_t off, std::size_t n, double std) {
    for (std::size_t i = 0; i < n; ++i) params_[off + i] = static_cast<T>(rng.normal() * std);
  };
  auto ones = [&](std::size_t off, std::size_t n) {
    std::fill_n(params_.begin() + static_cast<std::ptrdiff_t>(off), n, T(1));
  };
  const double residual_std = 0.02 / std::sqrt(2.0 * std::max(config_.layers, 1));
  normal(layout_.tok_emb, v * d, 0.02);
  normal(layout_.pos_emb, static_cast<std::size_t>(config_.context) * d, 0.02);
  for (const auto& L : layout_.layers) {
    ones(L.ln1_g, d);
    normal(L.w_qkv, d * 3 * d, 0.02);
    normal(L.w_proj, d * d, residual_std);
    ones(L.ln2_g, d);
    normal(L.w_fc, d * f, 0.02);
    normal(L.w_out, f * d, residual_std);
  }
  ones(layout_.lnf_g, d);
  if (head_ == HeadKind::kLanguageModel) {
    normal(layout_.w_lm, d * v, 0.02);
  } else {
    normal(layout_.w_h1, d * d, 1.0 / std::sqrt(static_cast<double>(d)));
    // w_h2 and b_h2 stay zero.
  }
}

template <class T>
bool Transformer<T>::all_finite() const {
  return std::all_of(params_.begin(), params_.end(), [](T x) { return std::isfinite(x); });
}

template <class T>
Transformer<T> classifier_from_generator(const Transformer<T>& generator, Rng& rng) {
  Transformer<T> out(generator.config(), HeadKind::kClassifier);
  out.init(rng);
  const std::size_t n = generator.layout().backbone_size;
  std::copy_n(generator.params().begin(), n, out.params().begin());
  return out;
}

namespace {

// Forward pass over sequences packed row after row, keeping every
// activation needed by the backward pass.
template <class T>
class Pass {
 public:
  struct LayerCache {
    std::vector<T> x_in, a, mean1, rstd1, qkv, probs, att, x_mid, m, mean2, rstd2, f, g;
  };

  Pass(const Transformer<T>& model, const std::vector<const TokenSequence*>& seqs)
      : model_(model), c_(model.config()), lay_(model.layout()) {
    d_ = static_cast<std::size_t>(c_.width);
    ff_ = static_cast<std::size_t>(c_.ffn_width());
    h_ = static_cast<std::size_t>(c_.heads);
    dh_ = static_cast<std::size_t>(c_.head_dim());
    std::size_t probs = 0;
    for (const auto* s : seqs) {
      if (s->empty()) throw ShapeMismatch("empty token sequence");
      if (s->size() > static_cast<std::size_t>(c_.context)) {
        throw ContextOverflow("sequence of " + std::to_string(s->size()) +
                              " tokens exceeds context " + std::to_string(c_.context));
      }
      start_.push_back(tok_.size());
      len_.push_back(s->size());
      probs_off_.push_back(probs);
      probs += h_ * s->size() * s->size();
      for (std::size_t t = 0; t < s->size(); ++t) {
        const TokenId id = (*s)[t];
        if (id < 0 || id >= c_.vocab_size) throw ShapeMismatch("token id out of vocabulary range");
        tok_.push_back(id);
        pos_.push_back(t);
      }
    }
    n_ = tok_.size();
    probs_total_ = probs;
  }

  std::size_t rows() const { return n_; }
  std::size_t width() const { return d_; }
  std::size_t sequences() const { return len_.size(); }
  std::size_t start(std::size_t s) const { return start_[s]; }
  std::size_t length(std::size_t s) const { return len_[s]; }
  TokenId token(std::size_t row) const { return tok_[row]; }
  const std::vector<T>& z() const { return z_; }
  const std::vector<LayerCache>& layers() const { return layers_; }
  std::size_t heads() const { return h_; }
  std::size_t probs_offset(std::size_t s) const { return probs_off_[s]; }

  void forward() {
    const std::size_t d = d_;
    std::vector<T> x(n_ * d);
    const T* te = model_.at(lay_.tok_emb);
    const T* pe = model_.at(lay_.pos_emb);
    for (std::size_t i = 0; i < n_; ++i) {
      const T* a = te + static_cast<std::size_t>(tok_[i]) * d;
      const T* b = pe + pos_[i] * d;
      for (std::size_t j = 0; j < d; ++j) x[i * d + j] = a[j] + b[j];
    }
    layers_.resize(lay_.layers.size());
    const T scale = T(1) / std::sqrt(static_cast<T>(dh_));
    for (std::size_t l = 0; l < lay_.layers.size(); ++l) {
      const auto& P = lay_.layers[l];
      LayerCache& L = layers_[l];
      L.x_in = x;
      L.a.resize(n_ * d);
      L.mean1.resize(n_);
      L.rstd1.resize(n_);
      for (std::size_t i = 0; i < n_; ++i) {
        k::layernorm_row(&x[i * d], d, model_.at(P.ln1_g), model_.at(P.ln1_b), &L.a[i * d],
                         L.mean1[i], L.rstd1[i]);
      }
      L.qkv.resize(n_ * 3 * d);
      k::linear_forward(L.a.data(), n_, d, model_.at(P.w_qkv), 3 * d, model_.at(P.b_qkv),
                        L.qkv.data());
      L.probs.assign(probs_total_, T(0));
      L.att.resize(n_ * d);
      for (std::size_t s = 0; s < len_.size(); ++s) {
        const std::size_t T_ = len_[s];
        const std::size_t r0 = start_[s];
        for (std::size_t h = 0; h < h_; ++h) {
          T* probs = &L.probs[probs_off_[s] + h * T_ * T_];
          const T* kbase = &L.qkv[r0 * 3 * d + d + h * dh_];
          const T* vbase = &L.qkv[r0 * 3 * d + 2 * d + h * dh_];
          for (std::size_t t = 0; t < T_; ++t) {
            k::attend_one(&L.qkv[(r0 + t) * 3 * d + h * dh_], kbase, vbase, 3 * d, t + 1, dh_,
                          scale, probs + t * T_, &L.att[(r0 + t) * d + h * dh_]);
          }
        }
      }
      std::vector<T> proj(n_ * d);
      k::linear_forward(L.att.data(), n_, d, model_.at(P.w_proj), d, model_.at(P.b_proj),
                        proj.data());
      for (std::size_t i = 0; i < n_ * d; ++i) x[i] += proj[i];
      L.x_mid = x;
      L.m.resize(n_ * d);
      L.mean2.resize(n_);
      L.rstd2.resize(n_);
      for (std::size_t i = 0; i < n_; ++i) {
        k::layernorm_row(&x[i * d], d, model_.at(P.ln2_g), model_.at(P.ln2_b), &L.m[i * d],
                         L.mean2[i], L.rstd2[i]);
      }
      L.f.resize(n_ * ff_);
      k::linear_forward(L.m.data(), n_, d, model_.at(P.w_fc), ff_, model_.at(P.b_fc), L.f.data());
      L.g.resize(n_ * ff_);
      k::gelu_forward(L.f.data(), n_ * ff_, L.g.data());
      k::linear_forward(L.g.data(), n_, ff_, model_.at(P.w_out), d, model_.at(P.b_out),
                        proj.data());
      for (std::size_t i = 0; i < n_ * d; ++i) x[i] += proj[i];
    }
    x_final_ = std::move(x);
    z_.resize(n_ * d);
    meanf_.resize(n_);
    rstdf_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      k::layernorm_row(&x_final_[i * d], d, model_.at(lay_.lnf_g), model_.at(lay_.lnf_b),
                       &z_[i * d], meanf_[i], rstdf_[i]);
    }
  }

  // dz: gradient w.r.t. the final-norm output, [rows × width].
  void backward(const std::vector<T>& dz, std::span<T> grad) {
    const std::size_t d = d_;
    T* G = grad.data();
    std::vector<T> dx(n_ * d, T(0));
    for (std::size_t i = 0; i < n_; ++i) {
      k::layernorm_row_backward(&x_final_[i * d], d, model_.at(lay_.lnf_g), meanf_[i], rstdf_[i],
                                &dz[i * d], &dx[i * d], G + lay_.lnf_g, G + lay_.lnf_b);
    }
    const T scale = T(1) / std::sqrt(static_cast<T>(dh_));
    for (std::size_t l = lay_.layers.size(); l-- > 0;) {
      const auto& P = lay_.layers[l];
      const LayerCache& L = layers_[l];
      // MLP block.
      std::vector<T> dg(n_ * ff_, T(0));
      k::linear_backward(L.g.data(), n_, ff_, model_.at(P.w_out), d, dx.data(), dg.data(),
                         G + P.w_out, G + P.b_out);
      k::gelu_backward(L.f.data(), n_ * ff_, dg.data());
      std::vector<T> dm(n_ * d, T(0));
      k::linear_backward(L.m.data(), n_, d, model_.at(P.w_fc), ff_, dg.data(), dm.data(),
                         G + P.w_fc, G + P.b_fc);
      std::vector<T> dx_mid = dx;
      for (std::size_t i = 0; i < n_; ++i) {
        k::layernorm_row_backward(&L.x_mid[i * d], d, model_.at(P.ln2_g), L.mean2[i], L.rstd2[i],
                                  &dm[i * d], &dx_mid[i * d], G + P.ln2_g, G + P.ln2_b);
      }
      // Attention block.
      std::vector<T> datt(n_ * d, T(0));
      k::linear_backward(L.att.data(), n_, d, model_.at(P.w_proj), d, dx_mid.data(), datt.data(),
                         G + P.w_proj, G + P.b_proj);
      std::vector<T> dqkv(n_ * 3 * d, T(0));
      std::vector<T> dp;
      for (std::size_t s = 0; s < len_.size(); ++s) {
        const std::size_t T_ = len_[s];
        const std::size_t r0 = start_[s];
        dp.resize(T_);
        for (std::size_t h = 0; h < h_; ++h) {
          const T* probs = &L.probs[probs_off_[s] + h * T_ * T_];
          for (std::size_t t = 0; t < T_; ++t) {
            const T* p = probs + t * T_;
            const T* dout = &datt[(r0 + t) * d + h * dh_];
            const T* q = &L.qkv[(r0 + t) * 3 * d + h * dh_];
            T* dq = &dqkv[(r0 + t) * 3 * d + h * dh_];
            T dot_sum = 0;
            for (std::size_t u = 0; u <= t; ++u) {
              const T* v = &L.qkv[(r0 + u) * 3 * d + 2 * d + h * dh_];
              dp[u] = k::dot_k(dout, v, dh_);
              dot_sum += p[u] * dp[u];
            }
            for (std::size_t u = 0; u <= t; ++u) {
              const T ds = p[u] * (dp[u] - dot_sum) * scale;
              const T* kr = &L.qkv[(r0 + u) * 3 * d + d + h * dh_];
              T* dk = &dqkv[(r0 + u) * 3 * d + d + h * dh_];
              T* dv = &dqkv[(r0 + u) * 3 * d + 2 * d + h * dh_];
              for (std::size_t i = 0; i < dh_; ++i) {
                dq[i] += ds * kr[i];
                dk[i] += ds * q[i];
                dv[i] += p[u] * dout[i];
              }
            }
          }
        }
      }
      std::vector<T> da(n_ * d, T(0));
      k::linear_backward(L.a.data(), n_, d, model_.at(P.w_qkv), 3 * d, dqkv.data(), da.data(),
                         G + P.w_qkv, G + P.b_qkv);
      dx = std::move(dx_mid);
      for (std::size_t i = 0; i < n_; ++i) {
        k::layernorm_row_backward(&L.x_in[i * d], d, model_.at(P.ln1_g), L.mean1[i], L.rstd1[i],
                                  &da[i * d], &dx[i * d], G + P.ln1_g, G + P.ln1_b);
      }
    }
    for (std::size_t i = 0; i < n_; ++i) {
      T* gt = G + lay_.tok_emb + static_cast<std::size_t>(tok_[i]) * d;
      T* gp = G + lay_.pos_emb + pos_[i] * d;
      for (std::size_t j = 0; j < d; ++j) {
        gt[j] += dx[i * d + j];
        gp[j] += dx[i * d + j];
      }
    }
  }

 private:
  const Transformer<T>& model_;
  const ModelConfig& c_;
  const ParamLayout& lay_;
  std::size_t d_ = 0, ff_ = 0, h_ = 0, dh_ = 0, n_ = 0, probs_total_ = 0;
  std::vector<std::size_t> start_, len_, probs_off_;
  std::vector<TokenId> tok_;
  std::vector<std::size_t> pos_;
  std::vector<LayerCache> layers_;
  std::vector<T> x_final_, z_, meanf_, rstdf_;
};

template <class T>
void check_grad_span(const Transformer<T>& model, std::span<T> grad) {
  if (!grad.empty() && grad.size() != model.params().size()) {
    throw ShapeMismatch("gradient buffer does not match parameter count");
  }
}

template <class T>
std::vector<T> lm_logits(const Transformer<T>& model, const Pass<T>& pass) {
  const auto d = pass.width();
  const auto v = static_cast<std::size_t>(model.config().vocab_size);
  std::vector<T> logits(pass.rows() * v);
  k::linear_forward(pass.z().data(), pass.rows(), d, model.at(model.layout().w_lm), v,
                    model.at(model.layout().b_lm), logits.data());
  return logits;
}

// Classifier head on the last row of each sequence. Returns the pre-GELU
// hidden, post-GELU hidden and logits.
template <class T>
struct HeadOut {
  std::vector<T> last, pre, hidden, logit;
};

template <class T>
HeadOut<T> classifier_head(const Transformer<T>& model, const Pass<T>& pass) {
  const auto d = pass.width();
  const auto& lay = model.layout();
  const std::size_t b = pass.sequences();
  HeadOut<T> h;
  h.last.resize(b * d);
  for (std::size_t s = 0; s < b; ++s) {
    const std::size_t row = pass.start(s) + pass.length(s) - 1;
    std::copy_n(&pass.z()[row * d], d, &h.last[s * d]);
  }
  h.pre.resize(b * d);
  k::linear_forward(h.last.data(), b, d, model.at(lay.w_h1), d, model.at(lay.b_h1), h.pre.data());
  h.hidden.resize(b * d);
  k::gelu_forward(h.pre.data(), b * d, h.hidden.data());
  h.logit.resize(b);
  k::linear_forward(h.hidden.data(), b, d, model.at(lay.w_h2), 1, model.at(lay.b_h2),
                    h.logit.data());
  return h;
}

template <class T>
T sigmoid(T x) {
  return x >= 0 ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x));
}

template <class T>
T softplus(T x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace

template <class T>
LossStats lm_loss(const Transformer<T>& model, const std::vector<LmExample>& batch,
                  std::span<T> grad) {
  if (model.head() != HeadKind::kLanguageModel) throw ShapeMismatch("lm_loss needs an LM head");
  check_grad_span(model, grad);
  std::vector<const TokenSequence*> seqs;
  std::size_t count = 0;
  for (const auto& e : batch) {
    seqs.push_back(&e.tokens);
    const std::size_t from = std::max<std::size_t>(e.loss_from, 1);
    if (e.tokens.size() > from) count += e.tokens.size() - from;
  }
  if (count == 0) throw EmptyLossMask("no position is counted by the loss mask");
  Pass<T> pass(model, seqs);
  pass.forward();
  const auto logits = lm_logits(model, pass);
  const auto v = static_cast<std::size_t>(model.config().vocab_size);
  const auto d = pass.width();

  LossStats stats;
  stats.count = count;
  std::vector<T> dlogits;
  if (!grad.empty()) dlogits.assign(logits.size(), T(0));
  const T inv_count = T(1) / static_cast<T>(count);
  double total = 0.0;
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const std::size_t from = std::max<std::size_t>(batch[s].loss_from, 1);
    for (std::size_t t = from - 1; t + 1 < pass.length(s); ++t) {
      const std::size_t row = pass.start(s) + t;
      const TokenId target = pass.token(row + 1);
      const T* lr = &logits[row * v];
      const std::size_t best = static_cast<std::size_t>(std::max_element(lr, lr + v) - lr);
      const T mx = lr[best];
      T denom = 0;
      for (std::size_t j = 0; j < v; ++j) denom += std::exp(lr[j] - mx);
      const T lse = mx + std::log(denom);
      total += static_cast<double>(lse - lr[target]);
      if (best == static_cast<std::size_t>(target)) ++stats.correct;
      if (!grad.empty()) {
        T* dl = &dlogits[row * v];
        for (std::size_t j = 0; j < v; ++j) dl[j] = std::exp(lr[j] - lse) * inv_count;
        dl[target] -= inv_count;
      }
    }
  }
  stats.loss = total / static_cast<double>(count);
  if (!grad.empty()) {
    std::vector<T> dz(pass.rows() * d, T(0));
    T* G = grad.data();
    k::linear_backward(pass.z().data(), pass.rows(), d, model.at(model.layout().w_lm), v,
                       dlogits.data(), dz.data(), G + model.layout().w_lm,
                       G + model.layout().b_lm);
    pass.backward(dz, grad);
  }
  return stats;
}

template <class T>
LossStats classifier_loss(const Transformer<T>& model, const std::vector<ClsExample>& batch,
                          std::span<T> grad) {
  if (model.head() != HeadKind::kClassifier) {
    throw ShapeMismatch("classifier_loss needs a classifier head");
  }
  check_grad_span(model, grad);
  if (batch.empty()) throw EmptyLossMask("empty classifier batch");
  std::vector<const TokenSequence*> seqs;
  for (const auto& e : batch) seqs.push_back(&e.tokens);
  Pass<T> pass(model, seqs);
  pass.forward();
  const auto head = classifier_head(model, pass);
  const std::size_t b = batch.size();
  const auto d = pass.width();
  LossStats stats;
  stats.count = b;
  double total = 0.0;
  std::vector<T> dlogit(b);
  for (std::size_t s = 0; s < b; ++s) {
    const T z = head.logit[s];
    const T y = batch[s].label ? T(1) : T(0);
    total += static_cast<double>(softplus(z) - y * z);
    const T p = sigmoid(z);
    if ((p >= T(0.5)) == batch[s].label) ++stats.correct;
    dlogit[s] = (p - y) / static_cast<T>(b);
  }
  stats.loss = total / static_cast<double>(b);
  if (!grad.empty()) {
    const auto& lay = model.layout();
    T* G = grad.data();
    std::vector<T> dhidden(b * d, T(0));
    k::linear_backward(head.hidden.data(), b, d, model.at(lay.w_h2), 1, dlogit.data(),
                       dhidden.data(), G + lay.w_h2, G + lay.b_h2);
    k::gelu_backward(head.pre.data(), b * d, dhidden.data());
    std::vector<T> dlast(b * d, T(0));
    k::linear_backward(head.last.data(), b, d, model.at(lay.w_h1), d, dhidden.data(),
                       dlast.data(), G + lay.w_h1, G + lay.b_h1);
    std::vector<T> dz(pass.rows() * d, T(0));
    for (std::size_t s = 0; s < b; ++s) {
      const std::size_t row = pass.start(s) + pass.length(s) - 1;
      std::copy_n(&dlast[s * d], d, &dz[row * d]);
    }
    pass.backward(dz, grad);
  }
  return stats;
}

template <class T>
std::vector<T> forward_logits(const Transformer<T>& model, const TokenSequence& tokens) {
  if (model.head() != HeadKind::kLanguageModel) throw ShapeMismatch("forward_logits needs an LM head");
  Pass<T> pass(model, {&tokens});
  pass.forward();
  return lm_logits(model, pass);
}

template <class T>
std::vector<T> classify_sequences(const Transformer<T>& model,
                                  const std::vector<TokenSequence>& sequences) {
  if (model.head() != HeadKind::kClassifier) throw ShapeMismatch("classify needs a classifier head");
  if (sequences.empty()) return {};
  std::vector<const TokenSequence*> seqs;
  for (const auto& s : sequences) seqs.push_back(&s);
  Pass<T> pass(model, seqs);
  pass.forward();
  const auto head = classifier_head(model, pass);
  std::vector<T> out(sequences.size());
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = sigmoid(head.logit[s]);
  return out;
}

template <class T>
std::vector<T> classifier_logits(const Transformer<T>& model,
                                 const std::vector<TokenSequence>& sequences) {
  if (model.head() != HeadKind::kClassifier) throw ShapeMismatch("classify needs a classifier head");
  if (sequences.empty()) return {};
  std::vector<const TokenSequence*> seqs;
  for (const auto& s : sequences) seqs.push_back(&s);
  Pass<T> pass(model, seqs);
  pass.forward();
  return classifier_head(model, pass).logit;
}

template <class T>
double max_attention_row_error(const Transformer<T>& model, const TokenSequence& tokens) {
  Pass<T> pass(model, {&tokens});
  pass.forward();
  const std::size_t n = tokens.size();
  double worst = 0.0;
  for (const auto& L : pass.layers()) {
    for (std::size_t h = 0; h < pass.heads(); ++h) {
      for (std::size_t t = 0; t < n; ++t) {
        double sum = 0.0;
        for (std::size_t s = 0; s <= t; ++s) sum += L.probs[pass.probs_offset(0) + h * n * n + t * n + s];
        worst = std::max(worst, std::abs(sum - 1.0));
      }
    }
  }
  return worst;
}

#define VGPLAN_INSTANTIATE(T)                                                                 \
  template class Transformer<T>;                                                              \
  template Transformer<T> classifier_from_generator<T>(const Transformer<T>&, Rng&);          \
  template LossStats lm_loss<T>(const Transformer<T>&, const std::vector<LmExample>&,         \
                                std::span<T>);                                                \
  template LossStats classifier_loss<T>(const Transformer<T>&, const std::vector<ClsExample>&, \
                                        std::span<T>);                                        \
  template std::vector<T> forward_logits<T>(const Transformer<T>&, const TokenSequence&);      \
  template std::vector<T> classify_sequences<T>(const Transformer<T>&,                        \
                                                const std::vector<TokenSequence>&);           \
  template std::vector<T> classifier_logits<T>(const Transformer<T>&,                         \
                                               const std::vector<TokenSequence>&);            \
  template double max_attention_row_error<T>(const Transformer<T>&, const TokenSequence&);

VGPLAN_INSTANTIATE(float)
VGPLAN_INSTANTIATE(double)

#undef VGPLAN_INSTANTIATE

}  // namespace vgplan
