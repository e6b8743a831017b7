#include "vgplan/decoder.hpp"

#include <algorithm>
#include <cmath>

#include "vgplan/errors.hpp"
#include "vgplan/kernels.hpp"

namespace vgplan {

namespace k = kernels;

template <class T>
KvCache<T>::KvCache(const ModelConfig& c)
    : layers_(static_cast<std::size_t>(c.layers)),
      context_(static_cast<std::size_t>(c.context)),
      d_(static_cast<std::size_t>(c.width)) {
  data_.assign(layers_ * 2 * context_ * d_, T(0));
}

template <class T>
void KvCache<T>::truncate(std::size_t n) {
  len_ = std::min(len_, n);
}

template <class T>
void KvCache<T>::assign_prefix(const KvCache& other, std::size_t n) {
  if (n > other.len_) throw ShapeMismatch("prefix longer than source cache");
  if (data_.size() != other.data_.size()) {
    layers_ = other.layers_;
    context_ = other.context_;
    d_ = other.d_;
    data_.assign(other.data_.size(), T(0));
  }
  for (std::size_t blk = 0; blk < layers_ * 2; ++blk) {
    const std::size_t off = blk * context_ * d_;
    std::copy_n(other.data_.begin() + static_cast<std::ptrdiff_t>(off), n * d_,
                data_.begin() + static_cast<std::ptrdiff_t>(off));
  }
  len_ = n;
}

template <class T>
Decoder<T>::Decoder(const Transformer<T>& model) : model_(model) {
  if (model.head() != HeadKind::kLanguageModel) throw ShapeMismatch("decoder needs an LM head");
}

template <class T>
std::vector<T> Decoder<T>::advance(const std::vector<KvCache<T>*>& caches,
                                   const std::vector<std::span<const TokenId>>& tokens) {
  if (caches.size() != tokens.size()) throw ShapeMismatch("one token run per cache expected");
  const ModelConfig& c = model_.config();
  const ParamLayout& lay = model_.layout();
  const auto d = static_cast<std::size_t>(c.width);
  const auto ff = static_cast<std::size_t>(c.ffn_width());
  const auto heads = static_cast<std::size_t>(c.heads);
  const auto dh = static_cast<std::size_t>(c.head_dim());
  const auto v = static_cast<std::size_t>(c.vocab_size);

  // Row r is token `tok[r]` at position `pos[r]` of cache `owner[r]`.
  std::vector<std::size_t> owner, pos;
  std::vector<TokenId> tok;
  std::vector<std::size_t> last_row(caches.size());
  for (std::size_t i = 0; i < caches.size(); ++i) {
    KvCache<T>& kv = *caches[i];
    if (kv.data_.empty()) kv = KvCache<T>(c);
    if (kv.layers_ != lay.layers.size() || kv.d_ != d) throw ShapeMismatch("cache/model mismatch");
    if (tokens[i].empty()) throw ShapeMismatch("nothing to append");
    if (kv.len_ + tokens[i].size() > kv.context_) {
      throw ContextOverflow("sequence would exceed context " + std::to_string(kv.context_));
    }
    for (std::size_t j = 0; j < tokens[i].size(); ++j) {
      const TokenId id = tokens[i][j];
      if (id < 0 || id >= c.vocab_size) throw ShapeMismatch("token id out of vocabulary range");
      owner.push_back(i);
      pos.push_back(kv.len_ + j);
      tok.push_back(id);
    }
    last_row[i] = tok.size() - 1;
  }
  const std::size_t n = tok.size();

  std::vector<T> x(n * d);
  const T* te = model_.at(lay.tok_emb);
  const T* pe = model_.at(lay.pos_emb);
  for (std::size_t r = 0; r < n; ++r) {
    const T* a = te + static_cast<std::size_t>(tok[r]) * d;
    const T* b = pe + pos[r] * d;
    for (std::size_t j = 0; j < d; ++j) x[r * d + j] = a[j] + b[j];
  }

  std::vector<T> a(n * d), qkv(n * 3 * d), att(n * d), proj(n * d), f(n * ff), g(n * ff);
  std::vector<T> probs(static_cast<std::size_t>(c.context));
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  T mean, rstd;
  for (std::size_t l = 0; l < lay.layers.size(); ++l) {
    const auto& P = lay.layers[l];
    for (std::size_t r = 0; r < n; ++r) {
      k::layernorm_row(&x[r * d], d, model_.at(P.ln1_g), model_.at(P.ln1_b), &a[r * d], mean, rstd);
    }
    k::linear_forward(a.data(), n, d, model_.at(P.w_qkv), 3 * d, model_.at(P.b_qkv), qkv.data());
    for (std::size_t r = 0; r < n; ++r) {
      KvCache<T>& kv = *caches[owner[r]];
      std::copy_n(&qkv[r * 3 * d + d], d, kv.keys(l) + pos[r] * d);
      std::copy_n(&qkv[r * 3 * d + 2 * d], d, kv.values(l) + pos[r] * d);
    }
    for (std::size_t r = 0; r < n; ++r) {
      KvCache<T>& kv = *caches[owner[r]];
      for (std::size_t h = 0; h < heads; ++h) {
        k::attend_one(&qkv[r * 3 * d + h * dh], kv.keys(l) + h * dh, kv.values(l) + h * dh, d,
                      pos[r] + 1, dh, scale, probs.data(), &att[r * d + h * dh]);
      }
    }
    k::linear_forward(att.data(), n, d, model_.at(P.w_proj), d, model_.at(P.b_proj), proj.data());
    for (std::size_t i = 0; i < n * d; ++i) x[i] += proj[i];
    for (std::size_t r = 0; r < n; ++r) {
      k::layernorm_row(&x[r * d], d, model_.at(P.ln2_g), model_.at(P.ln2_b), &a[r * d], mean, rstd);
    }
    k::linear_forward(a.data(), n, d, model_.at(P.w_fc), ff, model_.at(P.b_fc), f.data());
    k::gelu_forward(f.data(), n * ff, g.data());
    k::linear_forward(g.data(), n, ff, model_.at(P.w_out), d, model_.at(P.b_out), proj.data());
    for (std::size_t i = 0; i < n * d; ++i) x[i] += proj[i];
  }
  for (std::size_t i = 0; i < caches.size(); ++i) caches[i]->len_ += tokens[i].size();

  const std::size_t m = caches.size();
  std::vector<T> z(m * d);
  for (std::size_t i = 0; i < m; ++i) {
    k::layernorm_row(&x[last_row[i] * d], d, model_.at(lay.lnf_g), model_.at(lay.lnf_b), &z[i * d],
                     mean, rstd);
  }
  std::vector<T> logits(m * v);
  k::linear_forward(z.data(), m, d, model_.at(lay.w_lm), v, model_.at(lay.b_lm), logits.data());
  return logits;
}

template class KvCache<float>;
template class KvCache<double>;
template class Decoder<float>;
template class Decoder<double>;

}  // namespace vgplan
