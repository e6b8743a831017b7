#pragma once

#include <span>
#include <vector>

#include "vgplan/transformer.hpp"

namespace vgplan {

template <class T>
class Decoder;

// Keys and values of every layer for one growing sequence.
template <class T>
class KvCache {
 public:
  KvCache() = default;
  explicit KvCache(const ModelConfig& config);

  std::size_t length() const { return len_; }
  std::size_t capacity() const { return context_; }
  // Drops everything after the first n positions.
  void truncate(std::size_t n);
  // Makes this cache hold the first n positions of `other`.
  void assign_prefix(const KvCache& other, std::size_t n);

 private:
  friend class Decoder<T>;
  T* keys(std::size_t layer) { return data_.data() + (layer * 2) * context_ * d_; }
  T* values(std::size_t layer) { return data_.data() + (layer * 2 + 1) * context_ * d_; }

  std::vector<T> data_;
  std::size_t len_ = 0, layers_ = 0, context_ = 0, d_ = 0;
};

// Incremental evaluation of a language-model transformer. Several caches may
// advance in one call; since every kernel treats rows independently, a
// sequence's logits are bitwise identical to forward_logits on the full
// sequence regardless of what else shares the call.
template <class T>
class Decoder {
 public:
  explicit Decoder(const Transformer<T>& model);

  // Appends tokens[i] to *caches[i] and returns the logits after the last
  // appended token of each, row-major [caches.size() × vocab]. Throws
  // ContextOverflow when a cache would exceed the context window.
  std::vector<T> advance(const std::vector<KvCache<T>*>& caches,
                         const std::vector<std::span<const TokenId>>& tokens);

  const Transformer<T>& model() const { return model_; }

 private:
  const Transformer<T>& model_;
};

}  // namespace vgplan
