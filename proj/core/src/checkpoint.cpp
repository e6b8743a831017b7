#include "vgplan/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include <zlib.h>

#include "vgplan/errors.hpp"

namespace vgplan {

namespace {

constexpr char kMagic[8] = {'V', 'G', 'P', 'L', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const char*>(p);
    buf_.insert(buf_.end(), c, c + n);
  }
  template <class U>
  void pod(U v) {
    bytes(&v, sizeof v);
  }
  const std::string& data() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(const char* p, std::size_t n) : p_(p), n_(n) {}
  void bytes(void* out, std::size_t n) {
    if (n > n_ - at_) throw ChecksumError("checkpoint truncated");
    std::memcpy(out, p_ + at_, n);
    at_ += n;
  }
  template <class U>
  U pod() {
    U v;
    bytes(&v, sizeof v);
    return v;
  }
  std::size_t remaining() const { return n_ - at_; }

 private:
  const char* p_;
  std::size_t n_;
  std::size_t at_ = 0;
};

std::uint32_t crc32_of(const char* p, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(p), chunk);
    p += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Transformer<float>& model,
                     const Vocabulary& vocab) {
  static_assert(std::endian::native == std::endian::little, "checkpoint format is little-endian");
  const ModelConfig& c = model.config();
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.pod<std::uint32_t>(kCheckpointVersion);
  w.pod<std::uint32_t>(static_cast<std::uint32_t>(model.head()));
  for (int v : {c.layers, c.heads, c.width, c.context, c.vocab_size}) w.pod<std::int32_t>(v);
  w.pod<std::uint32_t>(static_cast<std::uint32_t>(vocab.size()));
  for (const auto& t : vocab.tokens()) {
    w.pod<std::uint32_t>(static_cast<std::uint32_t>(t.size()));
    w.bytes(t.data(), t.size());
  }
  const auto params = model.params();
  w.pod<std::uint64_t>(params.size());
  w.bytes(params.data(), params.size() * sizeof(float));
  const std::uint32_t crc = crc32_of(w.data().data(), w.data().size());

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(w.data().data(), static_cast<std::streamsize>(w.data().size()));
  out.write(reinterpret_cast<const char*>(&crc), sizeof crc);
  if (!out) throw IoError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const Vocabulary* expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < sizeof kMagic || std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0) {
    if (buf.size() < sizeof kMagic) throw ChecksumError("checkpoint truncated");
    throw VersionMismatch(path.string() + " is not a checkpoint");
  }
  if (buf.size() < sizeof kMagic + 8) throw ChecksumError("checkpoint truncated");
  Reader r(buf.data(), buf.size());
  char magic[sizeof kMagic];
  r.bytes(magic, sizeof magic);
  const auto version = r.pod<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw VersionMismatch("checkpoint version " + std::to_string(version) + ", expected " +
                          std::to_string(kCheckpointVersion));
  }
  std::uint32_t stored_crc = 0;
  std::memcpy(&stored_crc, buf.data() + buf.size() - sizeof stored_crc, sizeof stored_crc);
  if (crc32_of(buf.data(), buf.size() - sizeof stored_crc) != stored_crc) {
    throw ChecksumError("checkpoint checksum mismatch: " + path.string());
  }
  Reader body(buf.data(), buf.size() - sizeof stored_crc);
  body.bytes(magic, sizeof magic);
  body.pod<std::uint32_t>();
  const auto head = body.pod<std::uint32_t>();
  if (head > static_cast<std::uint32_t>(HeadKind::kClassifier)) throw VersionMismatch("unknown head kind");
  ModelConfig c;
  c.layers = body.pod<std::int32_t>();
  c.heads = body.pod<std::int32_t>();
  c.width = body.pod<std::int32_t>();
  c.context = body.pod<std::int32_t>();
  c.vocab_size = body.pod<std::int32_t>();
  const auto ntok = body.pod<std::uint32_t>();
  std::vector<std::string> tokens;
  for (std::uint32_t i = 0; i < ntok; ++i) {
    const auto len = body.pod<std::uint32_t>();
    if (len > body.remaining()) throw ChecksumError("checkpoint truncated");
    std::string t(len, '\0');
    body.bytes(t.data(), len);
    tokens.push_back(std::move(t));
  }
  Vocabulary vocab = Vocabulary::from_tokens(std::move(tokens));
  if (static_cast<int>(vocab.size()) != c.vocab_size) {
    throw VersionMismatch("vocabulary size disagrees with model config");
  }
  if (expected && !(vocab == *expected)) {
    throw VersionMismatch("checkpoint vocabulary differs from the expected vocabulary");
  }
  Transformer<float> model(c, static_cast<HeadKind>(head));
  const auto count = body.pod<std::uint64_t>();
  if (count != model.params().size()) throw VersionMismatch("parameter count disagrees with config");
  body.bytes(model.params().data(), count * sizeof(float));
  if (body.remaining() != 0) throw ChecksumError("trailing bytes in checkpoint");
  return {std::move(model), std::move(vocab)};
}

}  // namespace vgplan
