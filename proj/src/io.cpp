#include "placstore/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace placstore {
namespace {

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  put_u32(out, static_cast<std::uint32_t>(v & 0xffffffffu));
  put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open for writing: " + path, 0);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed: " + path, 0);
}

// Sequential parser over an in-memory file image; every getter checks the
// remaining length so a lying record count can never cause an over-read.
class Parser {
 public:
  Parser(std::string bytes, std::string path) : bytes_(std::move(bytes)), path_(std::move(path)) {}

  std::size_t offset() const { return pos_; }
  std::size_t size() const { return bytes_.size(); }
  const std::string& path() const { return path_; }

  std::uint32_t get_u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(bytes_[pos_ + i]);
    pos_ += 4;
    return v;
  }

  std::uint64_t get_u64() {
    const std::uint64_t lo = get_u32();
    const std::uint64_t hi = get_u32();
    return lo | (hi << 32);
  }

  float get_f32() { return std::bit_cast<float>(get_u32()); }

  std::uint8_t get_u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }

  std::string get_bytes(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    throw FormatError(path_ + ": " + msg, at);
  }
  [[noreturn]] void fail(const std::string& msg) const { fail(msg, pos_); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) fail("truncated file, expected " + std::to_string(n) + " more bytes");
  }

  std::string bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

Parser open_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open: " + path, 0);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return Parser(std::move(bytes), path);
}

std::string header_bytes(const char* magic, std::uint32_t dim, std::uint32_t vocab,
                         std::uint64_t count) {
  std::string out;
  out.append(magic, 8);
  put_u32(out, 1);  // version
  put_u32(out, dim);
  put_u32(out, vocab);
  put_u64(out, count);
  return out;
}

TraceHeader parse_header(Parser& p, const char* expected_magic) {
  TraceHeader h;
  h.magic = p.get_bytes(8);
  if (h.magic != std::string(expected_magic, 8)) p.fail("bad magic \"" + h.magic + "\"", 0);
  h.version = p.get_u32();
  if (h.version != 1) p.fail("unsupported version " + std::to_string(h.version), 8);
  h.dim = p.get_u32();
  if (h.dim == 0) p.fail("dim must be >= 1", 12);
  h.vocab_size = p.get_u32();
  if (h.vocab_size < 2) p.fail("vocab_size must be >= 2", 16);
  h.record_count = p.get_u64();
  return h;
}

// Total size check up front: a truncated file names the offset where the
// file ends, a padded one the offset where trailing bytes begin.
void check_exact_size(Parser& p, std::uint64_t per_record, std::uint64_t count) {
  const std::uint64_t expected = kTraceHeaderBytes + per_record * count;
  if (p.size() < expected) {
    p.fail("file truncated: " + std::to_string(p.size()) + " bytes, expected " +
               std::to_string(expected),
           p.size());
  }
  if (p.size() > expected) p.fail("trailing bytes after last record", expected);
}

void check_token(Parser& p, std::uint32_t token, std::uint32_t vocab, const char* what,
                 std::size_t at) {
  if (token >= vocab) {
    p.fail(std::string(what) + " token " + std::to_string(token) + " out of vocabulary", at);
  }
}

std::vector<float> read_key(Parser& p, std::uint32_t dim) {
  std::vector<float> key(dim);
  for (std::uint32_t d = 0; d < dim; ++d) {
    const std::size_t at = p.offset();
    key[d] = p.get_f32();
    if (!std::isfinite(key[d])) p.fail("non-finite key component", at);
  }
  return key;
}

}  // namespace

void write_build_trace(const std::string& path, std::uint32_t dim, std::uint32_t vocab_size,
                       const std::vector<BuildTraceRecord>& records) {
  std::string out = header_bytes(kBuildTraceMagic, dim, vocab_size, records.size());
  for (const auto& r : records) {
    if (r.key.size() != dim) throw InvalidArgument("build trace: record key dim mismatch");
    if (r.gold >= vocab_size || r.model_argmax >= vocab_size) {
      throw InvalidArgument("build trace: record token out of vocabulary");
    }
    for (const float c : r.key) put_f32(out, c);
    put_u32(out, r.gold);
    put_u32(out, r.model_argmax);
  }
  write_file(path, out);
}

void write_eval_trace(const std::string& path, std::uint32_t dim, std::uint32_t vocab_size,
                      const std::vector<EvalTraceRecord>& records) {
  std::string out = header_bytes(kEvalTraceMagic, dim, vocab_size, records.size());
  for (const auto& r : records) {
    if (r.key.size() != dim) throw InvalidArgument("eval trace: record key dim mismatch");
    if (r.gold >= vocab_size) throw InvalidArgument("eval trace: record token out of vocabulary");
    if (r.model_dist.size() != vocab_size) {
      throw InvalidArgument("eval trace: model distribution length mismatch");
    }
    double sum = 0.0;
    for (const float q : r.model_dist) {
      if (!(q >= 0.0f)) throw InvalidArgument("eval trace: negative model probability");
      sum += q;
    }
    if (std::abs(sum - 1.0) > 1e-5) throw InvalidArgument("eval trace: model distribution does not sum to 1");
    for (const float c : r.key) put_f32(out, c);
    put_u32(out, r.gold);
    for (const float q : r.model_dist) put_f32(out, q);
  }
  write_file(path, out);
}

std::pair<TraceHeader, std::vector<BuildTraceRecord>> read_build_trace(const std::string& path) {
  Parser p = open_file(path);
  TraceHeader h = parse_header(p, kBuildTraceMagic);
  check_exact_size(p, 4ull * h.dim + 8, h.record_count);
  std::vector<BuildTraceRecord> records;
  records.reserve(h.record_count);
  for (std::uint64_t i = 0; i < h.record_count; ++i) {
    BuildTraceRecord r;
    r.key = read_key(p, h.dim);
    std::size_t at = p.offset();
    r.gold = p.get_u32();
    check_token(p, r.gold, h.vocab_size, "gold", at);
    at = p.offset();
    r.model_argmax = p.get_u32();
    check_token(p, r.model_argmax, h.vocab_size, "model argmax", at);
    records.push_back(std::move(r));
  }
  return {h, std::move(records)};
}

std::pair<TraceHeader, std::vector<EvalTraceRecord>> read_eval_trace(const std::string& path) {
  Parser p = open_file(path);
  TraceHeader h = parse_header(p, kEvalTraceMagic);
  check_exact_size(p, 4ull * h.dim + 4 + 4ull * h.vocab_size, h.record_count);
  std::vector<EvalTraceRecord> records;
  records.reserve(h.record_count);
  for (std::uint64_t i = 0; i < h.record_count; ++i) {
    EvalTraceRecord r;
    r.key = read_key(p, h.dim);
    const std::size_t at = p.offset();
    r.gold = p.get_u32();
    check_token(p, r.gold, h.vocab_size, "gold", at);
    r.model_dist.resize(h.vocab_size);
    const std::size_t dist_at = p.offset();
    double sum = 0.0;
    for (std::uint32_t v = 0; v < h.vocab_size; ++v) {
      const std::size_t cat = p.offset();
      r.model_dist[v] = p.get_f32();
      if (!(r.model_dist[v] >= 0.0f)) p.fail("negative model probability", cat);
      sum += r.model_dist[v];
    }
    if (std::abs(sum - 1.0) > 1e-5) p.fail("model distribution does not sum to 1", dist_at);
    records.push_back(std::move(r));
  }
  return {h, std::move(records)};
}

void save_datastore(const std::string& path, const Datastore& store) {
  if (!store.frozen()) throw StateError("save_datastore: store must be frozen");
  const std::uint64_t n = store.size();
  std::string out = header_bytes(kDatastoreMagic, store.dim(), store.vocab_size(), n);
  for (const float c : store.keys_flat()) put_f32(out, c);
  for (const TokenId v : store.values_flat()) put_u32(out, v);
  std::string bits((n + 7) / 8, '\0');
  const auto known = store.known_flat();
  for (std::uint64_t i = 0; i < n; ++i) {
    if (known[i]) bits[i / 8] |= static_cast<char>(1u << (i % 8));
  }
  out += bits;
  out.push_back(store.has_margins() ? 1 : 0);
  if (store.has_margins()) {
    put_u32(out, store.margin_kbar());
    for (const std::uint32_t m : store.margins_flat()) put_u32(out, m);
  }
  write_file(path, out);
}

Datastore load_datastore(const std::string& path) {
  Parser p = open_file(path);
  const TraceHeader h = parse_header(p, kDatastoreMagic);
  const std::uint64_t n = h.record_count;

  // Minimum size with margins absent; the margin block is checked after the
  // presence byte is known.
  const std::uint64_t base = kTraceHeaderBytes + n * (4ull * h.dim + 4) + (n + 7) / 8 + 1;
  if (p.size() < base) {
    p.fail("file truncated: " + std::to_string(p.size()) + " bytes, expected at least " +
               std::to_string(base),
           p.size());
  }

  Datastore store(h.dim, h.vocab_size);
  std::vector<std::vector<float>> keys(n);
  for (std::uint64_t i = 0; i < n; ++i) keys[i] = read_key(p, h.dim);
  std::vector<TokenId> values(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::size_t at = p.offset();
    values[i] = p.get_u32();
    check_token(p, values[i], h.vocab_size, "value", at);
  }
  const std::string bits = p.get_bytes((n + 7) / 8);
  for (std::uint64_t i = 0; i < n; ++i) {
    const bool known = (static_cast<std::uint8_t>(bits[i / 8]) >> (i % 8)) & 1u;
    store.append(keys[i], values[i], known);
  }
  store.freeze();

  const std::size_t flag_at = p.offset();
  const std::uint8_t has_margins = p.get_u8();
  if (has_margins > 1) p.fail("margin presence flag must be 0 or 1", flag_at);
  if (has_margins) {
    const std::size_t kbar_at = p.offset();
    const std::uint32_t k_bar = p.get_u32();
    if (k_bar == 0) p.fail("margin k_bar must be >= 1", kbar_at);
    std::vector<std::uint32_t> margins(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::size_t at = p.offset();
      margins[i] = p.get_u32();
      if (margins[i] > k_bar) p.fail("margin exceeds k_bar", at);
    }
    store.attach_margins(std::move(margins), k_bar);
  }
  if (p.offset() != p.size()) p.fail("trailing bytes after datastore", p.offset());
  return store;
}

bool stores_equal(const Datastore& a, const Datastore& b) {
  if (a.dim() != b.dim() || a.vocab_size() != b.vocab_size() || a.size() != b.size()) return false;
  if (a.has_margins() != b.has_margins() || a.margin_kbar() != b.margin_kbar()) return false;
  const auto ak = a.keys_flat();
  const auto bk = b.keys_flat();
  if (std::memcmp(ak.data(), bk.data(), ak.size() * sizeof(float)) != 0) return false;
  const auto av = a.values_flat();
  const auto bv = b.values_flat();
  if (!std::equal(av.begin(), av.end(), bv.begin())) return false;
  const auto akn = a.known_flat();
  const auto bkn = b.known_flat();
  if (!std::equal(akn.begin(), akn.end(), bkn.begin())) return false;
  const auto am = a.margins_flat();
  const auto bm = b.margins_flat();
  return std::equal(am.begin(), am.end(), bm.begin());
}

}  // namespace placstore
