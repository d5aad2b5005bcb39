#pragma once

// Binary file formats, little-endian throughout:
//
//   build trace (.btrc)  magic "PLACTRB1"
//   eval trace  (.etrc)  magic "PLACTRE1"
//   datastore   (.plds)  magic "PLACDS01"
//
// Trace header (28 bytes): magic[8], version u32, dim u32, vocab_size u32,
// record_count u64. Build records are dim float32 key components followed by
// gold and model-argmax token ids (4*dim + 8 bytes). Eval records carry the
// full model distribution: key, gold, then vocab_size float32 probabilities.
//
// Datastore layout: the same 28-byte header shape (entry count in place of
// record_count), then the key block (n*dim f32), value block (n u32), known
// bitset (ceil(n/8) bytes, entry i at bit i%8 of byte i/8), one presence
// byte for margins, and when present the margin cap (u32) plus n u32
// margins.
//
// Readers validate sizes against the actual file length before parsing and
// report the exact byte offset of any malformed field. Writers are
// deterministic: the same inputs produce byte-identical files.

#include <cstdint>
#include <string>
#include <vector>

#include "placstore/datastore.hpp"

namespace placstore {

struct BuildTraceRecord {
  std::vector<float> key;
  TokenId gold = 0;
  TokenId model_argmax = 0;
};

struct EvalTraceRecord {
  std::vector<float> key;
  TokenId gold = 0;
  std::vector<float> model_dist;  // length vocab_size, sums to 1 within 1e-5
};

struct TraceHeader {
  std::string magic;  // 8 bytes
  std::uint32_t version = 1;
  std::uint32_t dim = 0;
  std::uint32_t vocab_size = 0;
  std::uint64_t record_count = 0;
};

inline constexpr char kBuildTraceMagic[] = "PLACTRB1";
inline constexpr char kEvalTraceMagic[] = "PLACTRE1";
inline constexpr char kDatastoreMagic[] = "PLACDS01";
inline constexpr std::size_t kTraceHeaderBytes = 28;

void write_build_trace(const std::string& path, std::uint32_t dim, std::uint32_t vocab_size,
                       const std::vector<BuildTraceRecord>& records);
void write_eval_trace(const std::string& path, std::uint32_t dim, std::uint32_t vocab_size,
                      const std::vector<EvalTraceRecord>& records);

std::pair<TraceHeader, std::vector<BuildTraceRecord>> read_build_trace(const std::string& path);
std::pair<TraceHeader, std::vector<EvalTraceRecord>> read_eval_trace(const std::string& path);

// The store must be frozen. Margins (and their cap) survive the roundtrip,
// including their absence.
void save_datastore(const std::string& path, const Datastore& store);
Datastore load_datastore(const std::string& path);

// Bit-level equality of two stores (keys compared as raw float bits).
bool stores_equal(const Datastore& a, const Datastore& b);

}  // namespace placstore
