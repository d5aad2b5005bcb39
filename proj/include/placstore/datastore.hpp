#pragma once

// Columnar key-value datastore. Keys are fixed-width float32 vectors stored
// in one contiguous block, values are token ids, and every entry carries a
// known flag assigned at ingestion. Margins are an optional column attached
// once after they have been computed.
//
// Lifecycle: append entries, freeze, then search/prune. A frozen store is
// immutable (margin attachment being the one sanctioned exception, since
// margins can only be computed against the frozen store itself) and safe to
// share across threads. Pruning produces a new store, never edits in place.

#include <cstdint>
#include <span>
#include <vector>

#include "placstore/error.hpp"

namespace placstore {

using TokenId = std::uint32_t;
using EntryId = std::uint32_t;

struct DatastoreStats {
  std::uint64_t n_total = 0;
  std::uint64_t n_known = 0;
  std::uint64_t n_unknown = 0;
  double known_ratio = 0.0;
};

class Datastore {
 public:
  // dim >= 1, vocab_size >= 2.
  Datastore(std::uint32_t dim, std::uint32_t vocab_size);

  std::uint32_t dim() const noexcept { return dim_; }
  std::uint32_t vocab_size() const noexcept { return vocab_; }
  std::uint64_t size() const noexcept { return values_.size(); }
  bool frozen() const noexcept { return frozen_; }

  // Returns the id of the new entry (= previous size). The key must have
  // exactly dim() finite components and value < vocab_size().
  EntryId append(std::span<const float> key, TokenId value, bool known);

  // Idempotent. After freezing, append and margin mutation fail.
  void freeze() noexcept { frozen_ = true; }

  std::span<const float> key(EntryId id) const;
  TokenId value(EntryId id) const;
  bool known(EntryId id) const;

  // Margin column. Absent until attach_margins() is called on the frozen
  // store; immutable afterwards.
  bool has_margins() const noexcept { return margin_kbar_ != 0; }
  std::uint32_t margin_kbar() const noexcept { return margin_kbar_; }
  std::uint32_t margin(EntryId id) const;
  void attach_margins(std::vector<std::uint32_t> margins, std::uint32_t k_bar);

  DatastoreStats stats() const;

  // Raw columns for scan-heavy consumers (index, io).
  std::span<const float> keys_flat() const noexcept { return keys_; }
  std::span<const TokenId> values_flat() const noexcept { return values_; }
  std::span<const std::uint8_t> known_flat() const noexcept { return known_; }
  std::span<const std::uint32_t> margins_flat() const noexcept { return margins_; }

 private:
  void check_id(EntryId id) const;

  std::uint32_t dim_;
  std::uint32_t vocab_;
  bool frozen_ = false;
  std::uint32_t margin_kbar_ = 0;  // 0 = margins absent
  std::vector<float> keys_;        // size() * dim_
  std::vector<TokenId> values_;
  std::vector<std::uint8_t> known_;
  std::vector<std::uint32_t> margins_;
};

}  // namespace placstore
