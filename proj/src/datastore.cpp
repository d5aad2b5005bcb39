#include "placstore/datastore.hpp"

#include <cmath>
#include <string>

namespace placstore {

Datastore::Datastore(std::uint32_t dim, std::uint32_t vocab_size) : dim_(dim), vocab_(vocab_size) {
  if (dim == 0) throw InvalidArgument("datastore: dim must be >= 1");
  if (vocab_size < 2) throw InvalidArgument("datastore: vocab_size must be >= 2");
}

EntryId Datastore::append(std::span<const float> key, TokenId value, bool known) {
  if (frozen_) throw StateError("datastore: append on a frozen store");
  if (key.size() != dim_) {
    throw InvalidArgument("datastore: key has " + std::to_string(key.size()) +
                          " components, expected " + std::to_string(dim_));
  }
  for (const float c : key) {
    if (!std::isfinite(c)) throw InvalidArgument("datastore: key component is not finite");
  }
  if (value >= vocab_) {
    throw InvalidArgument("datastore: value " + std::to_string(value) +
                          " out of vocabulary (size " + std::to_string(vocab_) + ")");
  }
  keys_.insert(keys_.end(), key.begin(), key.end());
  values_.push_back(value);
  known_.push_back(known ? 1 : 0);
  return static_cast<EntryId>(values_.size() - 1);
}

void Datastore::check_id(EntryId id) const {
  if (id >= values_.size()) {
    throw InvalidArgument("datastore: entry id " + std::to_string(id) + " out of range (size " +
                          std::to_string(values_.size()) + ")");
  }
}

std::span<const float> Datastore::key(EntryId id) const {
  check_id(id);
  return std::span<const float>(keys_.data() + static_cast<std::size_t>(id) * dim_, dim_);
}

TokenId Datastore::value(EntryId id) const {
  check_id(id);
  return values_[id];
}

bool Datastore::known(EntryId id) const {
  check_id(id);
  return known_[id] != 0;
}

std::uint32_t Datastore::margin(EntryId id) const {
  check_id(id);
  if (!has_margins()) throw StateError("datastore: margins have not been computed");
  return margins_[id];
}

void Datastore::attach_margins(std::vector<std::uint32_t> margins, std::uint32_t k_bar) {
  if (has_margins()) throw StateError("datastore: margins already attached");
  if (k_bar == 0) throw InvalidArgument("datastore: margin k_bar must be >= 1");
  if (margins.size() != values_.size()) {
    throw InvalidArgument("datastore: margin column size mismatch");
  }
  for (const std::uint32_t m : margins) {
    if (m > k_bar) throw InvalidArgument("datastore: margin exceeds k_bar");
  }
  margins_ = std::move(margins);
  margin_kbar_ = k_bar;
}

DatastoreStats Datastore::stats() const {
  if (values_.empty()) throw InsufficientData("datastore: stats on an empty store");
  DatastoreStats s;
  s.n_total = values_.size();
  for (const std::uint8_t k : known_) s.n_known += k;
  s.n_unknown = s.n_total - s.n_known;
  s.known_ratio = static_cast<double>(s.n_known) / static_cast<double>(s.n_total);
  return s;
}

}  // namespace placstore
