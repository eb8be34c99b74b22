#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svmf/fingerprint.hpp"

namespace svmf {

// Normalized Euclidean dissimilarity between two fingerprints:
//   ||f1 - f2|| / ||f1 + f2||
// 0 for identical fingerprints, 1 for disjoint nonnegative ones, and
// 0 for two empty fingerprints by convention. Errors on n mismatch.
double similarity(const SVMF& f1, const SVMF& f2);

struct RankedResult {
  std::string key;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
};

// Persistent keyed fingerprint collection with brute-force ranked search.
// Insertion order is preserved and breaks score ties. The first add fixes
// the index's n. Concurrent readers are safe; mutation needs exclusive
// access.
class FingerprintIndex {
 public:
  FingerprintIndex() = default;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::uint32_t n() const { return n_; }

  void add(const std::string& key, SVMF fp);
  bool contains(const std::string& key) const;
  const SVMF& fingerprint(const std::string& key) const;
  const std::vector<std::pair<std::string, SVMF>>& entries() const {
    return entries_;
  }

  // Top-k by ascending score; k larger than the index returns everything.
  std::vector<RankedResult> search(const SVMF& query, std::size_t k) const;

  // 1 + entries scoring strictly below the target + tied entries inserted
  // before it.
  std::size_t rank_of(const SVMF& query, const std::string& target_key) const;

  bool operator==(const FingerprintIndex& other) const;

 private:
  std::uint32_t n_ = 0;
  std::vector<std::pair<std::string, SVMF>> entries_;
};

// Index file: magic "SVIX", version u8, n u32, entry count u32, then per
// entry (key length u16, key bytes UTF-8, SVMF binary payload).
void index_save(const FingerprintIndex& idx, const std::string& path);
FingerprintIndex index_load(const std::string& path);

std::vector<std::uint8_t> encode_index(const FingerprintIndex& idx);
FingerprintIndex decode_index(const std::vector<std::uint8_t>& bytes);

}  // namespace svmf
