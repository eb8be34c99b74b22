#include "svmf/retrieval.hpp"

#include <algorithm>
#include <cmath>

#include "binary_io.hpp"
#include "codec_detail.hpp"
#include "svmf/io.hpp"
#include "svmf/errors.hpp"

namespace svmf {

double similarity(const SVMF& f1, const SVMF& f2) {
  if (f1.n() != f2.n()) {
    throw ComparisonError("fingerprint size mismatch: n=" +
                          std::to_string(f1.n()) + " vs n=" +
                          std::to_string(f2.n()));
  }
  const auto& a = f1.entries();
  const auto& b = f2.entries();
  double diff_sq = 0.0;
  double sum_sq = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    double va = 0.0;
    double vb = 0.0;
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      va = a[i++].second;
    } else if (i == a.size() || b[j].first < a[i].first) {
      vb = b[j++].second;
    } else {
      va = a[i++].second;
      vb = b[j++].second;
    }
    const double diff = va - vb;
    const double sum = va + vb;
    diff_sq += diff * diff;
    sum_sq += sum * sum;
  }
  if (sum_sq == 0.0) {
    // Identical absences.
    return 0.0;
  }
  return std::sqrt(diff_sq) / std::sqrt(sum_sq);
}

void FingerprintIndex::add(const std::string& key, SVMF fp) {
  if (contains(key)) {
    throw ConflictError("key '" + key + "' already present");
  }
  if (entries_.empty()) {
    n_ = fp.n();
  } else if (fp.n() != n_) {
    throw ComparisonError("fingerprint n=" + std::to_string(fp.n()) +
                          " does not match index n=" + std::to_string(n_));
  }
  entries_.emplace_back(key, std::move(fp));
}

bool FingerprintIndex::contains(const std::string& key) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const auto& entry) { return entry.first == key; });
}

const SVMF& FingerprintIndex::fingerprint(const std::string& key) const {
  for (const auto& [entry_key, fp] : entries_) {
    if (entry_key == key) {
      return fp;
    }
  }
  throw LookupError("key '" + key + "' not in index");
}

std::vector<RankedResult> FingerprintIndex::search(const SVMF& query,
                                                   std::size_t k) const {
  if (entries_.empty()) {
    throw DomainError("search on an empty index");
  }
  if (k == 0) {
    throw DomainError("k must be at least 1");
  }
  std::vector<RankedResult> results;
  results.reserve(entries_.size());
  for (const auto& [key, fp] : entries_) {
    results.push_back({key, similarity(query, fp), 0});
  }
  // Stable sort keeps insertion order among score ties.
  std::stable_sort(results.begin(), results.end(),
                   [](const RankedResult& a, const RankedResult& b) {
                     return a.score < b.score;
                   });
  if (k < results.size()) {
    results.resize(k);
  }
  for (std::size_t rank = 0; rank < results.size(); ++rank) {
    results[rank].rank = rank + 1;
  }
  return results;
}

std::size_t FingerprintIndex::rank_of(const SVMF& query,
                                      const std::string& target_key) const {
  std::size_t target_pos = entries_.size();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].first == target_key) {
      target_pos = i;
      break;
    }
  }
  if (target_pos == entries_.size()) {
    throw LookupError("target key '" + target_key + "' not in index");
  }
  const double target_score = similarity(query, entries_[target_pos].second);
  std::size_t rank = 1;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i == target_pos) {
      continue;
    }
    const double score = similarity(query, entries_[i].second);
    if (score < target_score || (score == target_score && i < target_pos)) {
      ++rank;
    }
  }
  return rank;
}

bool FingerprintIndex::operator==(const FingerprintIndex& other) const {
  if (n_ != other.n_ || entries_.size() != other.entries_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].first != other.entries_[i].first ||
        !(entries_[i].second == other.entries_[i].second)) {
      return false;
    }
  }
  return true;
}

namespace {

constexpr char kIndexMagic[4] = {'S', 'V', 'I', 'X'};
constexpr std::uint8_t kIndexVersion = 1;

}  // namespace

std::vector<std::uint8_t> encode_index(const FingerprintIndex& idx) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kIndexMagic, kIndexMagic + 4);
  detail::put_u8(out, kIndexVersion);
  detail::put_u32(out, idx.n());
  detail::put_u32(out, static_cast<std::uint32_t>(idx.size()));
  for (const auto& [key, fp] : idx.entries()) {
    if (key.size() > 0xFFFF) {
      throw ValidationError("index key longer than 65535 bytes");
    }
    detail::put_u16(out, static_cast<std::uint16_t>(key.size()));
    detail::put_bytes(out, key);
    const auto payload = encode_svmf(fp);
    out.insert(out.end(), payload.begin(), payload.end());
  }
  return out;
}

FingerprintIndex decode_index(const std::vector<std::uint8_t>& bytes) {
  detail::ByteReader reader(bytes.data(), bytes.size());
  if (reader.remaining() < 4 ||
      reader.bytes(4) != std::string(kIndexMagic, 4)) {
    throw FormatError("bad index magic");
  }
  const std::uint8_t version = reader.u8();
  if (version != kIndexVersion) {
    throw FormatError("unsupported index version " + std::to_string(version));
  }
  const std::uint32_t n = reader.u32();
  const std::uint32_t count = reader.u32();
  FingerprintIndex idx;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint16_t key_len = reader.u16();
    const std::string key = reader.bytes(key_len);
    SVMF fp = detail::read_svmf_payload(reader);
    if (fp.n() != n) {
      throw FormatError("entry '" + key + "' has n=" + std::to_string(fp.n()) +
                        ", index header says n=" + std::to_string(n));
    }
    try {
      idx.add(key, std::move(fp));
    } catch (const ConflictError&) {
      throw FormatError("duplicate key '" + key + "' in index file");
    }
  }
  if (!reader.done()) {
    throw FormatError("trailing bytes after index payload");
  }
  return idx;
}

void index_save(const FingerprintIndex& idx, const std::string& path) {
  write_file_atomic(path, encode_index(idx));
}

FingerprintIndex index_load(const std::string& path) {
  return decode_index(read_file_bytes(path));
}

}  // namespace svmf
