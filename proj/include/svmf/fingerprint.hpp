#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "svmf/catalog.hpp"
#include "svmf/graph.hpp"

namespace svmf {

// Fingerprint hyperparameters. The defaults are the reference
// configuration: h1 = 10, h2(0..4) = 2, 2, 2/4, 2/16, 2/256, intersection
// coefficients zero beyond distance 4, carbon-backbone endpoints halved,
// box expansion 10% of the smallest diagonal.
struct Hyperparams {
  double h1 = 10.0;
  std::vector<double> h2_table = {2.0, 2.0, 0.5, 0.125, 0.0078125};
  int distance_cap = 4;
  double carbon_divisor = 2.0;
  double expansion_factor = 0.1;

  double h2(int d) const;
  // h1 > 0, weights >= 0, table defined exactly for d in [0, cap].
  void validate() const;
};

// Sparse upper-triangular count-based continuous fingerprint. Entries map
// the row-major full-matrix index k = i*n + j (i <= j) to a strictly
// positive value, kept sorted ascending in k. Immutable value type.
class SVMF {
 public:
  SVMF() = default;
  SVMF(std::uint32_t n, std::map<std::uint64_t, double> entries,
       std::string key = "");

  std::uint32_t n() const { return n_; }
  const std::string& key() const { return key_; }
  const std::vector<std::pair<std::uint64_t, double>>& entries() const {
    return entries_;
  }
  std::size_t nnz() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool same_entries(const SVMF& other) const;
  bool operator==(const SVMF& other) const {
    return n_ == other.n_ && same_entries(other);
  }

  std::string to_json() const;
  static SVMF from_json(const std::string& text);

 private:
  std::uint32_t n_ = 0;
  std::string key_;
  std::vector<std::pair<std::uint64_t, double>> entries_;
};

// Row-major flattening of the full n x n matrix, restricted to the upper
// triangle. Errors on i > j or out-of-range cells.
std::uint64_t linear_index(std::uint32_t i, std::uint32_t j, std::uint32_t n);

// Converts the substructure graph to the fingerprint:
//   diagonal   f_ii = h1 * n_i + g_ii
//   off-diag   g_ij = sum of h2(d) over instance pairs with d <= cap
// Pairs are unordered (alpha < beta within one class, all cross pairs
// otherwise); unreachable pairs and d > cap contribute nothing; each
// carbon-backbone endpoint divides the pair weight by carbon_divisor.
SVMF compute_svmf(const SubstructureGraph& g, const Catalog& catalog,
                  const Hyperparams& hp);

// One ground-truth substructure match: class plus the matched atom indexes.
struct SubstructureMatch {
  std::int32_t class_id = 0;
  std::vector<std::int64_t> atom_indices;
};

// Fingerprints ground-truth matches instead of detections. Two matches are
// adjacent when their atom sets intersect or, if bonds are supplied, when
// a bond joins an atom of one to an atom of the other. Coefficient rules
// are identical to compute_svmf.
SVMF svmf_from_matches(
    const std::vector<SubstructureMatch>& matches,
    const std::vector<std::pair<std::int64_t, std::int64_t>>* bonds,
    const Catalog& catalog, const Hyperparams& hp);

// Binary form: magic "SVMF", version u8, n u32, entry count u32, then
// (k u64, value f64) pairs ascending in k, all little-endian.
std::vector<std::uint8_t> encode_svmf(const SVMF& fp);
SVMF decode_svmf(const std::vector<std::uint8_t>& bytes);

void save_svmf(const SVMF& fp, const std::string& path);
SVMF load_svmf(const std::string& path);

// Loads either the binary form or the JSON debug form, by file content.
SVMF load_svmf_auto(const std::string& path);

}  // namespace svmf
