#include "svmf/fingerprint.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "binary_io.hpp"
#include "svmf/io.hpp"
#include "svmf/errors.hpp"

namespace svmf {

using nlohmann::json;

double Hyperparams::h2(int d) const {
  if (d < 0 || d > distance_cap) {
    throw DomainError("h2 distance " + std::to_string(d) + " outside [0, " +
                      std::to_string(distance_cap) + "]");
  }
  return h2_table[static_cast<std::size_t>(d)];
}

void Hyperparams::validate() const {
  if (!(h1 > 0.0) || !std::isfinite(h1)) {
    throw ValidationError("h1 must be positive and finite");
  }
  if (distance_cap < 0) {
    throw ValidationError("distance cap must be nonnegative");
  }
  if (h2_table.size() != static_cast<std::size_t>(distance_cap) + 1) {
    throw ValidationError("h2 table must have exactly cap + 1 = " +
                          std::to_string(distance_cap + 1) + " weights, got " +
                          std::to_string(h2_table.size()));
  }
  for (double w : h2_table) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError("h2 weights must be nonnegative and finite");
    }
  }
  if (!(carbon_divisor > 0.0) || !std::isfinite(carbon_divisor)) {
    throw ValidationError("carbon divisor must be positive and finite");
  }
  if (!std::isfinite(expansion_factor)) {
    throw ValidationError("expansion factor must be finite");
  }
}

SVMF::SVMF(std::uint32_t n, std::map<std::uint64_t, double> entries,
           std::string key)
    : n_(n), key_(std::move(key)) {
  if (!entries.empty() && n == 0) {
    throw DomainError("nonempty fingerprint requires n > 0");
  }
  entries_.reserve(entries.size());
  for (const auto& [k, value] : entries) {
    // Re-derive the cell to reject lower-triangular or out-of-range keys.
    linear_index(static_cast<std::uint32_t>(k / n), static_cast<std::uint32_t>(k % n), n);
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw ValidationError("fingerprint values must be positive and finite");
    }
    entries_.emplace_back(k, value);
  }
}

bool SVMF::same_entries(const SVMF& other) const {
  if (entries_.size() != other.entries_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].first != other.entries_[i].first ||
        std::bit_cast<std::uint64_t>(entries_[i].second) !=
            std::bit_cast<std::uint64_t>(other.entries_[i].second)) {
      return false;
    }
  }
  return true;
}

std::uint64_t linear_index(std::uint32_t i, std::uint32_t j, std::uint32_t n) {
  if (i >= n || j >= n) {
    throw DomainError("cell (" + std::to_string(i) + ", " + std::to_string(j) +
                      ") outside catalog size " + std::to_string(n));
  }
  if (i > j) {
    throw DomainError("cell (" + std::to_string(i) + ", " + std::to_string(j) +
                      ") is lower-triangular");
  }
  return static_cast<std::uint64_t>(i) * n + j;
}

namespace {

// Shared coefficient accumulation for detection graphs and ground-truth
// match graphs. Iterates the distance table in instance-id order so the
// floating-point sums are independent of input ordering.
SVMF accumulate_svmf(const SubstructureGraph& g, const Catalog& catalog,
                     const Hyperparams& hp) {
  hp.validate();
  const auto n = static_cast<std::uint32_t>(catalog.size());
  for (const auto& node : g.nodes()) {
    catalog.at(node.class_id);  // throws LookupError on unknown ids
  }

  const DistanceTable distances = all_pairs_distances_capped(g, hp.distance_cap);

  std::map<std::uint64_t, double> cells;
  for (const auto& [pair, d] : distances.pairs()) {
    const auto& node_a = g.nodes()[g.index_of(pair.first)];
    const auto& node_b = g.nodes()[g.index_of(pair.second)];
    double weight = hp.h2(d);
    if (catalog.kind_of(node_a.class_id) == SubstructureKind::kCarbonBackbone) {
      weight /= hp.carbon_divisor;
    }
    if (catalog.kind_of(node_b.class_id) == SubstructureKind::kCarbonBackbone) {
      weight /= hp.carbon_divisor;
    }
    const auto i = static_cast<std::uint32_t>(
        std::min(node_a.class_id, node_b.class_id));
    const auto j = static_cast<std::uint32_t>(
        std::max(node_a.class_id, node_b.class_id));
    cells[linear_index(i, j, n)] += weight;
  }

  std::map<std::int32_t, std::int64_t> instance_counts;
  for (const auto& node : g.nodes()) {
    ++instance_counts[node.class_id];
  }
  for (const auto& [class_id, count] : instance_counts) {
    const auto i = static_cast<std::uint32_t>(class_id);
    cells[linear_index(i, i, n)] += hp.h1 * static_cast<double>(count);
  }

  std::erase_if(cells, [](const auto& cell) { return cell.second == 0.0; });
  return SVMF(n, std::move(cells), g.image_key());
}

}  // namespace

SVMF compute_svmf(const SubstructureGraph& g, const Catalog& catalog,
                  const Hyperparams& hp) {
  return accumulate_svmf(g, catalog, hp);
}

SVMF svmf_from_matches(
    const std::vector<SubstructureMatch>& matches,
    const std::vector<std::pair<std::int64_t, std::int64_t>>* bonds,
    const Catalog& catalog, const Hyperparams& hp) {
  std::vector<SubstructureGraph::Node> nodes;
  std::vector<std::unordered_set<std::int64_t>> atom_sets;
  nodes.reserve(matches.size());
  atom_sets.reserve(matches.size());
  for (std::size_t idx = 0; idx < matches.size(); ++idx) {
    const auto& match = matches[idx];
    if (match.atom_indices.empty()) {
      throw ValidationError("match " + std::to_string(idx) +
                            " has an empty atom set");
    }
    nodes.push_back({static_cast<std::int64_t>(idx), match.class_id});
    atom_sets.emplace_back(match.atom_indices.begin(),
                           match.atom_indices.end());
  }

  auto adjacent = [&](std::size_t a, std::size_t b) {
    const auto& small = atom_sets[a].size() <= atom_sets[b].size()
                            ? atom_sets[a]
                            : atom_sets[b];
    const auto& large = atom_sets[a].size() <= atom_sets[b].size()
                            ? atom_sets[b]
                            : atom_sets[a];
    for (std::int64_t atom : small) {
      if (large.count(atom)) {
        return true;
      }
    }
    if (bonds != nullptr) {
      for (const auto& [u, v] : *bonds) {
        if ((atom_sets[a].count(u) && atom_sets[b].count(v)) ||
            (atom_sets[a].count(v) && atom_sets[b].count(u))) {
          return true;
        }
      }
    }
    return false;
  };

  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  for (std::size_t a = 0; a < matches.size(); ++a) {
    for (std::size_t b = a + 1; b < matches.size(); ++b) {
      if (adjacent(a, b)) {
        edges.emplace_back(static_cast<std::int64_t>(a),
                           static_cast<std::int64_t>(b));
      }
    }
  }
  SubstructureGraph g("", std::move(nodes), edges);
  return accumulate_svmf(g, catalog, hp);
}

namespace {

constexpr char kMagic[4] = {'S', 'V', 'M', 'F'};
constexpr std::uint8_t kVersion = 1;

}  // namespace

std::vector<std::uint8_t> encode_svmf(const SVMF& fp) {
  std::vector<std::uint8_t> out;
  out.reserve(13 + fp.nnz() * 16);
  out.insert(out.end(), kMagic, kMagic + 4);
  detail::put_u8(out, kVersion);
  detail::put_u32(out, fp.n());
  detail::put_u32(out, static_cast<std::uint32_t>(fp.nnz()));
  for (const auto& [k, value] : fp.entries()) {
    detail::put_u64(out, k);
    detail::put_f64(out, value);
  }
  return out;
}

namespace detail {

// Reads one fingerprint payload from the cursor; shared with the index
// codec where payloads are embedded back to back.
SVMF read_svmf_payload(ByteReader& reader) {
  if (reader.bytes(4) != std::string(kMagic, 4)) {
    throw FormatError("bad fingerprint magic");
  }
  const std::uint8_t version = reader.u8();
  if (version != kVersion) {
    throw FormatError("unsupported fingerprint version " +
                      std::to_string(version));
  }
  const std::uint32_t n = reader.u32();
  const std::uint32_t count = reader.u32();
  std::map<std::uint64_t, double> entries;
  std::uint64_t prev_k = 0;
  for (std::uint32_t idx = 0; idx < count; ++idx) {
    const std::uint64_t k = reader.u64();
    const double value = reader.f64();
    if (idx > 0 && k <= prev_k) {
      throw FormatError("entry keys are not strictly ascending");
    }
    prev_k = k;
    entries.emplace(k, value);
  }
  try {
    return SVMF(n, std::move(entries));
  } catch (const ValidationError& e) {
    throw FormatError(std::string("invalid fingerprint payload: ") + e.what());
  } catch (const DomainError& e) {
    throw FormatError(std::string("invalid fingerprint payload: ") + e.what());
  }
}

}  // namespace detail

SVMF decode_svmf(const std::vector<std::uint8_t>& bytes) {
  detail::ByteReader reader(bytes.data(), bytes.size());
  SVMF fp = detail::read_svmf_payload(reader);
  if (!reader.done()) {
    throw FormatError("trailing bytes after fingerprint payload");
  }
  return fp;
}

void save_svmf(const SVMF& fp, const std::string& path) {
  write_file_atomic(path, encode_svmf(fp));
}

SVMF load_svmf(const std::string& path) {
  return decode_svmf(read_file_bytes(path));
}

SVMF load_svmf_auto(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() >= 4 && std::equal(kMagic, kMagic + 4, bytes.begin())) {
    return decode_svmf(bytes);
  }
  return SVMF::from_json(std::string(bytes.begin(), bytes.end()));
}

std::string SVMF::to_json() const {
  json entries = json::object();
  for (const auto& [k, value] : entries_) {
    entries[std::to_string(k)] = value;
  }
  return json{{"n", n_}, {"entries", entries}}.dump();
}

SVMF SVMF::from_json(const std::string& text) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed fingerprint JSON: ") + e.what());
  }
  if (!obj.is_object() || !obj.contains("n") ||
      !obj.at("n").is_number_unsigned() || !obj.contains("entries") ||
      !obj.at("entries").is_object()) {
    throw FormatError("fingerprint JSON must be {\"n\": int, \"entries\": {}}");
  }
  const auto n = obj.at("n").get<std::uint32_t>();
  std::map<std::uint64_t, double> entries;
  for (const auto& [key, value] : obj.at("entries").items()) {
    std::uint64_t k = 0;
    try {
      std::size_t consumed = 0;
      k = std::stoull(key, &consumed);
      if (consumed != key.size()) {
        throw std::invalid_argument("trailing characters");
      }
    } catch (const std::exception&) {
      throw FormatError("bad entry key '" + key + "'");
    }
    if (!value.is_number()) {
      throw FormatError("entry values must be numbers");
    }
    entries[k] = value.get<double>();
  }
  try {
    return SVMF(n, std::move(entries));
  } catch (const ValidationError& e) {
    throw FormatError(std::string("invalid fingerprint JSON: ") + e.what());
  } catch (const DomainError& e) {
    throw FormatError(std::string("invalid fingerprint JSON: ") + e.what());
  }
}

}  // namespace svmf
