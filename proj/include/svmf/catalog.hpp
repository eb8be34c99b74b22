#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace svmf {

enum class SubstructureKind : std::uint8_t {
  kFunctionalGroup,
  kCarbonBackbone,
};

const char* to_string(SubstructureKind kind);

struct SubstructureClass {
  std::int32_t class_id = 0;
  SubstructureKind kind = SubstructureKind::kFunctionalGroup;
  std::string name;
  // SMARTS pattern carried as opaque payload; never interpreted.
  std::string smarts;
};

// Ordered, validated list of all fingerprintable substructure classes.
// Defines the fingerprint dimensionality n. Immutable after construction,
// safe to share across threads.
class Catalog {
 public:
  // Validates id uniqueness/contiguity and that both kinds are present.
  static Catalog from_classes(std::vector<SubstructureClass> classes);

  std::size_t size() const { return classes_.size(); }
  const std::vector<SubstructureClass>& classes() const { return classes_; }
  const SubstructureClass& at(std::int32_t class_id) const;
  SubstructureKind kind_of(std::int32_t class_id) const;
  bool contains(std::int32_t class_id) const;

  std::size_t functional_group_count() const { return fg_count_; }
  std::size_t carbon_backbone_count() const {
    return classes_.size() - fg_count_;
  }

 private:
  Catalog() = default;
  std::vector<SubstructureClass> classes_;
  std::size_t fg_count_ = 0;
};

// Reads the tab-separated catalog format:
//   class_id\tkind\tname\tsmarts
// with a header line, kind in {FG, CB}, UTF-8, LF line endings.
Catalog load_catalog(const std::string& path);
Catalog load_catalog(std::istream& in);

}  // namespace svmf
