#include "svmf/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "svmf/errors.hpp"

namespace svmf {

const char* to_string(SubstructureKind kind) {
  return kind == SubstructureKind::kFunctionalGroup ? "FG" : "CB";
}

Catalog Catalog::from_classes(std::vector<SubstructureClass> classes) {
  if (classes.empty()) {
    throw ValidationError("catalog is empty");
  }
  std::sort(classes.begin(), classes.end(),
            [](const SubstructureClass& a, const SubstructureClass& b) {
              return a.class_id < b.class_id;
            });
  std::size_t fg_count = 0;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto id = classes[i].class_id;
    if (id != static_cast<std::int32_t>(i)) {
      if (i > 0 && classes[i - 1].class_id == id) {
        throw ValidationError("duplicate class_id " + std::to_string(id));
      }
      throw ValidationError("class_id range has a gap before id " +
                            std::to_string(id));
    }
    if (classes[i].kind == SubstructureKind::kFunctionalGroup) {
      ++fg_count;
    }
  }
  if (fg_count == 0 || fg_count == classes.size()) {
    throw ValidationError("catalog must contain both FG and CB classes");
  }
  Catalog catalog;
  catalog.classes_ = std::move(classes);
  catalog.fg_count_ = fg_count;
  return catalog;
}

const SubstructureClass& Catalog::at(std::int32_t class_id) const {
  if (!contains(class_id)) {
    throw LookupError("class_id " + std::to_string(class_id) +
                      " not in catalog of size " + std::to_string(size()));
  }
  return classes_[static_cast<std::size_t>(class_id)];
}

SubstructureKind Catalog::kind_of(std::int32_t class_id) const {
  return at(class_id).kind;
}

bool Catalog::contains(std::int32_t class_id) const {
  return class_id >= 0 && static_cast<std::size_t>(class_id) < classes_.size();
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

}  // namespace

Catalog load_catalog(std::istream& in) {
  std::vector<SubstructureClass> classes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line_no == 1) {
      if (line != "class_id\tkind\tname\tsmarts") {
        throw ParseError(line_no, "bad catalog header");
      }
      continue;
    }
    if (line.empty()) {
      continue;
    }
    auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw ParseError(line_no, "expected 4 tab-separated fields, got " +
                                    std::to_string(fields.size()));
    }
    SubstructureClass cls;
    try {
      std::size_t consumed = 0;
      cls.class_id = std::stoi(fields[0], &consumed);
      if (consumed != fields[0].size()) {
        throw std::invalid_argument("trailing characters");
      }
    } catch (const std::exception&) {
      throw ParseError(line_no, "bad class_id '" + fields[0] + "'");
    }
    if (fields[1] == "FG") {
      cls.kind = SubstructureKind::kFunctionalGroup;
    } else if (fields[1] == "CB") {
      cls.kind = SubstructureKind::kCarbonBackbone;
    } else {
      throw ParseError(line_no, "kind must be FG or CB, got '" + fields[1] + "'");
    }
    cls.name = fields[2];
    cls.smarts = fields[3];
    classes.push_back(std::move(cls));
  }
  return Catalog::from_classes(std::move(classes));
}

Catalog load_catalog(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open catalog: " + path);
  }
  return load_catalog(in);
}

}  // namespace svmf
