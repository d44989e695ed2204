// Copyright 2026 The labelfuse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LABELFUSE_LABEL_SPACE_H_
#define LABELFUSE_LABEL_SPACE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "labelfuse/label_map.h"

namespace labelfuse {

// Space that holds the canonical concepts; its column is expected in every
// mapping row.
inline constexpr std::string_view kCanonicalSpace = "wordnet";

struct ClassDef {
  ClassId id = 0;
  std::string name;
  std::vector<std::string> synonyms;
};

// A finite taxonomy of classes. Ids are unique and never equal the space's
// unknown sentinel, which is 0 unless the space itself defines class 0.
class LabelSpace {
 public:
  LabelSpace(std::string id, std::vector<ClassDef> classes);

  // Reads `class_id<TAB>name<TAB>syn|syn|...` lines; `#` lines are comments.
  static LabelSpace Load(std::string id, const std::filesystem::path& path);
  static LabelSpace Parse(std::string id, std::string_view text,
                          const std::string& source = "<memory>");

  const std::string& id() const { return id_; }
  std::span<const ClassDef> classes() const { return classes_; }
  ClassId unknown() const { return unknown_; }
  // Finer taxonomies rank higher; equals the class count.
  int resolution_rank() const { return static_cast<int>(classes_.size()); }
  ClassId max_id() const { return max_id_; }

  bool Contains(ClassId id) const {
    return id <= max_id_ && index_[id] >= 0;
  }
  const ClassDef* Find(ClassId id) const;
  std::optional<ClassId> FindByName(std::string_view name) const;

  LabelMap MakeLabelMap(int width, int height) const {
    return LabelMap(width, height, id_, unknown_);
  }

 private:
  std::string id_;
  std::vector<ClassDef> classes_;
  std::vector<std::int32_t> index_;
  ClassId max_id_ = 0;
  ClassId unknown_ = kUnknownLabel;
};

// One canonical concept row. `ids` holds one entry per table space, in the
// table's space order; empty lists mean "no class in that space".
struct MappingRow {
  std::uint32_t canonical_id = 0;
  std::string synkey;
  std::vector<std::vector<ClassId>> ids;
};

// Result of a correspondence query into a target space.
struct MappingCase {
  enum class Kind { kNone, kOne, kMany };

  Kind kind = Kind::kNone;
  std::vector<ClassId> ids;

  static MappingCase FromIds(std::vector<ClassId> ids);

  bool is_none() const { return kind == Kind::kNone; }
  bool is_one() const { return kind == Kind::kOne; }
  bool is_many() const { return kind == Kind::kMany; }
  ClassId first() const { return ids.front(); }

  friend bool operator==(const MappingCase&, const MappingCase&) = default;
};

std::string ToString(const MappingCase& c);

class Translator;

// Immutable many-to-many correspondence graph over a set of label spaces.
class MappingTable {
 public:
  MappingTable(std::vector<LabelSpace> spaces, std::vector<MappingRow> rows);

  // Loads the CSV and the space files it references from `spaces_dir`
  // (default: a `spaces/` directory next to the CSV).
  static MappingTable Load(const std::filesystem::path& csv_path);
  static MappingTable Load(const std::filesystem::path& csv_path,
                           const std::filesystem::path& spaces_dir);
  // Parses CSV text against already-built spaces. Every space column in the
  // header must name one of `spaces`.
  static MappingTable Parse(std::string_view csv, std::vector<LabelSpace> spaces,
                            const std::string& source = "<memory>");

  std::span<const LabelSpace> spaces() const { return spaces_; }
  std::span<const MappingRow> rows() const { return rows_; }
  bool HasSpace(std::string_view space_id) const;
  const LabelSpace& space(std::string_view space_id) const;
  // Column index of a space inside MappingRow::ids.
  std::size_t SpaceIndex(std::string_view space_id) const;

  // Rows listing (space, class), ordered by canonical id.
  std::span<const std::uint32_t> RowsContaining(std::string_view space_id,
                                                ClassId class_id) const;

  MappingCase Correspondences(std::string_view src_space, ClassId src_class,
                              std::string_view dst_space) const;

  Translator MakeTranslator(std::string_view src_space,
                            std::string_view dst_space) const;

 private:
  std::vector<LabelSpace> spaces_;
  std::vector<MappingRow> rows_;
  // membership_[space][class_id] -> row positions sorted by canonical id.
  std::vector<std::vector<std::vector<std::uint32_t>>> membership_;
};

// Dense lookup table of correspondences from one space into another,
// precomputed for per-pixel use.
class Translator {
 public:
  const std::string& src_space() const { return src_space_; }
  const std::string& dst_space() const { return dst_space_; }
  ClassId src_unknown() const { return src_unknown_; }
  ClassId dst_unknown() const { return dst_unknown_; }

  // False for ids that are neither a class of the source space nor its
  // unknown sentinel.
  bool IsValid(ClassId src) const {
    return src == src_unknown_ || (src < entries_.size() && entries_[src].valid);
  }
  // Target ids in first-occurrence order; empty for unknown, invalid ids and
  // classes without a correspondence.
  std::span<const ClassId> Targets(ClassId src) const {
    if (src >= entries_.size()) return {};
    const Entry& e = entries_[src];
    return {targets_.data() + e.offset, e.count};
  }

 private:
  friend class MappingTable;
  struct Entry {
    std::uint32_t offset = 0;
    std::uint16_t count = 0;
    bool valid = false;
  };

  std::string src_space_;
  std::string dst_space_;
  ClassId src_unknown_ = kUnknownLabel;
  ClassId dst_unknown_ = kUnknownLabel;
  std::vector<Entry> entries_;
  std::vector<ClassId> targets_;
};

enum class ManyPolicy { kFirstCorrespondence, kFailOnMany };

// Per-pixel translation; unknown and NoCorrespondence become the target
// unknown. Throws on ambiguous pixels under kFailOnMany.
LabelMap TranslateMap(const LabelMap& map, const MappingTable& table,
                      std::string_view dst_space,
                      ManyPolicy policy = ManyPolicy::kFirstCorrespondence);

struct ValidationReport {
  struct ClassRef {
    std::string space_id;
    ClassId class_id = 0;
    friend bool operator==(const ClassRef&, const ClassRef&) = default;
  };
  struct MultiRow {
    ClassRef ref;
    std::vector<std::uint32_t> canonical_ids;
  };
  struct EmptyCell {
    std::uint32_t canonical_id = 0;
    std::string space_id;
  };

  std::vector<ClassRef> uncovered;      // classes in zero rows
  std::vector<MultiRow> multi_row;      // classes in more than one row
  std::vector<EmptyCell> empty_cells;   // rows without ids for a space
  std::vector<std::uint32_t> missing_synkey;  // rows without a canonical id

  bool empty() const {
    return uncovered.empty() && multi_row.empty() && empty_cells.empty() &&
           missing_synkey.empty();
  }
  std::string ToString(const MappingTable& table) const;
};

ValidationReport Validate(const MappingTable& table);

}  // namespace labelfuse

#endif  // LABELFUSE_LABEL_SPACE_H_
