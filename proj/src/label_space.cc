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

#include "labelfuse/label_space.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "labelfuse/error.h"
#include "labelfuse/text_util.h"

namespace labelfuse {
namespace {

std::string Where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> SplitCsvRecord(std::string_view line,
                                        const std::string& where) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ParseError(where + "unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

}  // namespace

LabelSpace::LabelSpace(std::string id, std::vector<ClassDef> classes)
    : id_(std::move(id)), classes_(std::move(classes)) {
  if (id_.empty()) throw InvalidArgument("label space id must not be empty");
  bool has_zero = false;
  for (const ClassDef& c : classes_) {
    if (c.name.empty()) {
      throw InvalidArgument("space '" + id_ + "': class " +
                            std::to_string(c.id) + " has an empty name");
    }
    if (c.id == kUnknownZeroBased) {
      throw InvalidArgument("space '" + id_ + "': class id 65535 is reserved");
    }
    has_zero = has_zero || c.id == 0;
    max_id_ = std::max(max_id_, c.id);
  }
  unknown_ = has_zero ? kUnknownZeroBased : kUnknownLabel;
  index_.assign(static_cast<std::size_t>(max_id_) + 1, -1);
  std::set<std::string_view> names;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const ClassDef& c = classes_[i];
    if (index_[c.id] >= 0) {
      throw InvalidArgument("space '" + id_ + "': duplicate class id " +
                            std::to_string(c.id));
    }
    if (!names.insert(c.name).second) {
      throw InvalidArgument("space '" + id_ + "': duplicate class name '" +
                            c.name + "'");
    }
    index_[c.id] = static_cast<std::int32_t>(i);
  }
}

LabelSpace LabelSpace::Load(std::string id, const std::filesystem::path& path) {
  return Parse(std::move(id), ReadTextFile(path), path.string());
}

LabelSpace LabelSpace::Parse(std::string id, std::string_view text,
                             const std::string& source) {
  std::vector<ClassDef> classes;
  std::size_t line_no = 0;
  for (std::string_view line : SplitLines(text)) {
    ++line_no;
    if (Trim(line).empty() || Trim(line).front() == '#') continue;
    const std::vector<std::string_view> cols = Split(line, '\t');
    if (cols.size() < 2) {
      throw ParseError(Where(source, line_no) +
                       "expected class_id<TAB>name[<TAB>synonyms]");
    }
    ClassDef def;
    const auto parsed = ParseUnsigned(Trim(cols[0]));
    if (!parsed || *parsed >= kUnknownZeroBased) {
      throw ParseError(Where(source, line_no) + "bad class id '" +
                       std::string(cols[0]) + "'");
    }
    def.id = static_cast<ClassId>(*parsed);
    def.name = std::string(Trim(cols[1]));
    if (cols.size() > 2) {
      for (std::string_view s : Split(cols[2], '|')) {
        if (!Trim(s).empty()) def.synonyms.emplace_back(Trim(s));
      }
    }
    classes.push_back(std::move(def));
  }
  try {
    return LabelSpace(std::move(id), std::move(classes));
  } catch (const Error& e) {
    throw ParseError(source + ": " + e.what());
  }
}

const ClassDef* LabelSpace::Find(ClassId id) const {
  return Contains(id) ? &classes_[index_[id]] : nullptr;
}

std::optional<ClassId> LabelSpace::FindByName(std::string_view name) const {
  for (const ClassDef& c : classes_) {
    if (c.name == name) return c.id;
  }
  return std::nullopt;
}

MappingCase MappingCase::FromIds(std::vector<ClassId> ids) {
  MappingCase c;
  c.kind = ids.empty()      ? Kind::kNone
           : ids.size() == 1 ? Kind::kOne
                             : Kind::kMany;
  c.ids = std::move(ids);
  return c;
}

std::string ToString(const MappingCase& c) {
  switch (c.kind) {
    case MappingCase::Kind::kNone:
      return "NoCorrespondence";
    case MappingCase::Kind::kOne:
      return "One(" + std::to_string(c.ids.front()) + ")";
    case MappingCase::Kind::kMany: {
      std::string s = "Many([";
      for (std::size_t i = 0; i < c.ids.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(c.ids[i]);
      }
      return s + "])";
    }
  }
  return {};
}

MappingTable::MappingTable(std::vector<LabelSpace> spaces,
                           std::vector<MappingRow> rows)
    : spaces_(std::move(spaces)), rows_(std::move(rows)) {
  for (std::size_t i = 0; i < spaces_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (spaces_[i].id() == spaces_[j].id()) {
        throw InvalidArgument("duplicate label space '" + spaces_[i].id() +
                              "'");
      }
    }
  }
  membership_.resize(spaces_.size());
  for (std::size_t s = 0; s < spaces_.size(); ++s) {
    membership_[s].resize(static_cast<std::size_t>(spaces_[s].max_id()) + 1);
  }
  std::set<std::uint32_t> seen;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    MappingRow& row = rows_[r];
    if (row.canonical_id == 0) {
      throw InvalidArgument("canonical id must be positive");
    }
    if (!seen.insert(row.canonical_id).second) {
      throw InvalidArgument("duplicate canonical id " +
                            std::to_string(row.canonical_id));
    }
    row.ids.resize(spaces_.size());
    for (std::size_t s = 0; s < spaces_.size(); ++s) {
      for (ClassId id : row.ids[s]) {
        if (!spaces_[s].Contains(id)) {
          throw InvalidArgument(
              "canonical id " + std::to_string(row.canonical_id) +
              " references undeclared class " + std::to_string(id) +
              " of space '" + spaces_[s].id() + "'");
        }
        auto& members = membership_[s][id];
        if (members.empty() || members.back() != r) {
          members.push_back(static_cast<std::uint32_t>(r));
        }
      }
    }
  }
  for (auto& per_space : membership_) {
    for (auto& members : per_space) {
      std::sort(members.begin(), members.end(),
                [this](std::uint32_t a, std::uint32_t b) {
                  return rows_[a].canonical_id < rows_[b].canonical_id;
                });
    }
  }
}

MappingTable MappingTable::Load(const std::filesystem::path& csv_path) {
  return Load(csv_path, csv_path.parent_path() / "spaces");
}

MappingTable MappingTable::Load(const std::filesystem::path& csv_path,
                                const std::filesystem::path& spaces_dir) {
  const std::string text = ReadTextFile(csv_path);
  // Resolve the header first so only referenced spaces are read.
  std::vector<LabelSpace> spaces;
  std::size_t line_no = 0;
  for (std::string_view line : SplitLines(text)) {
    ++line_no;
    if (Trim(line).empty() || Trim(line).front() == '#') continue;
    const auto header =
        SplitCsvRecord(line, Where(csv_path.string(), line_no));
    for (std::size_t i = 2; i < header.size(); ++i) {
      const std::string id(Trim(header[i]));
      const auto path = spaces_dir / (id + ".tsv");
      if (!std::filesystem::exists(path)) {
        throw ParseError(Where(csv_path.string(), line_no) +
                         "unknown space column '" + id + "' (no " +
                         path.string() + ")");
      }
      spaces.push_back(LabelSpace::Load(id, path));
    }
    break;
  }
  return Parse(text, std::move(spaces), csv_path.string());
}

MappingTable MappingTable::Parse(std::string_view csv,
                                 std::vector<LabelSpace> spaces,
                                 const std::string& source) {
  std::vector<std::size_t> column_space;  // csv column -> index in spaces
  std::vector<MappingRow> rows;
  std::map<std::uint32_t, std::size_t> first_line;
  bool have_header = false;
  std::size_t line_no = 0;
  for (std::string_view line : SplitLines(csv)) {
    ++line_no;
    if (Trim(line).empty() || Trim(line).front() == '#') continue;
    const std::string where = Where(source, line_no);
    const auto fields = SplitCsvRecord(line, where);
    if (!have_header) {
      if (fields.size() < 2 || Trim(fields[0]) != "canonical_id" ||
          Trim(fields[1]) != "synkey") {
        throw ParseError(where +
                         "header must start with canonical_id,synkey");
      }
      for (std::size_t i = 2; i < fields.size(); ++i) {
        const std::string_view id = Trim(fields[i]);
        auto it = std::find_if(spaces.begin(), spaces.end(),
                               [&](const LabelSpace& s) { return s.id() == id; });
        if (it == spaces.end()) {
          throw ParseError(where + "unknown space column '" + std::string(id) +
                           "'");
        }
        const auto idx = static_cast<std::size_t>(it - spaces.begin());
        if (std::find(column_space.begin(), column_space.end(), idx) !=
            column_space.end()) {
          throw ParseError(where + "space column '" + std::string(id) +
                           "' appears twice");
        }
        column_space.push_back(idx);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != column_space.size() + 2) {
      throw ParseError(where + "expected " +
                       std::to_string(column_space.size() + 2) +
                       " fields, got " + std::to_string(fields.size()));
    }
    MappingRow row;
    const auto canonical = ParseUnsigned(Trim(fields[0]));
    if (!canonical || *canonical == 0 || *canonical > UINT32_MAX) {
      throw ParseError(where + "canonical_id must be a positive integer");
    }
    row.canonical_id = static_cast<std::uint32_t>(*canonical);
    if (auto [it, inserted] = first_line.emplace(row.canonical_id, line_no);
        !inserted) {
      throw ParseError(where + "duplicate canonical_id " +
                       std::to_string(row.canonical_id) + " (first on line " +
                       std::to_string(it->second) + ")");
    }
    row.synkey = std::string(Trim(fields[1]));
    row.ids.resize(spaces.size());
    for (std::size_t c = 0; c < column_space.size(); ++c) {
      const LabelSpace& space = spaces[column_space[c]];
      const std::string_view cell = Trim(fields[c + 2]);
      if (cell.empty()) continue;
      for (std::string_view tok : Split(cell, ',')) {
        const auto id = ParseUnsigned(Trim(tok));
        if (!id || *id > UINT16_MAX) {
          throw ParseError(where + "bad class id '" + std::string(tok) +
                           "' in column '" + space.id() + "'");
        }
        const auto cls = static_cast<ClassId>(*id);
        if (cls == space.unknown()) {
          throw ParseError(where + "id " + std::to_string(cls) +
                           " is the reserved unknown label of space '" +
                           space.id() + "'");
        }
        if (!space.Contains(cls)) {
          throw ParseError(where + "reference to undeclared class " +
                           std::to_string(cls) + " of space '" + space.id() +
                           "'");
        }
        auto& list = row.ids[column_space[c]];
        if (std::find(list.begin(), list.end(), cls) == list.end()) {
          list.push_back(cls);
        }
      }
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError(source + ": missing header line");
  return MappingTable(std::move(spaces), std::move(rows));
}

bool MappingTable::HasSpace(std::string_view space_id) const {
  return std::any_of(spaces_.begin(), spaces_.end(),
                     [&](const LabelSpace& s) { return s.id() == space_id; });
}

std::size_t MappingTable::SpaceIndex(std::string_view space_id) const {
  for (std::size_t i = 0; i < spaces_.size(); ++i) {
    if (spaces_[i].id() == space_id) return i;
  }
  throw InvalidArgument("unknown label space '" + std::string(space_id) + "'");
}

const LabelSpace& MappingTable::space(std::string_view space_id) const {
  return spaces_[SpaceIndex(space_id)];
}

std::span<const std::uint32_t> MappingTable::RowsContaining(
    std::string_view space_id, ClassId class_id) const {
  const auto& per_space = membership_[SpaceIndex(space_id)];
  if (class_id >= per_space.size()) return {};
  return per_space[class_id];
}

MappingCase MappingTable::Correspondences(std::string_view src_space,
                                          ClassId src_class,
                                          std::string_view dst_space) const {
  const LabelSpace& src = space(src_space);
  const std::size_t dst = SpaceIndex(dst_space);
  if (src_class == src.unknown()) {
    throw InvalidArgument("the unknown label of space '" + src.id() +
                          "' has no correspondences");
  }
  std::vector<ClassId> ids;
  for (std::uint32_t r : RowsContaining(src_space, src_class)) {
    for (ClassId id : rows_[r].ids[dst]) {
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    }
  }
  return MappingCase::FromIds(std::move(ids));
}

Translator MappingTable::MakeTranslator(std::string_view src_space,
                                        std::string_view dst_space) const {
  const LabelSpace& src = space(src_space);
  const LabelSpace& dst = space(dst_space);
  Translator t;
  t.src_space_ = src.id();
  t.dst_space_ = dst.id();
  t.src_unknown_ = src.unknown();
  t.dst_unknown_ = dst.unknown();
  t.entries_.resize(static_cast<std::size_t>(src.max_id()) + 1);
  for (const ClassDef& c : src.classes()) {
    const MappingCase m = Correspondences(src_space, c.id, dst_space);
    Translator::Entry& e = t.entries_[c.id];
    e.valid = true;
    e.offset = static_cast<std::uint32_t>(t.targets_.size());
    e.count = static_cast<std::uint16_t>(m.ids.size());
    t.targets_.insert(t.targets_.end(), m.ids.begin(), m.ids.end());
  }
  return t;
}

LabelMap TranslateMap(const LabelMap& map, const MappingTable& table,
                      std::string_view dst_space, ManyPolicy policy) {
  const Translator t = table.MakeTranslator(map.space_id(), dst_space);
  LabelMap out = table.space(dst_space).MakeLabelMap(map.width(), map.height());
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const ClassId src = map.at(x, y);
      if (src == t.src_unknown()) continue;
      if (!t.IsValid(src)) {
        throw InvalidArgument("pixel (" + std::to_string(x) + ", " +
                              std::to_string(y) + ") holds class " +
                              std::to_string(src) + " not in space '" +
                              map.space_id() + "'");
      }
      const auto targets = t.Targets(src);
      if (targets.empty()) continue;
      if (targets.size() > 1 && policy == ManyPolicy::kFailOnMany) {
        throw InvalidArgument(
            "pixel (" + std::to_string(x) + ", " + std::to_string(y) +
            "): class " + std::to_string(src) + " of '" + map.space_id() +
            "' has " + std::to_string(targets.size()) +
            " correspondences in '" + std::string(dst_space) + "'");
      }
      out.at(x, y) = targets.front();
    }
  }
  return out;
}

ValidationReport Validate(const MappingTable& table) {
  ValidationReport report;
  const auto spaces = table.spaces();
  const auto rows = table.rows();
  for (const LabelSpace& space : spaces) {
    for (const ClassDef& c : space.classes()) {
      const auto members = table.RowsContaining(space.id(), c.id);
      if (members.empty()) {
        report.uncovered.push_back({space.id(), c.id});
      } else if (members.size() > 1) {
        ValidationReport::MultiRow multi{{space.id(), c.id}, {}};
        for (std::uint32_t r : members) {
          multi.canonical_ids.push_back(rows[r].canonical_id);
        }
        report.multi_row.push_back(std::move(multi));
      }
    }
  }
  std::vector<const MappingRow*> ordered;
  for (const MappingRow& row : rows) ordered.push_back(&row);
  std::sort(ordered.begin(), ordered.end(),
            [](const MappingRow* a, const MappingRow* b) {
              return a->canonical_id < b->canonical_id;
            });
  const bool has_canonical = table.HasSpace(kCanonicalSpace);
  const std::size_t canonical =
      has_canonical ? table.SpaceIndex(kCanonicalSpace) : 0;
  for (const MappingRow* row : ordered) {
    if (row->synkey.empty() || !has_canonical || row->ids[canonical].empty()) {
      report.missing_synkey.push_back(row->canonical_id);
    }
    for (std::size_t s = 0; s < spaces.size(); ++s) {
      if (row->ids[s].empty()) {
        report.empty_cells.push_back({row->canonical_id, spaces[s].id()});
      }
    }
  }
  return report;
}

std::string ValidationReport::ToString(const MappingTable& table) const {
  std::ostringstream out;
  auto name = [&](const ClassRef& ref) {
    const ClassDef* def = table.space(ref.space_id).Find(ref.class_id);
    return ref.space_id + ":" + std::to_string(ref.class_id) + " (" +
           (def ? def->name : "?") + ")";
  };
  for (const ClassRef& ref : uncovered) {
    out << "warning: uncovered class " << name(ref) << "\n";
  }
  for (const MultiRow& m : multi_row) {
    out << "info: " << name(m.ref) << " appears in rows";
    for (std::uint32_t id : m.canonical_ids) out << " " << id;
    out << "\n";
  }
  for (std::uint32_t id : missing_synkey) {
    out << "warning: row " << id << " lacks a canonical synkey\n";
  }
  for (const EmptyCell& e : empty_cells) {
    out << "info: row " << e.canonical_id << " has no '" << e.space_id
        << "' class\n";
  }
  return out.str();
}

}  // namespace labelfuse
