// Copyright 2026 The CEGI Authors
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

#include "cegi/factual/knowledge_store.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "cegi/bundled_data.h"
#include "cegi/encoder/tokenizer.h"

namespace cegi {
namespace {

std::string Join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& word : words) {
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

std::string ToLower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string_view Trim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  return text;
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

void ReplaceAll(std::string& text, std::string_view from, std::string_view to) {
  size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace

std::string Triple::SubjectText() const { return Join(subject); }

std::string Triple::ObjectText() const { return Join(object); }

const RelationTemplates& RelationTemplates::Bundled() {
  static const RelationTemplates* table =
      new RelationTemplates(Parse(bundled::kRelationTemplates));
  return *table;
}

RelationTemplates RelationTemplates::Parse(std::string_view text) {
  RelationTemplates table;
  std::istringstream in{std::string(text)};
  std::string line;
  int64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    std::vector<std::string_view> fields = SplitTabs(trimmed);
    std::ostringstream where;
    where << "template line " << line_number;
    if (fields.size() != 2) {
      throw TemplateError(where.str() + ": expected label<TAB>pattern");
    }
    std::string label(Trim(fields[0]));
    std::string pattern(Trim(fields[1]));
    if (pattern.find("{s}") == std::string::npos ||
        pattern.find("{o}") == std::string::npos) {
      throw TemplateError(where.str() + ": pattern lacks {s} or {o} slot");
    }
    if (!table.canonical_.emplace(ToLower(label), label).second) {
      throw TemplateError(where.str() + ": duplicate relation " + label);
    }
    table.patterns_.emplace(label, pattern);
  }
  return table;
}

RelationTemplates RelationTemplates::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TemplateError("cannot open template file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return Parse(text.str());
}

std::optional<std::string> RelationTemplates::Canonical(
    std::string_view label) const {
  auto it = canonical_.find(ToLower(Trim(label)));
  if (it == canonical_.end()) return std::nullopt;
  return it->second;
}

const std::string& RelationTemplates::Pattern(std::string_view label) const {
  std::optional<std::string> canonical = Canonical(label);
  if (!canonical) {
    throw TemplateError("no template for relation " + std::string(label));
  }
  return patterns_.at(*canonical);
}

std::vector<std::string> RelationTemplates::Labels() const {
  std::vector<std::string> labels;
  for (const auto& [label, pattern] : patterns_) labels.push_back(label);
  return labels;
}

std::string RelationTemplates::Instantiate(std::string_view label,
                                           std::string_view subject,
                                           std::string_view object) const {
  std::string text = Pattern(label);
  // Substitute into placeholders that cannot occur in the slot values.
  ReplaceAll(text, "{s}", "\x01");
  ReplaceAll(text, "{o}", "\x02");
  ReplaceAll(text, "\x01", subject);
  ReplaceAll(text, "\x02", object);
  return text;
}

KnowledgeStore::KnowledgeStore() : KnowledgeStore(RelationTemplates::Bundled()) {}

KnowledgeStore::KnowledgeStore(RelationTemplates templates)
    : templates_(std::move(templates)) {}

bool KnowledgeStore::Insert(Triple triple) {
  if (triple.subject.empty() || triple.object.empty()) {
    throw std::invalid_argument("triple subject and object must be nonempty");
  }
  std::optional<std::string> label = templates_.Canonical(triple.relation);
  if (!label) {
    throw std::invalid_argument("unknown relation label " + triple.relation);
  }
  triple.relation = *label;
  if (!keys_.insert(triple).second) return false;
  objects_.insert(triple.object);
  by_head_[triple.HeadWord()].push_back(triples_.size());
  triples_.push_back(std::move(triple));
  return true;
}

IngestReport KnowledgeStore::Ingest(std::istream& in) {
  IngestReport report;
  std::string line;
  int64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    ++report.rows;
    std::ostringstream where;
    where << "line " << line_number << ": ";
    std::vector<std::string_view> fields = SplitTabs(line);
    if (fields.size() != 3) {
      ++report.skipped;
      report.diagnostics.push_back(where.str() + "expected 3 tab-separated fields");
      continue;
    }
    Triple triple;
    triple.subject = SplitWords(fields[0]);
    triple.object = SplitWords(fields[2]);
    std::optional<std::string> label = templates_.Canonical(fields[1]);
    if (!label) {
      ++report.skipped;
      report.diagnostics.push_back(where.str() + "unknown relation '" +
                                   std::string(Trim(fields[1])) + "'");
      continue;
    }
    if (triple.subject.empty() || triple.object.empty()) {
      ++report.skipped;
      report.diagnostics.push_back(where.str() + "empty subject or object");
      continue;
    }
    triple.relation = *label;
    triple.provenance = Provenance::kIngested;
    if (Insert(std::move(triple))) {
      ++report.accepted;
    } else {
      ++report.duplicates;
    }
  }
  return report;
}

IngestReport KnowledgeStore::IngestFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open triple file " + path);
  return Ingest(in);
}

std::vector<const Triple*> KnowledgeStore::BySubjectHead(
    const std::string& word) const {
  std::vector<const Triple*> out;
  auto it = by_head_.find(word);
  if (it == by_head_.end()) return out;
  for (size_t index : it->second) out.push_back(&triples_[index]);
  return out;
}

bool KnowledgeStore::Contains(const Triple& triple) const {
  return keys_.count(triple) > 0;
}

bool KnowledgeStore::ContainsObject(const std::vector<std::string>& object) const {
  return objects_.count(object) > 0;
}

void KnowledgeStore::Export(std::ostream& out) const {
  for (const Triple& triple : triples_) {
    out << triple.SubjectText() << '\t' << triple.relation << '\t'
        << triple.ObjectText() << '\n';
  }
}

void KnowledgeStore::ExportFile(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write triple file " + path);
  Export(out);
}

std::string Verbalize(const Triple& triple, const RelationTemplates& templates) {
  return ToLower(templates.Instantiate(triple.relation, triple.SubjectText(),
                                       triple.ObjectText()));
}

std::string Verbalize(const Triple& triple, const KnowledgeStore& store) {
  return Verbalize(triple, store.templates());
}

}  // namespace cegi
