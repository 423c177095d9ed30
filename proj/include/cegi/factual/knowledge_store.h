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

#ifndef CEGI_FACTUAL_KNOWLEDGE_STORE_H_
#define CEGI_FACTUAL_KNOWLEDGE_STORE_H_

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace cegi {

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Provenance { kIngested, kGenerated };

struct Triple {
  std::vector<std::string> subject;
  std::string relation;  // canonical label, e.g. "PartOf"
  std::vector<std::string> object;
  Provenance provenance = Provenance::kIngested;

  std::string SubjectText() const;
  std::string ObjectText() const;
  // Last subject token; multi-word subjects are matched on it.
  const std::string& HeadWord() const { return subject.back(); }
  const std::string& ObjectHeadWord() const { return object.back(); }

  // Identity ignores provenance.
  auto Key() const { return std::tie(subject, relation, object); }
  bool operator==(const Triple& other) const { return Key() == other.Key(); }
  bool operator<(const Triple& other) const { return Key() < other.Key(); }
};

// Relation label -> surface pattern with "{s}" and "{o}" slots.
class RelationTemplates {
 public:
  // The table shipped in data/relation_templates.tsv.
  static const RelationTemplates& Bundled();
  // Rows "Label<TAB>pattern"; blank lines and '#' comments are ignored.
  static RelationTemplates Parse(std::string_view text);
  static RelationTemplates Load(const std::string& path);

  // Case-insensitive lookup of the canonical label.
  std::optional<std::string> Canonical(std::string_view label) const;
  const std::string& Pattern(std::string_view label) const;
  std::vector<std::string> Labels() const;
  size_t size() const { return patterns_.size(); }

  std::string Instantiate(std::string_view label, std::string_view subject,
                          std::string_view object) const;

 private:
  std::map<std::string, std::string> patterns_;   // canonical -> pattern
  std::map<std::string, std::string> canonical_;  // lowercase -> canonical
};

struct IngestReport {
  int64_t rows = 0;
  int64_t accepted = 0;
  int64_t duplicates = 0;
  int64_t skipped = 0;
  std::vector<std::string> diagnostics;
};

// Triples with a subject-head index. Insertion deduplicates on
// (subject, relation, object).
class KnowledgeStore {
 public:
  KnowledgeStore();
  explicit KnowledgeStore(RelationTemplates templates);

  // Reads "subject<TAB>relation<TAB>object" rows.
  IngestReport Ingest(std::istream& in);
  IngestReport IngestFile(const std::string& path);

  // Returns false for duplicates. Throws for unknown relations or empty
  // subject/object.
  bool Insert(Triple triple);

  const std::vector<Triple>& triples() const { return triples_; }
  size_t size() const { return triples_.size(); }
  const RelationTemplates& templates() const { return templates_; }

  // Stored triples whose subject head word is `word`, in insertion order.
  std::vector<const Triple*> BySubjectHead(const std::string& word) const;
  bool Contains(const Triple& triple) const;
  bool ContainsObject(const std::vector<std::string>& object) const;

  // Writes rows readable by Ingest, in insertion order.
  void Export(std::ostream& out) const;
  void ExportFile(const std::string& path) const;

 private:
  RelationTemplates templates_;
  std::vector<Triple> triples_;
  std::set<Triple> keys_;
  std::set<std::vector<std::string>> objects_;
  std::map<std::string, std::vector<size_t>> by_head_;
};

// Lowercased template instantiation, e.g. "trouble is part of life".
std::string Verbalize(const Triple& triple, const RelationTemplates& templates);
std::string Verbalize(const Triple& triple, const KnowledgeStore& store);

}  // namespace cegi

#endif  // CEGI_FACTUAL_KNOWLEDGE_STORE_H_
