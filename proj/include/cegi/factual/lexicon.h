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

#ifndef CEGI_FACTUAL_LEXICON_H_
#define CEGI_FACTUAL_LEXICON_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cegi {

enum class PosTag { kNoun, kVerb, kAdjective, kAdverb, kOther };

const char* PosTagName(PosTag tag);
std::optional<PosTag> ParsePosTag(std::string_view name);

// Coarse part-of-speech lookup: lexicon entries first, then suffix rules,
// then noun. Also owns the stop-word list used by entity extraction.
class PosLexicon {
 public:
  // The tables shipped in data/pos_lexicon.tsv and data/stopwords.txt.
  static const PosLexicon& Bundled();
  // Lexicon rows "word<TAB>tag[,tag...]" with the primary tag first;
  // stop-words one per line.
  static PosLexicon Parse(std::string_view lexicon, std::string_view stopwords);

  // Candidate tags, primary first; never empty.
  std::vector<PosTag> Tags(std::string_view word) const;
  PosTag PrimaryTag(std::string_view word) const { return Tags(word).front(); }
  // Picks among a word's candidate tags using the preceding word.
  PosTag TagInContext(std::span<const std::string> words, size_t index) const;

  bool IsStopword(std::string_view word) const;
  bool Contains(std::string_view word) const;

 private:
  std::unordered_map<std::string, std::vector<PosTag>> entries_;
  std::set<std::string, std::less<>> stopwords_;
};

struct Entity {
  std::string word;
  PosTag tag;
  bool operator==(const Entity&) const = default;
};

// Content words (nouns, verbs, adjectives) of the given token sequences in
// first-occurrence order, stop-words and punctuation removed, deduplicated
// by word.
std::vector<Entity> ExtractEntities(
    std::span<const std::vector<std::string>> texts, const PosLexicon& lexicon);

// Word frequency ranks, 1 = most frequent. Counts are optional and needed
// only by the count-based filter mode.
class FrequencyTable {
 public:
  FrequencyTable() = default;
  // Words in rank order; duplicate words throw.
  static FrequencyTable FromRankedWords(std::vector<std::string> words,
                                        std::vector<int64_t> counts = {});
  // Count descending, ties by word.
  static FrequencyTable FromCounts(const std::map<std::string, int64_t>& counts);
  static FrequencyTable FromCorpus(
      std::span<const std::vector<std::string>> sentences);
  // Lines "word" or "word<TAB>count", most frequent first.
  static FrequencyTable Load(const std::string& path);
  void Save(const std::string& path) const;

  std::optional<int64_t> Rank(std::string_view word) const;
  std::optional<int64_t> Count(std::string_view word) const;
  bool InTopK(std::string_view word, int64_t k) const;
  bool has_counts() const { return !counts_.empty(); }
  size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::vector<int64_t> counts_;
  std::unordered_map<std::string, int64_t> rank_;
};

}  // namespace cegi

#endif  // CEGI_FACTUAL_LEXICON_H_
