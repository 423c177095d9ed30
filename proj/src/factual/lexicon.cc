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

#include "cegi/factual/lexicon.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cegi/bundled_data.h"

namespace cegi {
namespace {

bool EndsWith(std::string_view word, std::string_view suffix) {
  return word.size() > suffix.size() + 1 &&
         word.substr(word.size() - suffix.size()) == suffix;
}

bool IsWordToken(std::string_view word) {
  if (word.empty() || word.front() == '[') return false;
  return std::any_of(word.begin(), word.end(), [](char c) {
    return std::isalpha(static_cast<unsigned char>(c));
  });
}

std::vector<PosTag> SuffixTags(std::string_view word) {
  if (!IsWordToken(word)) return {PosTag::kOther};
  if (EndsWith(word, "ing") || EndsWith(word, "ed")) return {PosTag::kVerb};
  if (EndsWith(word, "ly")) return {PosTag::kAdverb};
  for (std::string_view suffix : {"ous", "ful", "able", "ible", "ive", "less", "al"}) {
    if (EndsWith(word, suffix)) return {PosTag::kAdjective};
  }
  return {PosTag::kNoun};
}

bool Contains(const std::vector<PosTag>& tags, PosTag tag) {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

std::string_view Trim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  return text;
}

const std::set<std::string, std::less<>>& Determiners() {
  static const auto* words = new std::set<std::string, std::less<>>{
      "a", "an", "the", "my", "your", "his", "her", "its", "our", "their",
      "this", "that", "these", "those", "some", "any", "every", "each"};
  return *words;
}

const std::set<std::string, std::less<>>& VerbCues() {
  static const auto* words = new std::set<std::string, std::less<>>{
      "to", "can", "could", "will", "would", "should", "must", "might",
      "may", "i", "you", "he", "she", "we", "they", "not"};
  return *words;
}

}  // namespace

const char* PosTagName(PosTag tag) {
  switch (tag) {
    case PosTag::kNoun: return "noun";
    case PosTag::kVerb: return "verb";
    case PosTag::kAdjective: return "adjective";
    case PosTag::kAdverb: return "adverb";
    case PosTag::kOther: return "other";
  }
  return "other";
}

std::optional<PosTag> ParsePosTag(std::string_view name) {
  for (PosTag tag : {PosTag::kNoun, PosTag::kVerb, PosTag::kAdjective,
                     PosTag::kAdverb, PosTag::kOther}) {
    if (name == PosTagName(tag)) return tag;
  }
  return std::nullopt;
}

const PosLexicon& PosLexicon::Bundled() {
  static const PosLexicon* lexicon =
      new PosLexicon(Parse(bundled::kPosLexicon, bundled::kStopwords));
  return *lexicon;
}

PosLexicon PosLexicon::Parse(std::string_view lexicon,
                             std::string_view stopwords) {
  PosLexicon out;
  std::istringstream rows{std::string(lexicon)};
  std::string line;
  int64_t line_number = 0;
  while (std::getline(rows, line)) {
    ++line_number;
    std::string_view trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    size_t tab = trimmed.find('\t');
    if (tab == std::string_view::npos) {
      throw std::invalid_argument("lexicon line " + std::to_string(line_number) +
                                  ": expected word<TAB>tags");
    }
    std::string word(Trim(trimmed.substr(0, tab)));
    std::vector<PosTag> tags;
    std::string_view rest = trimmed.substr(tab + 1);
    while (!rest.empty()) {
      size_t comma = rest.find(',');
      std::string_view name = Trim(rest.substr(0, comma));
      std::optional<PosTag> tag = ParsePosTag(name);
      if (!tag) {
        throw std::invalid_argument("lexicon line " +
                                    std::to_string(line_number) +
                                    ": unknown tag '" + std::string(name) + "'");
      }
      if (!cegi::Contains(tags, *tag)) tags.push_back(*tag);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (tags.empty()) {
      throw std::invalid_argument("lexicon line " + std::to_string(line_number) +
                                  ": no tags");
    }
    out.entries_[word] = std::move(tags);
  }
  std::istringstream words{std::string(stopwords)};
  while (std::getline(words, line)) {
    std::string_view word = Trim(line);
    if (!word.empty() && word.front() != '#') out.stopwords_.emplace(word);
  }
  return out;
}

std::vector<PosTag> PosLexicon::Tags(std::string_view word) const {
  auto it = entries_.find(std::string(word));
  if (it != entries_.end()) return it->second;
  return SuffixTags(word);
}

PosTag PosLexicon::TagInContext(std::span<const std::string> words,
                                size_t index) const {
  std::vector<PosTag> tags = Tags(words[index]);
  if (tags.size() > 1 && index > 0) {
    const std::string& previous = words[index - 1];
    if (Determiners().count(previous) && cegi::Contains(tags, PosTag::kNoun)) {
      return PosTag::kNoun;
    }
    if (VerbCues().count(previous) && cegi::Contains(tags, PosTag::kVerb)) {
      return PosTag::kVerb;
    }
  }
  return tags.front();
}

bool PosLexicon::IsStopword(std::string_view word) const {
  return stopwords_.find(word) != stopwords_.end();
}

bool PosLexicon::Contains(std::string_view word) const {
  return entries_.count(std::string(word)) > 0;
}

std::vector<Entity> ExtractEntities(
    std::span<const std::vector<std::string>> texts, const PosLexicon& lexicon) {
  std::vector<Entity> entities;
  std::set<std::string> seen;
  for (const auto& words : texts) {
    for (size_t i = 0; i < words.size(); ++i) {
      const std::string& word = words[i];
      if (!IsWordToken(word) || lexicon.IsStopword(word)) continue;
      if (seen.count(word)) continue;
      PosTag tag = lexicon.TagInContext(words, i);
      if (tag != PosTag::kNoun && tag != PosTag::kVerb &&
          tag != PosTag::kAdjective) {
        continue;
      }
      seen.insert(word);
      entities.push_back({word, tag});
    }
  }
  return entities;
}

FrequencyTable FrequencyTable::FromRankedWords(std::vector<std::string> words,
                                               std::vector<int64_t> counts) {
  if (!counts.empty() && counts.size() != words.size()) {
    throw std::invalid_argument("frequency counts do not match word list");
  }
  FrequencyTable table;
  for (size_t i = 0; i < words.size(); ++i) {
    if (!table.rank_.emplace(words[i], static_cast<int64_t>(i) + 1).second) {
      throw std::invalid_argument("duplicate word in frequency table: " +
                                  words[i]);
    }
  }
  table.words_ = std::move(words);
  table.counts_ = std::move(counts);
  return table;
}

FrequencyTable FrequencyTable::FromCounts(
    const std::map<std::string, int64_t>& counts) {
  std::vector<std::pair<std::string, int64_t>> entries(counts.begin(),
                                                       counts.end());
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> words;
  std::vector<int64_t> values;
  for (auto& [word, count] : entries) {
    words.push_back(word);
    values.push_back(count);
  }
  return FromRankedWords(std::move(words), std::move(values));
}

FrequencyTable FrequencyTable::FromCorpus(
    std::span<const std::vector<std::string>> sentences) {
  std::map<std::string, int64_t> counts;
  for (const auto& sentence : sentences) {
    for (const auto& word : sentence) ++counts[word];
  }
  return FromCounts(counts);
}

FrequencyTable FrequencyTable::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open frequency table " + path);
  std::vector<std::string> words;
  std::vector<int64_t> counts;
  bool with_counts = true;
  std::string line;
  int64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    size_t tab = trimmed.find('\t');
    words.emplace_back(Trim(trimmed.substr(0, tab)));
    if (tab == std::string_view::npos) {
      with_counts = false;
      continue;
    }
    try {
      counts.push_back(std::stoll(std::string(trimmed.substr(tab + 1))));
    } catch (const std::exception&) {
      throw std::invalid_argument("frequency table line " +
                                  std::to_string(line_number) + ": bad count");
    }
  }
  if (!with_counts) counts.clear();
  return FromRankedWords(std::move(words), std::move(counts));
}

void FrequencyTable::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write frequency table " + path);
  for (size_t i = 0; i < words_.size(); ++i) {
    out << words_[i];
    if (!counts_.empty()) out << '\t' << counts_[i];
    out << '\n';
  }
}

std::optional<int64_t> FrequencyTable::Rank(std::string_view word) const {
  auto it = rank_.find(std::string(word));
  if (it == rank_.end()) return std::nullopt;
  return it->second;
}

std::optional<int64_t> FrequencyTable::Count(std::string_view word) const {
  if (counts_.empty()) return std::nullopt;
  std::optional<int64_t> rank = Rank(word);
  if (!rank) return 0;
  return counts_[*rank - 1];
}

bool FrequencyTable::InTopK(std::string_view word, int64_t k) const {
  std::optional<int64_t> rank = Rank(word);
  return rank && *rank <= k;
}

}  // namespace cegi
