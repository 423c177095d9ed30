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

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "cegi/encoder/tokenizer.h"
#include "cegi/factual/filter.h"
#include "cegi/factual/knowledge_store.h"
#include "cegi/factual/lexicon.h"
#include "cegi/factual/novelty.h"
#include "cegi/factual/triple_completion.h"
#include "cegi/pipeline/generators.h"
#include "doctest.h"
#include "oracles.h"

namespace cegi {
namespace {

std::string Fixture(const std::string& name) {
  return std::string(CEGI_FIXTURE_DIR) + "/" + name;
}

Triple MakeTriple(const std::string& s, const std::string& r, const std::string& o) {
  return {SplitWords(s), r, SplitWords(o)};
}

std::multiset<std::tuple<std::vector<std::string>, std::string, std::vector<std::string>>>
Multiset(const std::vector<Triple>& triples) {
  std::multiset<std::tuple<std::vector<std::string>, std::string, std::vector<std::string>>>
      out;
  for (const Triple& t : triples) out.insert({t.subject, t.relation, t.object});
  return out;
}

TEST_CASE("bundled templates cover every relation once") {
  const RelationTemplates& templates = RelationTemplates::Bundled();
  CHECK(templates.size() == 34);
  const auto labels = templates.Labels();
  CHECK(std::set<std::string>(labels.begin(), labels.end()).size() == 34);
  CHECK(templates.Canonical("Partof") == std::optional<std::string>("PartOf"));
  CHECK(templates.Canonical("capableof") == std::optional<std::string>("CapableOf"));
  CHECK_FALSE(templates.Canonical("Antonym").has_value());
  CHECK_THROWS_AS(RelationTemplates::Parse("IsA\t{s} is a thing\n"), TemplateError);
  CHECK_THROWS_AS(RelationTemplates::Parse("IsA\t{s} is {o}\nIsA\t{s} is a {o}\n"),
                  TemplateError);
}

TEST_CASE("verbalization anchors") {
  KnowledgeStore store;
  CHECK(Verbalize(MakeTriple("trouble", "PartOf", "life"), store) ==
        "trouble is part of life");
  CHECK(Verbalize(MakeTriple("bee", "CapableOf", "sting"), store) ==
        "bee is capable of sting");
  CHECK(Verbalize(MakeTriple("spray", "HasProperty", "wet"), store) ==
        "spray has property wet");
  CHECK(Verbalize(MakeTriple("Honey Bee", "IsA", "insect"), store) ==
        "honey bee is a insect");
}

TEST_CASE("verbalization is injective per relation") {
  const RelationTemplates& templates = RelationTemplates::Bundled();
  const std::vector<std::string> words = {"bee", "sting", "red", "the sun", "a",
                                          "is", "part of", "life", "x y z"};
  for (const std::string& relation : templates.Labels()) {
    std::map<std::string, std::pair<std::string, std::string>> seen;
    for (const auto& s : words) {
      for (const auto& o : words) {
        const std::string text = Verbalize(MakeTriple(s, relation, o), templates);
        auto [it, inserted] = seen.emplace(text, std::make_pair(s, o));
        CHECK_MESSAGE(inserted, relation << ": " << text);
      }
    }
  }
}

TEST_CASE("ingestion accepts, deduplicates and skips") {
  KnowledgeStore store;
  std::istringstream rows(
      "trouble\tPartOf\tlife\n"
      "trouble\tpartof\tlife\n"
      "bee\tCapableOf\t\n"
      "bee\tAntonym\tant\n"
      "only two\tfields\n"
      "\n"
      "Honey  Bee\tIsA\tinsect\n");
  IngestReport report = store.Ingest(rows);
  CHECK(report.rows == 6);
  CHECK(report.accepted == 2);
  CHECK(report.duplicates == 1);
  CHECK(report.skipped == 3);
  CHECK(report.diagnostics.size() == 3);
  CHECK(store.Contains(MakeTriple("trouble", "PartOf", "life")));
  CHECK(store.Contains(MakeTriple("honey bee", "IsA", "insect")));
  CHECK(store.BySubjectHead("bee").size() == 1);
}

TEST_CASE("ingestion is idempotent and export round-trips") {
  KnowledgeStore store;
  IngestReport first = store.IngestFile(Fixture("triples_50.tsv"));
  CHECK(first.accepted == 50);
  IngestReport again = store.IngestFile(Fixture("triples_50.tsv"));
  CHECK(again.accepted == 0);
  CHECK(again.duplicates == 50);
  CHECK(store.size() == 50);
  std::ostringstream exported;
  store.Export(exported);
  KnowledgeStore reloaded;
  std::istringstream in(exported.str());
  reloaded.Ingest(in);
  CHECK(Multiset(reloaded.triples()) == Multiset(store.triples()));
  // Every stored triple is reachable through its subject head word.
  for (const Triple& t : store.triples()) {
    const auto hits = store.BySubjectHead(t.HeadWord());
    CHECK(std::any_of(hits.begin(), hits.end(), [&](const Triple* p) { return *p == t; }));
  }
}

TEST_CASE("entity extraction") {
  const PosLexicon& lexicon = PosLexicon::Bundled();
  const std::vector<std::vector<std::string>> bee = {SplitWords("the bee stung him")};
  CHECK(ExtractEntities(bee, lexicon) ==
        std::vector<Entity>{{"bee", PosTag::kNoun}, {"stung", PosTag::kVerb}});
  const std::vector<std::vector<std::string>> stop = {SplitWords("the of and it is")};
  CHECK(ExtractEntities(stop, lexicon).empty());
  const std::vector<std::vector<std::string>> both = {SplitWords("the garden"),
                                                      SplitWords("a garden ?")};
  CHECK(ExtractEntities(both, lexicon).size() == 1);
}

TEST_CASE("lexicon suffix fallback and context rule") {
  const PosLexicon lexicon = PosLexicon::Parse("run\tverb,noun\nquick\tadjective\n", "the\nto\n");
  CHECK(lexicon.PrimaryTag("zorbing") == PosTag::kVerb);
  CHECK(lexicon.PrimaryTag("zorbed") == PosTag::kVerb);
  CHECK(lexicon.PrimaryTag("zorbly") == PosTag::kAdverb);
  CHECK(lexicon.PrimaryTag("zorbous") == PosTag::kAdjective);
  CHECK(lexicon.PrimaryTag("zorb") == PosTag::kNoun);
  CHECK(lexicon.PrimaryTag(",") == PosTag::kOther);
  const std::vector<std::string> noun_context = {"the", "run"};
  const std::vector<std::string> verb_context = {"to", "run"};
  CHECK(lexicon.TagInContext(noun_context, 1) == PosTag::kNoun);
  CHECK(lexicon.TagInContext(verb_context, 1) == PosTag::kVerb);
  CHECK(lexicon.IsStopword("the"));
  CHECK_FALSE(lexicon.Tags("anything").empty());
}

TEST_CASE("frequency table ranks") {
  const FrequencyTable table = FrequencyTable::Load(Fixture("frequency.tsv"));
  CHECK(table.Rank("the") == std::optional<int64_t>(1));
  CHECK(table.Rank("bee") == std::optional<int64_t>(51));
  CHECK_FALSE(table.Rank("zebra").has_value());
  CHECK(table.InTopK("of", 5));
  CHECK_FALSE(table.InTopK("bee", 5));
  CHECK_FALSE(table.InTopK("zebra", 5));
  CHECK(table.Count("spray") == std::optional<int64_t>(400));
  CHECK_THROWS(FrequencyTable::FromRankedWords({"a", "b", "a"}));
  // Ranks are positive and unique.
  std::set<int64_t> ranks;
  for (const auto& word : table.words()) ranks.insert(*table.Rank(word));
  CHECK(ranks.size() == table.size());
  CHECK(*ranks.begin() == 1);
}

struct FilterFixture {
  FilterFixture()
      : frequencies(FrequencyTable::Load(Fixture("frequency.tsv"))),
        lexicon(PosLexicon::Bundled()) {
    store.IngestFile(Fixture("triples_50.tsv"));
    const std::vector<std::vector<std::string>> text = {
        SplitWords("the bee stung him near the flower garden . trouble is part "
                   "of life . the spray paint was wet in the sun . the dog ran "
                   "to the wax hive for help")};
    entities = ExtractEntities(text, lexicon);
    entities.push_back({"the", PosTag::kNoun});
  }
  KnowledgeStore store;
  FrequencyTable frequencies;
  const PosLexicon& lexicon;
  std::vector<Entity> entities;
};

TEST_CASE("filter rule spot checks") {
  FilterFixture f;
  FilterParams params{5, 3, 2, FrequencyRule::kRank};
  const Triple the = MakeTriple("the", "IsA", "article");
  RuleChecks checks = CheckRules(the, f.entities, f.frequencies, f.lexicon, params);
  CHECK_FALSE(checks.rare_subject);
  CHECK_FALSE(checks.Passes());

  const std::vector<Triple> two = {MakeTriple("bee", "CapableOf", "sting"),
                                   MakeTriple("bee", "CapableOf", "fly")};
  params.max_objects = 1;
  params.object_slack = 100;
  const auto kept = FilterTriples(two, f.entities, f.frequencies, f.lexicon, params);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0] == two[0]);

  // An unseen subject passes the frequency rules outright.
  const Triple wax = MakeTriple("wax", "PartOf", "hive");
  checks = CheckRules(wax, f.entities, f.frequencies, f.lexicon, params);
  CHECK(checks.frequency);
  CHECK(checks.rare_subject);
  // A subject with no matching entity fails rule (i).
  checks = CheckRules(MakeTriple("insect", "CapableOf", "fly"), f.entities,
                      f.frequencies, f.lexicon, params);
  CHECK(checks.entity == nullptr);
  CHECK_FALSE(checks.Passes());
  CHECK_THROWS(FilterTriples(two, f.entities, f.frequencies, f.lexicon,
                             FilterParams{0, 1, 1, FrequencyRule::kRank}));
}

TEST_CASE("filter agrees with the brute-force oracle on random candidate lists") {
  FilterFixture f;
  Rng rng(13);
  const auto& all = f.store.triples();
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Triple> candidates;
    const int64_t count = static_cast<int64_t>(rng.Uniform() * 40);
    for (int64_t i = 0; i < count; ++i) {
      candidates.push_back(all[static_cast<size_t>(rng.Uniform() * all.size())]);
    }
    FilterParams params;
    params.top_k = 1 + static_cast<int64_t>(rng.Uniform() * 20);
    params.object_slack = 1 + static_cast<int64_t>(rng.Uniform() * 30);
    params.max_objects = 1 + static_cast<int64_t>(rng.Uniform() * 3);
    params.mode = rng.Uniform() < 0.5 ? FrequencyRule::kRank : FrequencyRule::kCount;
    if (params.mode == FrequencyRule::kCount) params.object_slack *= 200;
    const auto got =
        FilterTriples(candidates, f.entities, f.frequencies, f.lexicon, params);
    CHECK(got == testing::BruteForceFilter(candidates, f.entities, f.frequencies,
                                           f.lexicon, params));
    // Subset, idempotence and the per-(subject, relation) cap.
    for (const Triple& t : got) {
      CHECK(std::find(candidates.begin(), candidates.end(), t) != candidates.end());
    }
    CHECK(FilterTriples(got, f.entities, f.frequencies, f.lexicon, params) == got);
    std::map<std::pair<std::vector<std::string>, std::string>, int64_t> per_key;
    for (const Triple& t : got) ++per_key[{t.subject, t.relation}];
    for (const auto& [key, n] : per_key) CHECK(n <= params.max_objects);
  }
}

TEST_CASE("novelty metrics") {
  KnowledgeStore store;
  store.IngestFile(Fixture("triples_50.tsv"));
  const std::vector<Triple> copies(store.triples().begin(), store.triples().begin() + 5);
  NoveltyMetrics none = ComputeNovelty(copies, store);
  CHECK(none.novel_triples == 0.0);
  CHECK(none.novel_objects == 0.0);
  const std::vector<Triple> fresh = {MakeTriple("bee", "IsA", "zzz"),
                                     MakeTriple("sun", "IsA", "qqq")};
  NoveltyMetrics all_new = ComputeNovelty(fresh, store);
  CHECK(all_new.novel_objects == 1.0);
  CHECK(all_new.novel_triples == 1.0);
  CHECK_THROWS(ComputeNovelty(std::vector<Triple>{}, store));
  Rng rng(14);
  const std::vector<std::string> objects = {"sting", "wet", "zzz", "life", "qqq"};
  const std::vector<std::string> subjects = {"bee", "spray", "trouble", "sun"};
  const std::vector<std::string> relations = {"CapableOf", "HasProperty", "PartOf"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Triple> generated;
    const int64_t count = 1 + static_cast<int64_t>(rng.Uniform() * 10);
    for (int64_t i = 0; i < count; ++i) {
      generated.push_back(MakeTriple(
          subjects[static_cast<size_t>(rng.Uniform() * subjects.size())],
          relations[static_cast<size_t>(rng.Uniform() * relations.size())],
          objects[static_cast<size_t>(rng.Uniform() * objects.size())]));
    }
    const NoveltyMetrics got = ComputeNovelty(generated, store);
    const NoveltyMetrics want = testing::OracleNovelty(generated, store.triples());
    CHECK(got.novel_triples == want.novel_triples);
    CHECK(got.novel_objects == want.novel_objects);
  }
}

TEST_CASE("triple completion after overfitting") {
  KnowledgeStore store;
  std::istringstream rows(
      "bee\tCapableOf\tsting\n"
      "bee\tAtLocation\thive\n"
      "spray\tHasProperty\twet\n"
      "trouble\tPartOf\tlife\n");
  store.Ingest(rows);
  GeneratorTraining training;
  training.encoder.dim = 16;
  training.encoder.layers = 1;
  training.encoder.heads = 2;
  training.encoder.max_length = 16;
  training.pretrain_epochs = 120;
  training.batch_size = 4;
  training.learning_rate = 1e-2;
  LanguageModelBundle bundle = TrainCompletionModel(store, training);
  TripleCompleter completer(*bundle.model, bundle.vocab, store.templates());
  const std::vector<std::string> bee = {"bee"};
  const auto first = completer.Complete(bee, "CapableOf", TripleCompleter::DefaultDecoding());
  REQUIRE(first.size() == 1);
  CHECK(first[0].ObjectText() == "sting");
  CHECK(first[0].provenance == Provenance::kGenerated);
  CHECK(completer.Complete(bee, "capableof", TripleCompleter::DefaultDecoding()) == first);
  CHECK_THROWS(completer.Complete(bee, "Antonym", TripleCompleter::DefaultDecoding()));
  // A completion equal to a stored triple is not novel.
  CHECK(ComputeNovelty(first, store).novel_triples == 0.0);
  CHECK(TriplePrompt(bee, "CapableOf", bundle.vocab).back() == kSepId);
}

}  // namespace
}  // namespace cegi
