#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "sarcasm/augment.hpp"
#include "sarcasm/error.hpp"
#include "support.hpp"

using namespace sarcasm;

namespace {

SynonymDictionary happy_dict() {
  SynonymDictionary d;
  d.add("happi", {"glad", "joyful"});
  return d;
}

AugmentationPlan plan_of(bool s, bool d, bool r, double rate = 0.1, std::uint64_t seed = 1) {
  AugmentationPlan p;
  p.use_shuffle = s;
  p.use_delete = d;
  p.use_replace = r;
  p.delete_rate = rate;
  p.replace_rate = rate;
  p.seed = seed;
  return p;
}

bool is_subsequence(const TokenList& sub, const TokenList& full) {
  std::size_t k = 0;
  for (const auto& t : full)
    if (k < sub.size() && sub[k] == t) ++k;
  return k == sub.size();
}

}  // namespace

TEST_CASE("synonym dictionary parsing") {
  const auto d = parse_synonym_dictionary("# comment\nhappi\tglad,joyful\n\nbig\tlarge\nbig\thuge,large\n");
  REQUIRE(d.find("happi"));
  CHECK(*d.find("happi") == std::vector<std::string>{"glad", "joyful"});
  CHECK(*d.find("big") == std::vector<std::string>{"large", "huge"});
  CHECK(d.find("small") == nullptr);
  CHECK_THROWS_WITH_AS(parse_synonym_dictionary("sad\t\n"), doctest::Contains("sad"), Error);
  CHECK_THROWS_AS(SynonymDictionary().add("x", {}), Error);
}

TEST_CASE("synonym dictionary file") {
  testing::TempDir dir("dict");
  testing::write_text(dir / "syn.tsv", "happi\tglad,joyful\n");
  CHECK(load_synonym_dictionary(dir / "syn.tsv").size() == 1);
  CHECK_THROWS_AS(load_synonym_dictionary(dir / "missing.tsv"), Error);
}

TEST_CASE("plan validation and naming") {
  CHECK_THROWS_AS(plan_of(false, false, false).validate(), Error);
  CHECK_THROWS_AS(plan_of(false, true, false, 1.5).validate(), Error);
  CHECK(plan_of(true, false, true).name() == "Shuffling+Replacing");
  CHECK(plan_of(true, true, true).code() == "SDR");
  CHECK(parse_plan_ops("shuffle,delete,replace").code() == "SDR");
  CHECK(parse_plan_ops("remove").code() == "D");
  CHECK(parse_plan_ops("synonym, shuffle").code() == "SR");
  CHECK_THROWS_WITH_AS(parse_plan_ops("none"), doctest::Contains("shuffle"), Error);
  CHECK_THROWS_WITH_AS(parse_plan_ops("twist"), doctest::Contains("replace"), Error);
  CHECK_THROWS_AS(parse_plan_ops(""), Error);
}

TEST_CASE("seven plans") {
  const auto plans = all_plans(0.1, 0.1, 3);
  REQUIRE(plans.size() == 7);
  std::set<std::string> codes;
  for (const auto& p : plans) codes.insert(p.code());
  CHECK(codes == std::set<std::string>{"S", "D", "R", "SD", "SR", "DR", "SDR"});
}

TEST_CASE("shuffle") {
  Rng rng(1);
  CHECK(shuffle_tokens({}, rng).empty());
  CHECK(shuffle_tokens({"a"}, rng) == TokenList{"a"});

  std::map<TokenList, int> counts;
  constexpr int kSeeds = 10000;
  for (int s = 0; s < kSeeds; ++s) {
    Rng r(static_cast<std::uint64_t>(s));
    ++counts[shuffle_tokens({"x", "y", "z"}, r)];
  }
  CHECK(counts.size() == 6);
  for (const auto& [perm, n] : counts) CHECK(std::abs(n / double(kSeeds) - 1.0 / 6.0) <= 0.02);
}

TEST_CASE("delete") {
  const TokenList ten{"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
  Rng rng(4);
  CHECK(delete_tokens(ten, 0.0, rng) == ten);
  for (int s = 0; s < 50; ++s) {
    Rng r(static_cast<std::uint64_t>(s));
    CHECK(delete_tokens({"a", "b"}, 1.0, r).size() == 1);
  }
  CHECK(delete_tokens({}, 0.5, rng).empty());
  CHECK_THROWS_AS(delete_tokens(ten, -0.1, rng), Error);
  CHECK_THROWS_AS(delete_tokens(ten, 1.1, rng), Error);

  double total = 0.0;
  constexpr int kSeeds = 10000;
  for (int s = 0; s < kSeeds; ++s) {
    Rng r(static_cast<std::uint64_t>(s));
    total += static_cast<double>(delete_tokens(ten, 0.1, r).size());
  }
  CHECK(std::abs(total / kSeeds - 9.0) <= 0.1);
}

TEST_CASE("replace") {
  const auto dict = happy_dict();
  std::map<std::string, int> counts;
  constexpr int kSeeds = 10000;
  for (int s = 0; s < kSeeds; ++s) {
    Rng r(static_cast<std::uint64_t>(s));
    const auto out = replace_synonyms({"happy"}, dict, 1.0, r);
    REQUIRE(out.size() == 1);
    ++counts[out[0]];
  }
  CHECK(counts.size() == 2);
  CHECK(std::abs(counts["glad"] / double(kSeeds) - 0.5) <= 0.02);
  CHECK(std::abs(counts["joyful"] / double(kSeeds) - 0.5) <= 0.02);

  Rng rng(9);
  CHECK(replace_synonyms({"table", "chair"}, dict, 1.0, rng) == TokenList{"table", "chair"});
  CHECK(replace_synonyms({"happy", "happy"}, dict, 0.0, rng) == TokenList{"happy", "happy"});
  CHECK_THROWS_AS(replace_synonyms({"happy"}, dict, 2.0, rng), Error);

  SynonymDictionary self;
  self.add("glad", {"glad"});
  CHECK(replace_synonyms({"glad"}, self, 1.0, rng) == TokenList{"glad"});
  SynonymDictionary with_self;
  with_self.add("glad", {"glad", "cheer"});
  for (int s = 0; s < 100; ++s) {
    Rng r(static_cast<std::uint64_t>(s));
    CHECK(replace_synonyms({"glad"}, with_self, 1.0, r) == TokenList{"cheer"});
  }
}

TEST_CASE("mutate_tweet") {
  const TweetRecord good("good morning", Label::Sarcastic, {"irony"});
  const auto dict = happy_dict();

  const auto shuffled = mutate_tweet(good, plan_of(true, false, false), dict);
  auto tokens = tokenize(shuffled.text());
  std::sort(tokens.begin(), tokens.end());
  CHECK(tokens == TokenList{"good", "morning"});
  CHECK(shuffled.label() == Label::Sarcastic);
  CHECK(shuffled.sarcasm_types() == good.sarcasm_types());
  CHECK(shuffled.source() == Source::Generated);

  CHECK(tokenize(mutate_tweet(good, plan_of(false, true, false, 1.0), dict).text()).size() == 1);

  // one effect per single operator on a sample tweet
  const TweetRecord sample("I am so happy to wait in line for three hours today", Label::Sarcastic);
  const auto base = tokenize(sample.text());
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = tokenize(mutate_tweet(sample, plan_of(true, false, false, 0.1, seed), dict).text());
    auto a = s, b = base;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);

    const auto d = tokenize(mutate_tweet(sample, plan_of(false, true, false, 0.3, seed), dict).text());
    CHECK(d.size() <= base.size());
    CHECK(is_subsequence(d, base));

    const auto r = tokenize(mutate_tweet(sample, plan_of(false, false, true, 1.0, seed), dict).text());
    REQUIRE(r.size() == base.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (base[i] == "happy") {
        CHECK((r[i] == "glad" || r[i] == "joyful"));
      } else {
        CHECK(r[i] == base[i]);
      }
    }
  }
}

TEST_CASE("record seeds follow seed xor index") {
  CHECK(record_seed(0xABCDEF, 17) == (0xABCDEFULL ^ 17ULL));
  CHECK(record_seed(5, 3, 1) != record_seed(5, 3, 0));
}

TEST_CASE("augment_dataset") {
  Dataset d;
  for (int i = 0; i < 777; ++i)
    d.records.emplace_back("so happy about tweet " + std::to_string(i), Label::Sarcastic);
  for (int i = 0; i < 3707; ++i)
    d.records.emplace_back("plain tweet " + std::to_string(i), Label::NonSarcastic);
  const auto dict = happy_dict();
  const auto plan = plan_of(false, true, true, 0.2, 7);

  const auto out = augment_dataset(d, plan, AugmentPolicy{}, dict);
  CHECK(out.size() == 5261);
  CHECK(std::equal(d.records.begin(), d.records.end(), out.records.begin()));
  for (std::size_t i = d.size(); i < out.size(); ++i) {
    CHECK(out.records[i].label() == Label::Sarcastic);
    CHECK(out.records[i].source() == Source::Generated);
  }

  Dataset small;
  for (int i = 0; i < 10; ++i)
    small.records.emplace_back("tweet number " + std::to_string(i),
                               i % 2 ? Label::Sarcastic : Label::NonSarcastic);
  AugmentPolicy both{TargetClass::Both, 1};
  CHECK(augment_dataset(small, plan, both, dict).size() == 20);
  AugmentPolicy three{TargetClass::Both, 3};
  CHECK(augment_dataset(small, plan, three, dict).size() == 40);
  CHECK_THROWS_AS(augment_dataset(small, plan, AugmentPolicy{TargetClass::Both, 0}, dict), Error);

  const auto again = augment_dataset(d, plan, AugmentPolicy{}, dict);
  CHECK(serialize_dataset(again, FileFormat::Jsonl) == serialize_dataset(out, FileFormat::Jsonl));
}

TEST_CASE("augmentation is independent of processing order") {
  Dataset d;
  for (int i = 0; i < 30; ++i)
    d.records.emplace_back("a b c d e f " + std::to_string(i), Label::Sarcastic);
  const auto plan = plan_of(true, true, false, 0.3, 11);
  const auto out = augment_dataset(d, plan, AugmentPolicy{}, {});
  // each copy only depends on its own record index
  for (std::size_t i = 0; i < d.size(); ++i)
    CHECK(out.records[d.size() + i] == mutate_tweet(d.records[i], plan, {}, i, 0));
}

TEST_CASE("generated sampling") {
  Dataset gen;
  for (int i = 0; i < 2000; ++i) gen.records.emplace_back("s" + std::to_string(i), Label::Sarcastic);
  for (int i = 0; i < 2000; ++i)
    gen.records.emplace_back("n" + std::to_string(i), Label::NonSarcastic);
  const auto all = sample_generated(gen, 2000, 1);
  CHECK(all.size() == 4000);
  for (const auto& r : all.records) CHECK(r.source() == Source::Generated);

  CHECK(sample_generated(gen, 0, 1).empty());

  const auto some = sample_generated(gen, 10, 3);
  CHECK(some.size() == 20);
  CHECK(class_stats(some).n_sarcastic == 10);
  CHECK(some.records == sample_generated(gen, 10, 3).records);

  Dataset short_set;
  for (int i = 0; i < 1500; ++i)
    short_set.records.emplace_back("s" + std::to_string(i), Label::Sarcastic);
  for (int i = 0; i < 2500; ++i)
    short_set.records.emplace_back("n" + std::to_string(i), Label::NonSarcastic);
  try {
    sample_generated(short_set, 2000, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("1500 < quota 2000") != std::string::npos);
    CHECK(msg.find("'sarcastic'") != std::string::npos);
  }

  testing::TempDir dir("gen");
  write_dataset(gen, dir / "gen.jsonl", FileFormat::Jsonl);
  CHECK(ingest_generated(dir / "gen.jsonl", 5, 2).size() == 10);
}
