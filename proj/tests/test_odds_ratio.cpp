#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "biaslens/odds_ratio.hpp"

using namespace biaslens;
using Catch::Approx;

namespace {

GenderedFrequencyTable make_table(Subject subject,
                                  std::vector<std::tuple<std::string, long, long>> rows) {
  GenderedFrequencyTable t;
  t.subject = subject;
  for (auto& [w, m, f] : rows) t.counts[w] = {m, f};
  return t;
}

const OddsRatioEntry* find(const std::vector<OddsRatioEntry>& entries, const std::string& w) {
  for (const auto& e : entries)
    if (e.word == w) return &e;
  return nullptr;
}

}  // namespace

TEST_CASE("frequency table aggregates per subject and gender", "[or]") {
  std::vector<EvaluationRecord> corpus;
  auto add = [&](std::string id, Gender g, Subject s) {
    EvaluationRecord r;
    r.record_id = id;
    r.prompt_id = id;
    r.gender = g;
    r.subject = s;
    r.iteration = 1;
    r.text = "x";
    corpus.push_back(r);
  };
  add("m1", Gender::Male, Subject::Engineering);
  add("m2", Gender::Male, Subject::Engineering);
  add("f1", Gender::Female, Subject::Engineering);
  add("p1", Gender::Female, Subject::Psychology);

  std::vector<AdjectiveProfile> profiles = {
      {"m1", {{"good", 1}}},
      {"m2", {{"good", 2}}},
      {"f1", {{"good", 1}}},
      {"p1", {{"good", 7}}},  // other subject: must not leak
  };
  auto table = build_frequency_table(profiles, corpus, Subject::Engineering);
  REQUIRE(table.counts.count("good") == 1);
  CHECK(table.counts["good"].male == 3);
  CHECK(table.counts["good"].female == 1);

  auto empty = build_frequency_table(profiles, corpus, Subject::Economics);
  CHECK(empty.counts.empty());

  std::vector<AdjectiveProfile> orphan = {{"zz", {{"good", 1}}}};
  CHECK_THROWS_AS(build_frequency_table(orphan, corpus, Subject::Engineering), Error);
}

TEST_CASE("odds ratio point example with leave-self-out denominators", "[or]") {
  // male {engaging:4, strict:2}, female {engaging:1, caring:5}
  auto table = make_table(Subject::Engineering,
                          {{"engaging", 4, 1}, {"strict", 2, 0}, {"caring", 0, 5}});
  auto entries = compute_odds_ratios(table);
  const auto* engaging = find(entries, "engaging");
  REQUIRE(engaging);
  // OR = (4/2) / (1/5) = 10.0, inclusive upper bound keeps it
  CHECK(engaging->odds_ratio == Approx(10.0).margin(1e-12));
  CHECK(engaging->log_odds_ratio == Approx(2.302585).margin(1e-6));
  CHECK(engaging->log_odds_ratio == Approx(std::log(engaging->odds_ratio)).margin(1e-12));
  CHECK_FALSE(engaging->filtered);

  const auto* strict_e = find(entries, "strict");
  REQUIRE(strict_e);  // female count 0 -> infinite OR
  CHECK(std::isinf(strict_e->odds_ratio));
  CHECK(strict_e->filtered);
  CHECK(strict_e->reason == FilterReason::BelowMinCount);  // total 2 < 3 screens first

  const auto* caring = find(entries, "caring");
  REQUIRE(caring);  // male count 0 -> OR 0
  CHECK(caring->odds_ratio == 0.0);
  CHECK(caring->filtered);
  CHECK(caring->reason == FilterReason::OutOfRange);
}

TEST_CASE("identical gender counts give OR 1 for every word", "[or]") {
  auto table = make_table(Subject::Psychology,
                          {{"clear", 4, 4}, {"kind", 2, 2}, {"fair", 3, 3}});
  for (const auto& e : compute_odds_ratios(table)) {
    CHECK(e.odds_ratio == Approx(1.0).margin(1e-12));
    CHECK(e.log_odds_ratio == Approx(0.0).margin(1e-12));
    CHECK_FALSE(e.filtered);
  }
}

TEST_CASE("male-only word is filtered zero_denominator", "[or]") {
  auto table = make_table(Subject::Engineering, {{"manly", 5, 0}, {"shared", 4, 4}});
  auto entries = compute_odds_ratios(table);
  const auto* manly = find(entries, "manly");
  REQUIRE(manly);
  CHECK(std::isinf(manly->odds_ratio));
  CHECK(manly->filtered);
  CHECK(manly->reason == FilterReason::ZeroDenominator);
}

TEST_CASE("single-word table is degenerate", "[or]") {
  auto table = make_table(Subject::Engineering, {{"solo", 3, 3}});
  CHECK_THROWS_AS(compute_odds_ratios(table), DomainError);
}

TEST_CASE("below-min-count filter", "[or]") {
  auto table = make_table(Subject::Engineering, {{"rare", 1, 1}, {"common", 5, 5}});
  auto entries = compute_odds_ratios(table);
  const auto* rare = find(entries, "rare");
  REQUIRE(rare);
  CHECK(rare->filtered);
  CHECK(rare->reason == FilterReason::BelowMinCount);
  const auto* common = find(entries, "common");
  REQUIRE(common);
  CHECK_FALSE(common->filtered);
}

TEST_CASE("inclusive range bounds keep OR exactly 0.1 and 10", "[or]") {
  // engineered so one word's OR lands exactly on each bound
  auto table = make_table(Subject::Engineering,
                          {{"hi", 4, 1}, {"lo", 1, 4}, {"pad", 1, 1}});
  auto entries = compute_odds_ratios(table, /*min_count=*/2);
  const auto* hi = find(entries, "hi");
  const auto* lo = find(entries, "lo");
  REQUIRE(hi);
  REQUIRE(lo);
  CHECK(hi->odds_ratio == Approx(10.0).margin(1e-12));
  CHECK_FALSE(hi->filtered);
  CHECK(lo->odds_ratio == Approx(0.1).margin(1e-12));
  CHECK_FALSE(lo->filtered);
}

TEST_CASE("select_salient splits by sign with lexicographic tie-break", "[or]") {
  std::vector<OddsRatioEntry> entries;
  auto add = [&](std::string w, double logor) {
    OddsRatioEntry e;
    e.word = std::move(w);
    e.subject = Subject::Engineering;
    e.odds_ratio = std::exp(logor);
    e.log_odds_ratio = logor;
    entries.push_back(e);
  };
  // 25 distinct log ORs spread over both signs
  for (int i = 0; i < 13; ++i) add("m" + std::string(1, char('a' + i)), 0.1 * (i + 1));
  for (int i = 0; i < 12; ++i) add("f" + std::string(1, char('a' + i)), -0.1 * (i + 1));

  auto set = select_salient(entries, 10);
  REQUIRE(set.male_salient.size() == 10);
  REQUIRE(set.female_salient.size() == 10);
  CHECK(set.male_salient.front().word == "mm");  // log OR 1.3, the largest
  CHECK(set.male_salient.front().log_odds_ratio == Approx(1.3));
  CHECK(set.female_salient.front().word == "fl");  // log OR -1.2, the smallest
  for (size_t i = 1; i < set.male_salient.size(); ++i)
    CHECK(set.male_salient[i - 1].log_odds_ratio >= set.male_salient[i].log_odds_ratio);
  for (size_t i = 1; i < set.female_salient.size(); ++i)
    CHECK(set.female_salient[i - 1].log_odds_ratio <= set.female_salient[i].log_odds_ratio);
  for (const auto& sw : set.male_salient) CHECK(sw.log_odds_ratio > 0.0);
  for (const auto& sw : set.female_salient) CHECK(sw.log_odds_ratio < 0.0);

  SECTION("tie on the k-th boundary keeps the lexicographically smaller word") {
    add("zz", 0.05);
    add("aa", 0.05);  // tied at the boundary for the 10th male slot
    auto set2 = select_salient(entries, 10);
    bool has_aa = false, has_zz = false;
    for (const auto& sw : set2.male_salient) {
      has_aa |= sw.word == "aa";
      has_zz |= sw.word == "zz";
    }
    // 13 positive entries before the tie; 15 candidates for 10 slots, both
    // tied words compete for the last slot
    CHECK_FALSE(has_aa);
    CHECK_FALSE(has_zz);
    // explicit boundary construction: 9 strong positives + two tied at 0.5
    std::vector<OddsRatioEntry> tied;
    for (int i = 0; i < 9; ++i) {
      OddsRatioEntry e;
      e.word = "w" + std::to_string(i);
      e.subject = Subject::Engineering;
      e.log_odds_ratio = 2.0 - 0.1 * i;
      e.odds_ratio = std::exp(e.log_odds_ratio);
      tied.push_back(e);
    }
    for (std::string w : {"beta", "alpha"}) {
      OddsRatioEntry e;
      e.word = w;
      e.subject = Subject::Engineering;
      e.log_odds_ratio = 0.5;
      e.odds_ratio = std::exp(0.5);
      tied.push_back(e);
    }
    auto set3 = select_salient(tied, 10);
    REQUIRE(set3.male_salient.size() == 10);
    CHECK(set3.male_salient.back().word == "alpha");
  }

  SECTION("filtered entries are never salient") {
    entries.front().filtered = true;
    entries.front().reason = FilterReason::OutOfRange;
    auto set2 = select_salient(entries, 25);
    for (const auto& sw : set2.male_salient) CHECK(sw.word != entries.front().word);
  }

  SECTION("words at log OR exactly zero lean to neither list") {
    add("neutral", 0.0);
    auto set2 = select_salient(entries, 25);
    for (const auto& sw : set2.male_salient) CHECK(sw.word != "neutral");
    for (const auto& sw : set2.female_salient) CHECK(sw.word != "neutral");
  }
}

TEST_CASE("scarce candidates yield shorter lists", "[or]") {
  std::vector<OddsRatioEntry> entries;
  for (int i = 0; i < 3; ++i) {
    OddsRatioEntry e;
    e.word = "p" + std::to_string(i);
    e.subject = Subject::Education;
    e.log_odds_ratio = 0.2 * (i + 1);
    e.odds_ratio = std::exp(e.log_odds_ratio);
    entries.push_back(e);
  }
  auto set = select_salient(entries, 10);
  CHECK(set.male_salient.size() == 3);
  CHECK(set.female_salient.empty());
}

// --- properties --------------------------------------------------------------

namespace {

GenderedFrequencyTable random_table(std::mt19937& rng) {
  static const char* kWords[] = {"kind",  "clear",   "warm",  "fair",   "strict", "funny",
                                 "sharp", "helpful", "droll", "brisk",  "calm",   "direct",
                                 "deep",  "keen",    "blunt", "gentle"};
  std::uniform_int_distribution<int> n_words(2, 16);
  std::uniform_int_distribution<long> count(0, 9);
  GenderedFrequencyTable t;
  t.subject = Subject::Engineering;
  int n = n_words(rng);
  for (int i = 0; i < n; ++i) t.counts[kWords[i]] = {count(rng), count(rng)};
  return t;
}

GenderedFrequencyTable swap_genders(const GenderedFrequencyTable& t) {
  GenderedFrequencyTable s;
  s.subject = t.subject;
  for (const auto& [w, c] : t.counts) s.counts[w] = {c.female, c.male};
  return s;
}

}  // namespace

TEST_CASE("reciprocity under gender swap, leave-self-out and filter soundness", "[or][property]") {
  std::mt19937 rng(77123);
  for (int trial = 0; trial < 500; ++trial) {
    auto table = random_table(rng);
    long total_m = 0, total_f = 0;
    for (const auto& [w, c] : table.counts) {
      total_m += c.male;
      total_f += c.female;
    }

    auto entries = compute_odds_ratios(table);
    auto swapped = compute_odds_ratios(swap_genders(table));
    REQUIRE(entries.size() == swapped.size());

    for (size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      const auto& s = swapped[i];
      REQUIRE(e.word == s.word);

      // leave-self-out: denominators are grand total minus own count
      if (!e.filtered) {
        double den_m = double(total_m - e.count_male);
        double den_f = double(total_f - e.count_female);
        double direct = (double(e.count_male) / den_m) / (double(e.count_female) / den_f);
        CHECK(e.odds_ratio == Approx(direct).margin(1e-12));
        CHECK(e.count_male + e.count_female >= 3);
        CHECK(e.odds_ratio >= 0.1);
        CHECK(e.odds_ratio <= 10.0);
        CHECK(e.log_odds_ratio == Approx(std::log(e.odds_ratio)).margin(1e-12));
      }

      // reciprocity: finite nonzero ORs map to their reciprocals
      if (std::isfinite(e.odds_ratio) && e.odds_ratio > 0.0) {
        CHECK(s.odds_ratio == Approx(1.0 / e.odds_ratio).epsilon(1e-9));
        CHECK(s.log_odds_ratio == Approx(-e.log_odds_ratio).margin(1e-9));
      }
    }

    // salient lists swap roles
    auto set = select_salient(entries);
    auto set_swapped = select_salient(swapped);
    REQUIRE(set.male_salient.size() == set_swapped.female_salient.size());
    REQUIRE(set.female_salient.size() == set_swapped.male_salient.size());
    for (size_t i = 0; i < set.male_salient.size(); ++i) {
      CHECK(set.male_salient[i].word == set_swapped.female_salient[i].word);
      CHECK(set.male_salient[i].log_odds_ratio ==
            Approx(-set_swapped.female_salient[i].log_odds_ratio).margin(1e-9));
    }
  }
}

TEST_CASE("doubling every document leaves ORs unchanged", "[or][property]") {
  std::mt19937 rng(99001);
  for (int trial = 0; trial < 100; ++trial) {
    auto table = random_table(rng);
    GenderedFrequencyTable doubled;
    doubled.subject = table.subject;
    for (const auto& [w, c] : table.counts) doubled.counts[w] = {2 * c.male, 2 * c.female};

    auto base = compute_odds_ratios(table);
    auto twice = compute_odds_ratios(doubled);
    REQUIRE(base.size() == twice.size());
    for (size_t i = 0; i < base.size(); ++i) {
      if (std::isfinite(base[i].odds_ratio) && std::isfinite(twice[i].odds_ratio) &&
          base[i].odds_ratio > 0.0)
        CHECK(twice[i].odds_ratio == Approx(base[i].odds_ratio).epsilon(1e-9));
      CHECK(twice[i].count_male == 2 * base[i].count_male);
      CHECK(twice[i].count_female == 2 * base[i].count_female);
    }
  }
}
