#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "biaslens/embedding.hpp"
#include "biaslens/weat.hpp"

using namespace biaslens;
using Catch::Approx;

namespace {

EmbeddingStore make_store(int dim,
                          std::vector<std::pair<std::string, std::vector<double>>> entries) {
  EmbeddingStore s;
  s.dimension = dim;
  for (auto& [w, v] : entries) s.vectors[w] = v;
  return s;
}

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("embedding loader parses the fixture format", "[weat]") {
  auto path = write_temp("bl_emb_basic.txt",
                         "good 1 0 0 0\n"
                         "bad 0 1 0 0\n"
                         "ugly 0 0 1 0\n");
  auto store = load_embeddings(path.string());
  CHECK(store.dimension == 4);
  CHECK(store.vectors.size() == 3);
  REQUIRE(store.find("good"));
  CHECK((*store.find("good"))[0] == 1.0);
}

TEST_CASE("embedding loader rejects inconsistent dimensions with the line number", "[weat]") {
  auto path = write_temp("bl_emb_dim.txt",
                         "good 1 0 0 0\n"
                         "bad 0 1 0\n");
  try {
    load_embeddings(path.string());
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("embedding loader applies the vocabulary filter", "[weat]") {
  auto path = write_temp("bl_emb_filter.txt",
                         "good 1 0\n"
                         "bad 0 1\n"
                         "ugly 1 1\n");
  auto store = load_embeddings(path.string(), std::set<std::string>{"good"});
  CHECK(store.vectors.size() == 1);
  CHECK(store.find("good"));
  CHECK_FALSE(store.find("bad"));
}

TEST_CASE("embedding loader errors on empty input", "[weat]") {
  auto path = write_temp("bl_emb_empty.txt", "");
  CHECK_THROWS_AS(load_embeddings(path.string()), ParseError);
}

TEST_CASE("gzip-compressed embedding files load transparently", "[weat]") {
  // gzip bytes for "good 1 0\nbad 0 1\n", generated once with gzip
  static const unsigned char kGz[] = {
      0x1f, 0x8b, 0x08, 0x00, 0x00, 0x00, 0x00, 0x00, 0x02, 0xff, 0x4b, 0xcf,
      0xcf, 0x4f, 0x51, 0x30, 0x54, 0x30, 0xe0, 0x4a, 0x4a, 0x4c, 0x51, 0x30,
      0x50, 0x30, 0xe4, 0x02, 0x00, 0xd4, 0xd2, 0x02, 0xea, 0x11, 0x00, 0x00,
      0x00};
  auto path = std::filesystem::temp_directory_path() / "bl_emb.txt.gz";
  {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(kGz), sizeof(kGz));
  }
  auto store = load_embeddings(path.string());
  CHECK(store.dimension == 2);
  CHECK(store.vectors.size() == 2);
  REQUIRE(store.find("bad"));
  CHECK((*store.find("bad"))[1] == 1.0);
}

TEST_CASE("cosine basics", "[weat]") {
  std::vector<double> v = {0.3f, -1.2f, 2.5f};
  CHECK(cosine(v, v) == Approx(1.0).margin(1e-12));
  std::vector<double> e1 = {1, 0}, e2 = {0, 1};
  CHECK(cosine(e1, e2) == Approx(0.0).margin(1e-12));
  std::vector<double> d = {1, 1};
  CHECK(cosine(d, e1) == Approx(1.0 / std::sqrt(2.0)).margin(1e-9));
  std::vector<double> zero = {0, 0};
  CHECK_THROWS_AS(cosine(zero, e1), DomainError);
  std::vector<double> mismatched = {1, 2, 3};
  CHECK_THROWS_AS(cosine(mismatched, e1), DomainError);
}

TEST_CASE("weat_word hand examples", "[weat]") {
  auto store = make_store(2, {{"w", {1, 0}}, {"a1", {1, 0}}, {"b1", {0, 1}}});
  auto s = weat_word("w", {"a1"}, {"b1"}, store);
  REQUIRE(s.has_value());
  CHECK(*s == Approx(1.0).margin(1e-12));

  SECTION("A == B gives zero for every word") {
    auto z = weat_word("w", {"a1", "b1"}, {"a1", "b1"}, store);
    REQUIRE(z.has_value());
    CHECK(*z == Approx(0.0).margin(1e-12));
  }

  SECTION("2-d fixture with a two-word attribute set") {
    auto st = make_store(2, {{"w", {1, 1}}, {"a1", {1, 0}}, {"a2", {0, 1}}, {"b1", {-1, 0}}});
    auto v = weat_word("w", {"a1", "a2"}, {"b1"}, st);
    REQUIRE(v.has_value());
    // (0.7071 + 0.7071)/2 - (-0.7071) = 1.41421...
    CHECK(*v == Approx(std::sqrt(2.0)).margin(1e-4));
  }

  SECTION("missing target word is a skip signal") {
    CHECK_FALSE(weat_word("absent", {"a1"}, {"b1"}, store).has_value());
  }

  SECTION("attribute set entirely missing is a configuration error") {
    CHECK_THROWS_AS(weat_word("w", {"nope1", "nope2"}, {"b1"}, store), ConfigError);
  }
}

TEST_CASE("weat 2-d hand-computed example equals 2 exactly", "[weat]") {
  auto store = make_store(2, {{"x1", {1, 0}}, {"y1", {0, 1}}, {"a1", {1, 0}}, {"b1", {0, 1}}});
  WordSetPair ab{"ab", {"a1"}, {"b1"}};
  auto r = weat({"x1"}, {"y1"}, ab, store);
  CHECK(r.statistic == Approx(2.0).margin(1e-12));
  CHECK_FALSE(r.invalid);
  CHECK(r.skipped_words.empty());
  CHECK(r.per_word.at("x1") == Approx(1.0).margin(1e-12));
  CHECK(r.per_word.at("y1") == Approx(-1.0).margin(1e-12));
}

TEST_CASE("weat degenerate target/attribute identities", "[weat]") {
  auto store = make_store(3, {{"p", {1, 0, 1}},
                              {"q", {0, 1, 1}},
                              {"a", {1, 2, 0}},
                              {"b", {-1, 0, 2}}});
  WordSetPair ab{"ab", {"a"}, {"b"}};
  auto same_targets = weat({"p", "q"}, {"p", "q"}, ab, store);
  CHECK(same_targets.statistic == Approx(0.0).margin(1e-12));

  WordSetPair aa{"aa", {"a"}, {"a"}};
  CHECK_THROWS_AS(aa.validate(), ConfigError);  // disjointness invariant
  // equal-but-distinct attribute sets cancel too
  auto store2 = make_store(3, {{"p", {1, 0, 1}}, {"q", {0, 1, 1}},
                               {"a", {1, 2, 0}}, {"a2", {1, 2, 0}}});
  WordSetPair mirrored{"mirrored", {"a"}, {"a2"}};
  auto r = weat({"p"}, {"q"}, mirrored, store2);
  CHECK(r.statistic == Approx(0.0).margin(1e-12));
}

TEST_CASE("weat skips OOV targets and flags majority-missing sets", "[weat]") {
  auto store = make_store(2, {{"x1", {1, 0}}, {"y1", {0, 1}}, {"a", {1, 1}}, {"b", {1, -1}}});
  WordSetPair ab{"ab", {"a"}, {"b"}};
  auto r = weat({"x1", "gone1", "gone2"}, {"y1"}, ab, store);
  CHECK(r.invalid);  // 2 of 3 X words missing
  REQUIRE(r.skipped_words.size() == 2);
  CHECK(r.per_word.count("x1") == 1);
  CHECK(r.per_word.count("gone1") == 0);

  CHECK_THROWS_AS(weat({"gone"}, {"y1"}, ab, store), ConfigError);
  CHECK_THROWS_AS(weat({"x1"}, {"gone"}, ab, store), ConfigError);
}

TEST_CASE("hyphenated salient words fall back to the dehyphenated form", "[weat]") {
  auto store = make_store(2, {{"thoughtprovoking", {1, 0}}, {"y", {0, 1}},
                              {"a", {1, 1}}, {"b", {1, -1}}});
  WordSetPair ab{"ab", {"a"}, {"b"}};
  auto r = weat({"thought-provoking"}, {"y"}, ab, store);
  CHECK(r.skipped_words.empty());
  CHECK(r.per_word.count("thought-provoking") == 1);
}

TEST_CASE("default word sets match the published table verbatim", "[weat]") {
  auto names = default_name_sets();
  auto career = default_career_family_sets();
  CHECK(names.set_a == std::vector<std::string>{"john", "paul", "mike", "kevin", "steve", "greg",
                                                "jeff", "bill"});
  CHECK(names.set_b == std::vector<std::string>{"amy", "joan", "lisa", "sarah", "diana", "kate",
                                                "ann", "donna"});
  CHECK(career.set_a == std::vector<std::string>{"executive", "management", "professional",
                                                 "corporation", "salary", "office", "business",
                                                 "career"});
  CHECK(career.set_b == std::vector<std::string>{"home", "parents", "children", "family",
                                                 "cousins", "marriage", "wedding", "relatives"});
  CHECK(names.set_a.size() + names.set_b.size() + career.set_a.size() + career.set_b.size() == 32);
  CHECK_NOTHROW(names.validate());
  CHECK_NOTHROW(career.validate());
}

// --- property tests over random fixtures ------------------------------------

namespace {

EmbeddingStore random_store(std::mt19937& rng, int dim, const std::vector<std::string>& words) {
  std::uniform_real_distribution<double> comp(-1.0, 1.0);
  EmbeddingStore s;
  s.dimension = dim;
  for (const auto& w : words) {
    std::vector<double> v(static_cast<size_t>(dim));
    double norm = 0;
    do {
      norm = 0;
      for (auto& x : v) {
        x = comp(rng);
        norm += x * x;
      }
    } while (norm < 1e-4);  // avoid near-zero vectors
    s.vectors[w] = v;
  }
  return s;
}

}  // namespace

TEST_CASE("weat identities on random embedding fixtures", "[weat][property]") {
  std::mt19937 rng(424242);
  std::uniform_int_distribution<int> dim_dist(2, 8);
  std::uniform_int_distribution<int> size_dist(1, 5);
  for (int trial = 0; trial < 200; ++trial) {
    int dim = dim_dist(rng);
    int nx = size_dist(rng), ny = size_dist(rng), na = size_dist(rng), nb = size_dist(rng);
    std::vector<std::string> X, Y, A, B, all;
    for (int i = 0; i < nx; ++i) X.push_back("x" + std::to_string(i));
    for (int i = 0; i < ny; ++i) Y.push_back("y" + std::to_string(i));
    for (int i = 0; i < na; ++i) A.push_back("a" + std::to_string(i));
    for (int i = 0; i < nb; ++i) B.push_back("b" + std::to_string(i));
    for (const auto* set : {&X, &Y, &A, &B}) all.insert(all.end(), set->begin(), set->end());
    auto store = random_store(rng, dim, all);

    WordSetPair ab{"ab", A, B};
    WordSetPair ba{"ba", B, A};
    double s_xyab = weat(X, Y, ab, store).statistic;

    // antisymmetry in targets
    CHECK(weat(Y, X, ab, store).statistic == Approx(-s_xyab).margin(1e-10));
    // antisymmetry in attributes
    CHECK(weat(X, Y, ba, store).statistic == Approx(-s_xyab).margin(1e-10));
    // zero when X == Y
    CHECK(weat(X, X, ab, store).statistic == Approx(0.0).margin(1e-10));

    // positive scaling of a single stored vector changes nothing
    auto scaled = store;
    scaled.vectors[X[0]] = store.vectors.at(X[0]);
    for (auto& c : scaled.vectors[X[0]]) c *= 7.5;
    CHECK(weat(X, Y, ab, scaled).statistic == Approx(s_xyab).margin(1e-10));

    // role swap keeps the sign when |X| == |Y| and |A| == |B|
    if (nx == ny && na == nb && s_xyab != 0.0) {
      WordSetPair xy{"xy", X, Y};
      double s_abxy = weat(A, B, xy, store).statistic;
      CHECK(s_xyab * s_abxy >= 0.0);
      // the two differ by the positive factor |X|/|A|
      CHECK(s_abxy * double(nx) == Approx(s_xyab * double(na)).margin(1e-8));
    }
  }
}
