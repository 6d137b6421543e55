#include <doctest.h>

#include <cmath>

#include "../helpers.hpp"
#include "imli/discretize.hpp"

using namespace imli;

namespace {

std::string bits(const std::vector<std::uint8_t> &v) {
  std::string s;
  for (auto b : v) s += b ? '1' : '0';
  return s;
}

}  // namespace

TEST_CASE("one-hot over three colours") {
  const std::vector<std::string> col{"red", "green", "yellow", "red"};
  auto oh = one_hot(col, true, 0, "colour");
  REQUIRE(oh.columns.size() == 6);
  std::string eq, neq;
  for (int c = 0; c < 3; ++c) eq += oh.columns[c][0] ? '1' : '0';
  for (int c = 3; c < 6; ++c) neq += oh.columns[c][0] ? '1' : '0';
  CHECK(eq == "100");
  CHECK(neq == "011");
  CHECK(oh.meta[0].kind == LiteralKind::cat_eq);
  CHECK(oh.meta[0].category == "red");
  CHECK(oh.meta[4].kind == LiteralKind::cat_neq);
  CHECK(oh.meta[4].category == "green");

  auto plain = one_hot(col, false);
  CHECK(plain.columns.size() == 3);
  auto single = one_hot({"a", "a"}, false);
  REQUIRE(single.columns.size() == 1);
  CHECK(single.columns[0] == std::vector<std::uint8_t>{1, 1});
}

TEST_CASE("quantile thresholds") {
  CHECK(pick_thresholds({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 1) == std::vector<double>{5.5});
  CHECK(pick_thresholds({4, 4, 4}, 3).empty());
  std::vector<double> uniform;
  for (int i = 0; i <= 100; ++i) uniform.push_back(i);
  auto t = pick_thresholds(uniform, 3);
  REQUIRE(t.size() == 3);
  CHECK(t[0] == doctest::Approx(25));
  CHECK(t[1] == doctest::Approx(50));
  CHECK(t[2] == doctest::Approx(75));
  // Heavy ties collapse duplicate quantiles.
  auto d = pick_thresholds({1, 1, 1, 1, 1, 1, 1, 1, 2}, 4);
  CHECK(d == std::vector<double>{1});
}

TEST_CASE("threshold binarization") {
  const std::vector<double> t{25, 50, 75};
  CHECK(bits(binarize_continuous(37.5, t)) == "100011");
  CHECK(bits(binarize_continuous(25, t)) == "100011");
  CHECK(bits(binarize_continuous(10, t)) == "000111");
  CHECK_THROWS_AS(binarize_continuous(std::nan(""), t), DataError);
}

TEST_CASE("threshold provenance and siblings") {
  auto d = testutil::csv("x,y\n0,1\n100,0\n50,1\n25,0\n75,1\n", "y", "1");
  BinarizeOptions o;
  o.thresholds = 3;
  auto enc = Binarizer::fit(d, o);
  const auto &m = enc.meta();
  REQUIRE(m.size() == 6);
  CHECK(*m[0].tval() == 25);
  CHECK(*m[0].op() == Comparison::ge);
  CHECK(*m[3].op() == Comparison::lt);
  CHECK(siblings(m[0], m[1]));
  CHECK_FALSE(siblings(m[0], m[3]));
  CHECK(siblings(m[0], m[0]));
  LiteralMeta other = m[0];
  other.source_column = 7;
  CHECK_FALSE(siblings(m[0], other));
  CHECK_FALSE(m[0].complement() == m[0]);
  CHECK(m[0].complement().kind == LiteralKind::thr_lt);
  CHECK(m[0].complement().threshold == 25);
}

TEST_CASE("iris binarizes to 32 features") {
  auto d = load_csv(testutil::data_file("iris.csv"), "species", "versicolor");
  auto b = binarize(d, 4, true);
  CHECK(b.num_features() == 32);
  CHECK(b.num_samples() == 150);
}

TEST_CASE("all-binary dataset doubles with complements") {
  auto d = testutil::csv("a,b,y\n0,1,1\n1,1,0\n1,0,1\n", "y", "1");
  CHECK(binarize(d, 4, true).num_features() == 4);
  CHECK(binarize(d, 4, false).num_features() == 2);
}

TEST_CASE("staircase and complement structure on random data") {
  Rng rng(5);
  std::string text = "u,v,c,y\n";
  const char *cats[] = {"p", "q", "r"};
  for (int i = 0; i < 200; ++i)
    text += std::to_string(rng.uniform() * 10) + "," + std::to_string(rng.below(7)) + "," +
            cats[rng.below(3)] + "," + std::to_string(rng.below(2)) + "\n";
  auto d = testutil::csv(text, "y", "1");
  auto enc = Binarizer::fit(d, {});
  auto b = enc.transform(d);
  CHECK(enc.transform(d).X == b.X);
  for (const auto &col : enc.columns()) {
    const std::size_t f = col.first_feature;
    for (std::size_t q = 0; q < b.num_samples(); ++q) {
      if (col.kind == ColumnKind::continuous) {
        const std::size_t t = col.thresholds.size();
        for (std::size_t i = 0; i < t; ++i) {
          CHECK((b.X(q, f + i) ^ b.X(q, f + t + i)) == 1);
          if (i + 1 < t) {
            CHECK(b.X(q, f + i) >= b.X(q, f + i + 1));
            CHECK(b.X(q, f + t + i) <= b.X(q, f + t + i + 1));
          }
        }
      } else if (col.kind == ColumnKind::categorical) {
        const std::size_t c = col.categories.size();
        int ones = 0;
        for (std::size_t i = 0; i < c; ++i) {
          ones += b.X(q, f + i);
          CHECK((b.X(q, f + i) ^ b.X(q, f + c + i)) == 1);
        }
        CHECK(ones == 1);
      }
    }
  }
}

TEST_CASE("constant column contributes nothing and warns") {
  auto d = testutil::csv("a,b,y\n3,1,1\n3,2,0\n3,5,1\n", "y", "1");
  auto enc = Binarizer::fit(d, {});
  CHECK(enc.warnings().size() == 1);
  CHECK(enc.columns()[0].feature_count == 0);
}

TEST_CASE("held-out rows reuse fitted thresholds") {
  auto train = testutil::csv("x,c,y\n1,a,1\n2,b,0\n3,a,1\n4,b,0\n", "y", "1");
  auto test = testutil::csv("x,c,y\n2.5,zzz,1\n9,a,0\n", "y", "1");
  auto enc = Binarizer::fit(train, {});
  auto b = enc.transform(test);
  CHECK(b.num_features() == enc.num_features());
  // An unseen category matches no eq literal and every neq literal.
  const auto &c = enc.columns()[1];
  CHECK(b.X(0, c.first_feature) == 0);
  CHECK(b.X(0, c.first_feature + 1) == 0);
  CHECK(b.X(0, c.first_feature + 2) == 1);
}

TEST_CASE("literal meta holds on raw cells") {
  LiteralMeta m;
  m.kind = LiteralKind::thr_ge;
  m.threshold = 2.5;
  CHECK(m.holds("2.5"));
  CHECK_FALSE(m.holds("2.4"));
  m.kind = LiteralKind::cat_neq;
  m.category = "red";
  CHECK(m.holds("blue"));
  CHECK_FALSE(m.holds("red"));
}
