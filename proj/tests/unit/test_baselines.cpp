#include <gtest/gtest.h>

#include "vulnlib/baselines.hpp"
#include "vulnlib/log.hpp"

using namespace vulnlib;

namespace {

std::map<LabelId, Label> universe_of(std::initializer_list<const char*> ids) {
  std::map<LabelId, Label> u;
  for (const char* id : ids) u.emplace(id, make_label(id));
  return u;
}

}  // namespace

TEST(ExactMatch, CountsOccurrences) {
  auto u = universe_of({"poppler", "evince", "okular"});
  EXPECT_EQ(baseline_exact_match("poppler poppler evince", u, 3),
            (std::vector<LabelId>{"poppler", "evince"}));
  EXPECT_TRUE(baseline_exact_match("nothing here", u, 3).empty());
}

TEST(ExactMatch, WordBoundariesAndTies) {
  auto u = universe_of({"ssl", "openssl", "zlib@1.2", "zlib@1.3"});
  auto out = baseline_exact_match("openssl and zlib", u, 3);
  EXPECT_EQ(out, (std::vector<LabelId>{"openssl", "zlib@1.2", "zlib@1.3"}));
}

TEST(Cpe, FieldExtraction) {
  VulnerabilityReport r;
  r.cpe_entries = {"cpe:2.3:a:poppler:poppler:0.70.0:*:*:*:*:*:*:*",
                   "cpe:2.3:a:freedesktop:poppler:*:*:*:*:*:*:*:*",
                   "cpe:2.3:a:gnome:evince:-:*:*:*:*:*:*:*"};
  EXPECT_EQ(baseline_cpe(r, 10), (std::vector<LabelId>{"poppler", "poppler@0.70.0", "evince"}));
  EXPECT_EQ(baseline_cpe(r, 1), std::vector<LabelId>{"poppler"});
}

TEST(Cpe, ProductUnderscores) {
  VulnerabilityReport r;
  r.cpe_entries = {"cpe:2.3:a:x:image_magick:*:*:*:*:*:*:*:*"};
  EXPECT_EQ(baseline_cpe(r, 3), std::vector<LabelId>{"image_magick"});
}

TEST(Cpe, MalformedSkippedWithWarning) {
  VulnerabilityReport r;
  r.cpe_entries = {"cpe:/a:vendor", "cpe:2.3:a:v:good:1:*:*:*:*:*:*:*"};
  log::ScopedCapture capture;
  EXPECT_EQ(baseline_cpe(r, 3), (std::vector<LabelId>{"good", "good@1"}));
  EXPECT_EQ(capture.messages().size(), 1u);
}

TEST(Ir, IdenticalTextRanksFirst) {
  EnhanceConfig cfg;
  std::vector<std::pair<LabelId, std::string>> labels{
      {"poppler", matching_text("poppler pdf render", cfg)},
      {"libxml", matching_text("libxml xml parser", cfg)}};
  IrBaseline ir({"poppler crash", "xml parser overflow"}, labels);
  auto out = ir.rank(labels[1].second, 2);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].first, "libxml");
  EXPECT_NEAR(out[0].second, 1.0, 1e-12);
}

TEST(Ir, NoSharedTermsLexicographic) {
  std::vector<std::pair<LabelId, std::string>> labels{{"b", "beta"}, {"a", "alpha"}, {"c", "gamma"}};
  IrBaseline ir({"delta"}, labels);
  auto out = ir.rank("delta epsilon", 3);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].first, "a");
  EXPECT_EQ(out[1].first, "b");
  EXPECT_EQ(out[2].first, "c");
  for (const auto& [id, s] : out) EXPECT_EQ(s, 0.0);
}
