#include <gtest/gtest.h>

#include <random>
#include <regex>

#include "vulnlib/enhance.hpp"
#include "vulnlib/error.hpp"

using namespace vulnlib;

namespace {

bool contains_run(const std::string& text, const std::string& run) {
  return text.find(run) != std::string::npos;
}

VulnerabilityReport with_refs(std::vector<std::string> urls) {
  VulnerabilityReport r;
  r.id = "R";
  for (auto& u : urls) {
    ReferenceDoc doc;
    doc.url = u;
    doc.domain = url_domain(u).value_or("");
    doc.text = "body";
    r.references.push_back(doc);
  }
  return r;
}

}  // namespace

TEST(SelectReferences, Allowlist) {
  EnhanceConfig cfg;
  auto kept = select_references(with_refs({"https://access.redhat.com/x", "https://example.org/y"}), cfg);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].domain, "access.redhat.com");
  cfg.domain_allowlist.clear();
  EXPECT_TRUE(select_references(with_refs({"https://access.redhat.com/x"}), cfg).empty());
}

TEST(SelectReferences, SubdomainMatches) {
  std::set<std::string> allow{"github.com"};
  EXPECT_TRUE(domain_allowed("github.com", allow));
  EXPECT_TRUE(domain_allowed("gist.github.com", allow));
  EXPECT_FALSE(domain_allowed("notgithub.com", allow));
}

TEST(CleanText, Examples) {
  EXPECT_EQ(clean_text("OpenSSL 1.0.2 heap overflow"), (TokenList{"open", "heap", "overflow"}));
  EXPECT_TRUE(clean_text("").empty());
  EXPECT_EQ(clean_text("aa"), TokenList{"aa"});
  EXPECT_TRUE(clean_text("a B 12").empty());
}

TEST(CleanText, TokensMatchRegexOnRandomInput) {
  std::mt19937 rng(3);
  const std::string alphabet = "abcXYZ019 .-_";
  std::regex re("[a-zA-Z][a-z]+");
  for (int t = 0; t < 300; ++t) {
    std::string s;
    for (int i = 0; i < 30; ++i) s += alphabet[rng() % alphabet.size()];
    std::vector<std::string> want;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it) {
      std::string m = it->str();
      for (auto& c : m) c = static_cast<char>(std::tolower(c));
      want.push_back(m);
    }
    EXPECT_EQ(clean_text(s), want) << s;
  }
}

TEST(StemAndFilter, Examples) {
  EnhanceConfig cfg;
  cfg.stopwords = {"the"};
  EXPECT_EQ(stem_and_filter({"overflows", "the", "buffer"}, cfg), (TokenList{"overflow", "buffer"}));
  EXPECT_TRUE(stem_and_filter({}, cfg).empty());
  EXPECT_TRUE(stem_and_filter({"the", "the"}, cfg).empty());
}

TEST(Prune, TopWordCut) {
  EnhanceConfig cfg;
  cfg.top_word_cut_percent = 50;
  cfg.per_reference_cap = kNoReferenceCap;
  TokenList ref(10, "a");
  ref.push_back("b");
  auto out = prune_reference_tokens({ref}, cfg);
  EXPECT_EQ(out[0], TokenList{"b"});
}

TEST(Prune, PerReferenceCap) {
  EnhanceConfig cfg;
  cfg.top_word_cut_percent = 0;
  cfg.per_reference_cap = 15;
  TokenList noisy(16, "patch");
  noisy.push_back("poppler");
  TokenList other{"patch", "poppler"};
  auto out = prune_reference_tokens({noisy, other}, cfg);
  EXPECT_EQ(out[0], TokenList{"poppler"});
  EXPECT_EQ(out[1], other);
}

TEST(Prune, IdentityConfiguration) {
  EnhanceConfig cfg;
  cfg.top_word_cut_percent = 0;
  cfg.per_reference_cap = kNoReferenceCap;
  std::vector<TokenList> refs{{"a", "a", "b"}, {}, {"c"}};
  EXPECT_EQ(prune_reference_tokens(refs, cfg), refs);
}

TEST(Prune, TiesAreDeterministic) {
  // four distinct words with equal counts; 50% removes two of them
  auto p = ReferencePruner::fit({{"d", "c", "b", "a"}}, 50.0, kNoReferenceCap);
  EXPECT_EQ(p.removed_words().size(), 2u);
  auto q = ReferencePruner::fit({{"a", "b", "c", "d"}}, 50.0, kNoReferenceCap);
  EXPECT_EQ(p.removed_words(), q.removed_words());
}

TEST(Merge, Examples) {
  EXPECT_EQ(merge_description({{"evince"}}, {"poppler", "overflow"}), "poppler overflow evince");
  EXPECT_EQ(merge_description({}, {"poppler"}), "poppler");
  EXPECT_EQ(merge_description({{"evince", "okular"}}, {}), "evince okular");
}

TEST(Subwords, DelimiterSplit) {
  Label l = make_label("org.apache.tika");
  EXPECT_EQ(split_label_subwords(l, SubwordDictionary{}), "org.apache.tika org apache tika");
}

TEST(Subwords, DictionarySplit) {
  SubwordDictionary dict({"py", "openssl"});
  std::string text = split_label_subwords(make_label("pyopenssl"), dict);
  EXPECT_TRUE(text.rfind("pyopenssl", 0) == 0);
  EXPECT_TRUE(contains_run(text, "py openssl"));

  SubwordDictionary dict2({"org", "spring", "framework"});
  EXPECT_TRUE(contains_run(split_label_subwords(make_label("org.springframework"), dict2),
                           "spring framework"));
}

TEST(Subwords, DictionaryFromUniverse) {
  std::map<LabelId, Label> universe;
  for (const char* id : {"spring-core", "jackson-databind", "springdata"})
    universe.emplace(id, make_label(id));
  SubwordDictionary dict = SubwordDictionary::build(universe);
  EXPECT_TRUE(dict.words().count("spring"));
  EXPECT_TRUE(dict.words().count("databind"));
  EXPECT_EQ(dict.split("springdata").front(), "spring");
  EXPECT_EQ(dict.split("zzz"), TokenList{"zzz"});
}

TEST(Subwords, CamelCase) {
  EXPECT_EQ(split_camel_case("ImageMagick"), (TokenList{"image", "magick"}));
  EXPECT_EQ(split_on_delimiters("lib-foo_bar2"), (TokenList{"lib", "foo", "bar", "2"}));
}

TEST(Subwords, VersionNotInFeatureText) {
  SubwordDictionary dict;
  EXPECT_EQ(split_label_subwords(make_label("poppler@0.70.0"), dict),
            split_label_subwords(make_label("poppler"), dict));
  EXPECT_EQ(plain_label_text(make_label("poppler@0.70.0")), "poppler");
}

TEST(Enhancer, NeverPrunesDescriptions) {
  Dataset train;
  VulnerabilityReport r = with_refs({"https://github.com/x"});
  r.description = "overflow overflow overflow in poppler";
  r.references[0].text = "overflow poppler";
  train.reports.push_back(r);
  EnhanceConfig cfg;
  cfg.top_word_cut_percent = 100;
  cfg.description_common_cut = 1.0;
  Enhancer e = Enhancer::fit(train, {}, cfg);
  EXPECT_TRUE(e.reference_tokens(r)[0].empty());
  EXPECT_EQ(e.description_tokens(r).size(), 4u);
}

TEST(Enhancer, JsonRoundTrip) {
  Dataset train;
  VulnerabilityReport r = with_refs({"https://github.com/x", "https://example.org/y"});
  r.description = "A heap overflow in libfoo";
  r.references[0].text = "libfoo patch patch release";
  train.reports.push_back(r);
  std::map<LabelId, Label> universe{{"libfoo", make_label("libfoo")}, {"foo-bar", make_label("foo-bar")}};
  Enhancer e = Enhancer::fit(train, universe, EnhanceConfig{});
  Enhancer back = Enhancer::from_json(e.to_json());
  EXPECT_EQ(back.to_json(), e.to_json());
  EXPECT_EQ(back.enhanced_text(r), e.enhanced_text(r));
  EXPECT_EQ(back.label_text(universe.at("libfoo")), e.label_text(universe.at("libfoo")));
}

TEST(Enhancer, DisabledDropsReferencesAndSubwords) {
  Dataset train;
  VulnerabilityReport r = with_refs({"https://github.com/x"});
  r.description = "overflow in component";
  r.references[0].text = "springframework bug";
  train.reports.push_back(r);
  std::map<LabelId, Label> universe{{"spring-core", make_label("spring-core")}};
  Enhancer e = Enhancer::fit(train, universe, EnhanceConfig{}, false);
  EXPECT_FALSE(contains_run(e.enhanced_text(r), "springframework"));
  EXPECT_EQ(e.label_text(universe.at("spring-core")), "spring-core");
}

TEST(EnhanceConfig, Validation) {
  EnhanceConfig cfg;
  cfg.top_word_cut_percent = 101;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.per_reference_cap = 0;
  EXPECT_THROW(cfg.validate(), Error);
}
