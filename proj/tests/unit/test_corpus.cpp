#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "vulnlib/corpus.hpp"
#include "vulnlib/error.hpp"
#include "vulnlib/log.hpp"

using namespace vulnlib;

namespace {

std::string line(const std::string& id, const std::string& date, const std::string& labels) {
  return R"({"id":")" + id + R"(","published":")" + date +
         R"(","description":"d","references":[],"labels":[)" + labels + "]}\n";
}

Dataset dated(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string text;
  for (const auto& [id, date] : rows) text += line(id, date, R"("lib")");
  return parse_dataset(text, LoadMode::kLabeled);
}

}  // namespace

TEST(Date, ParseAndFormat) {
  auto d = Date::parse("2017-03-09T12:00:00Z");
  ASSERT_TRUE(d);
  EXPECT_EQ(d->to_string(), "2017-03-09");
  EXPECT_FALSE(Date::parse("2017-02-30"));
  EXPECT_FALSE(Date::parse("17-1-1"));
  EXPECT_TRUE(Date::parse("2016-02-29"));
  EXPECT_FALSE(Date::parse("2015-02-29"));
}

TEST(Date, SerialRoundTrip) {
  for (std::int64_t s = -800; s < 30000; s += 37) EXPECT_EQ(Date::from_serial(s).serial(), s);
  EXPECT_EQ((Date{1970, 1, 1}.serial()), 0);
  EXPECT_EQ((Date{2000, 3, 1}.serial()), 11017);
}

TEST(Url, Domain) {
  EXPECT_EQ(url_domain("https://www.GitHub.com/a/b"), "github.com");
  EXPECT_EQ(url_domain("http://lists.debian.org:80/x"), "lists.debian.org");
  EXPECT_FALSE(url_domain("not a url"));
  EXPECT_FALSE(url_domain("https:///path"));
}

TEST(Labels, Canonical) {
  EXPECT_EQ(canonical_label_id("  Foo   Bar@1.0 "), "foo_bar@1.0");
  EXPECT_EQ(canonical_label_id("poppler"), "poppler");
  EXPECT_THROW(canonical_label_id("@1.0"), Error);
  Label l = make_label("Lib@2.0");
  EXPECT_EQ(l.name, "lib");
  EXPECT_EQ(l.version, "2.0");
  EXPECT_FALSE(make_label("lib").version);
}

TEST(Load, ThreeValidLines) {
  std::string text = line("C-2", "2015-01-02", R"("b")") + line("C-1", "2015-01-01", R"("a@1.0")") +
                     line("C-3", "2015-01-03", R"("c")");
  Dataset d = parse_dataset(text, LoadMode::kLabeled);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d.reports[0].id, "C-1");
  EXPECT_EQ(d.reports[2].id, "C-3");
  EXPECT_TRUE(d.labels.count("a@1.0"));
  EXPECT_TRUE(d.labels.count("b"));
}

TEST(Load, DuplicateIdNamesTheId) {
  std::string text = line("CVE-1", "2015-01-01", R"("a")") + line("CVE-1", "2015-01-02", R"("b")");
  try {
    parse_dataset(text, LoadMode::kLabeled);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("CVE-1"), std::string::npos);
  }
}

TEST(Load, LabeledModeRequiresLabels) {
  std::string text = line("A", "2015-01-01", "");
  EXPECT_THROW(parse_dataset(text, LoadMode::kLabeled), Error);
  EXPECT_EQ(parse_dataset(text, LoadMode::kUnlabeled).size(), 1u);
}

TEST(Load, MalformedLineIsParseError) {
  try {
    parse_dataset("{nope\n", LoadMode::kLabeled);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
  }
}

TEST(Load, WriteReadRoundTrip) {
  std::string text = line("A", "2015-01-01", R"("x@1","y")") + line("B", "2016-05-06", R"("x@2")");
  Dataset d = parse_dataset(text, LoadMode::kLabeled);
  Dataset again = parse_dataset(dataset_to_jsonl(d), LoadMode::kLabeled);
  EXPECT_EQ(dataset_to_jsonl(again), dataset_to_jsonl(d));
  EXPECT_EQ(again.labels.size(), 3u);
}

TEST(Load, UniverseFileMerged) {
  auto dir = std::filesystem::temp_directory_path() / "vulnlib_corpus_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "d.jsonl") << line("A", "2015-01-01", R"("x")");
    std::ofstream(dir / "u.txt") << "x\nnever_seen@3.1\n";
  }
  Dataset d = load_dataset(dir / "d.jsonl", LoadMode::kLabeled, dir / "u.txt");
  EXPECT_TRUE(d.labels.count("never_seen@3.1"));
  EXPECT_THROW(load_dataset(dir / "missing.jsonl", LoadMode::kLabeled), Error);
  std::filesystem::remove_all(dir);
}

TEST(Split, SixDistinctDates) {
  Dataset d = dated({{"a", "2015-01-01"}, {"b", "2015-01-02"}, {"c", "2015-01-03"},
                     {"d", "2015-01-04"}, {"e", "2015-01-05"}, {"f", "2015-01-06"}});
  ChronoSplit s = chronological_split(d);
  ASSERT_EQ(s.train.size(), 3u);
  ASSERT_EQ(s.validation.size(), 1u);
  ASSERT_EQ(s.test.size(), 2u);
  EXPECT_EQ(s.train.reports[2].id, "c");
  EXPECT_EQ(s.validation.reports[0].id, "d");
  EXPECT_EQ(s.test.reports[1].id, "f");
}

TEST(Split, OneDateAllTrainWithWarning) {
  Dataset d = dated({{"a", "2015-01-01"}, {"b", "2015-01-01"}, {"c", "2015-01-01"}});
  log::ScopedCapture capture;
  ChronoSplit s = chronological_split(d);
  EXPECT_EQ(s.train.size(), 3u);
  EXPECT_TRUE(s.validation.empty());
  EXPECT_TRUE(s.test.empty());
  EXPECT_FALSE(capture.messages().empty());
}

TEST(Split, ByYears) {
  Dataset d = dated({{"a", "2014-05-01"}, {"b", "2016-12-31"}, {"c", "2017-01-01"},
                     {"d", "2018-01-01"}, {"e", "2019-07-07"}});
  ChronoSplit s = chronological_split(d, YearBoundaries{});
  EXPECT_EQ(s.train.size(), 2u);
  EXPECT_EQ(s.validation.size(), 1u);
  EXPECT_EQ(s.test.size(), 2u);
}

TEST(Split, ConcatenationReproducesInput) {
  std::vector<std::pair<std::string, std::string>> rows;
  for (int i = 0; i < 40; ++i)
    rows.push_back({"r" + std::to_string(i), Date::from_serial(16000 + i / 3).to_string()});
  Dataset d = dated(rows);
  for (SplitRatio ratio : {SplitRatio{3, 1, 2}, SplitRatio{1, 1, 1}, SplitRatio{5, 0, 1}}) {
    ChronoSplit s = chronological_split(d, ratio);
    std::vector<std::string> ids;
    for (const Dataset* part : {&s.train, &s.validation, &s.test})
      for (const auto& r : part->reports) ids.push_back(r.id);
    std::vector<std::string> want;
    for (const auto& r : d.reports) want.push_back(r.id);
    EXPECT_EQ(ids, want);
    // no date straddles two splits
    if (!s.train.empty() && !s.validation.empty())
      EXPECT_LT(s.train.reports.back().published, s.validation.reports.front().published);
  }
}

TEST(Census, TwoLabelCase) {
  std::string text = line("A", "2015-01-01", R"("x")") + line("B", "2016-01-01", R"("x")") +
                     line("C", "2016-01-02", R"("y")");
  Dataset d = parse_dataset(text, LoadMode::kLabeled);
  ChronoSplit s;
  s.train.reports = {d.reports[0]};
  s.test.reports = {d.reports[1], d.reports[2]};
  CensusReport c = unseen_census(s, CensusGranularity::kPerSplit);
  const PeriodCensus* test = nullptr;
  for (const auto& p : c.periods)
    if (p.period == "test") test = &p;
  ASSERT_TRUE(test);
  EXPECT_EQ(test->total_labels, 2u);
  EXPECT_EQ(test->seen_labels, 1u);
  EXPECT_EQ(test->unseen_labels, 1u);
  EXPECT_EQ(test->full_unseen_reports, 1u);
  EXPECT_EQ(test->seen_only_reports, 1u);
}

TEST(Census, TotalsAndDeterminism) {
  std::string text;
  const char* labels[] = {R"("a")", R"("b")", R"("a","c")", R"("d")", R"("c","e")", R"("f")"};
  for (int i = 0; i < 24; ++i)
    text += line("R" + std::to_string(i), std::to_string(2014 + i / 5) + "-03-01", labels[i % 6]);
  Dataset d = parse_dataset(text, LoadMode::kLabeled);
  ChronoSplit s = chronological_split(d);
  CensusReport c = unseen_census(s, CensusGranularity::kPerYear);
  for (const auto& p : c.periods) {
    EXPECT_EQ(p.seen_labels + p.unseen_labels, p.total_labels);
    EXPECT_EQ(p.seen_only_reports + p.any_unseen_reports, p.total_reports);
    EXPECT_LE(p.full_unseen_reports, p.any_unseen_reports);
  }
  EXPECT_EQ(c.to_json(), unseen_census(s, CensusGranularity::kPerYear).to_json());
  EXPECT_EQ(c.to_table(), unseen_census(s, CensusGranularity::kPerYear).to_table());
}
