#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "vulnlib/error.hpp"
#include "vulnlib/evaluation.hpp"
#include "vulnlib/service.hpp"

using namespace vulnlib;
using nlohmann::json;

namespace {

VulnerabilityReport report(const std::string& id, int day, const std::string& desc,
                           std::set<LabelId> labels) {
  VulnerabilityReport r;
  r.id = id;
  r.published = Date::from_serial(17000 + day);
  r.description = desc;
  r.labels = std::move(labels);
  return r;
}

struct Fixture {
  Dataset train, queue;
  std::map<LabelId, Label> universe;
  Engine engine;

  Fixture() {
    const char* texts[][2] = {{"alpha", "overflow in the alpha parser"},
                              {"beta", "crash in the beta renderer"},
                              {"gamma", "leak in the gamma codec"}};
    int day = 0;
    for (int rep = 0; rep < 4; ++rep)
      for (auto& [label, text] : texts)
        train.reports.push_back(report("T" + std::to_string(day), day, text, {label}));
    for (const char* l : {"alpha", "beta", "gamma", "delta"}) universe.emplace(l, make_label(l));
    train.labels = universe;
    queue.reports = {report("Q1", 100, "overflow in the alpha parser", {"alpha"}),
                     report("Q2", 101, "crash in the beta renderer", {"beta"}),
                     report("Q3", 102, "a problem in some component", {})};
    queue.labels = universe;
    EngineConfig cfg;
    cfg.enhance.description_common_cut = 1.0;
    engine = Engine::fit(train, universe, cfg);
  }
};

std::unique_ptr<TriageSession> fresh(const Fixture& f, std::optional<std::filesystem::path> file = {}) {
  return std::make_unique<TriageSession>(f.engine, f.queue, LruCache(300), file);
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error";
  return ErrorKind::kIo;
}

}  // namespace

TEST(Session, QueueOrderAndAdvance) {
  Fixture f;
  auto s = fresh(f);
  auto n1 = s->next();
  ASSERT_TRUE(n1);
  EXPECT_EQ(n1->report.id, "Q1");
  EXPECT_EQ(n1->remaining, 3u);
  s->confirm("Q1", {"alpha"}, false);
  EXPECT_EQ(s->next()->report.id, "Q2");
  EXPECT_EQ(s->cache().entries().front(), "alpha");
}

TEST(Session, PredictionsMatchEnginePredict) {
  Fixture f;
  auto s = fresh(f);
  LruCache cache(300);
  for (const auto& r : f.queue.reports) {
    auto n = s->next();
    ASSERT_TRUE(n);
    auto direct = f.engine.predict(r, cache, s->k(), true);
    ASSERT_EQ(n->predictions.size(), direct.size());
    for (std::size_t j = 0; j < direct.size(); ++j) {
      EXPECT_EQ(n->predictions[j].label, direct[j].label);
      EXPECT_EQ(n->predictions[j].score, direct[j].score);
    }
    std::vector<std::string> labels(r.labels.begin(), r.labels.end());
    s->confirm(r.id, labels, false);
    insert_ground_truth(cache, r.labels);
  }
  EXPECT_FALSE(s->next());
}

TEST(Session, ConfirmationAppliesRecencyBoost) {
  Fixture f;
  auto control = fresh(f);
  auto s = fresh(f);
  s->confirm("Q1", {"delta"}, false);

  auto before = control->next();
  control->confirm("Q1", {}, false);
  auto plain = control->next();
  auto boosted = s->next();
  ASSERT_TRUE(plain && boosted && before);

  // no versions in the universe, so R-bar is the mean of every label's
  // probability and delta (recency 0) gains M * R-bar
  double sum = 0.0;
  for (const auto& sl : f.engine.rank(boosted->report, 10)) sum += relevance_probability(sl.score);
  double rbar = sum / 4.0;
  double base = 0.0;
  for (const auto& sl : f.engine.rank(boosted->report, 10))
    if (sl.label == "delta") base = relevance_probability(sl.score);
  ASSERT_EQ(boosted->predictions.front().label, "delta");
  EXPECT_NEAR(boosted->predictions.front().score, base + 8.0 * rbar, 1e-12);
  for (const auto& p : plain->predictions)
    if (p.label == "delta") EXPECT_EQ(p.score, base);
}

TEST(Session, EmptyConfirmationKeepsCache) {
  Fixture f;
  auto s = fresh(f);
  s->confirm("Q1", {}, false);
  EXPECT_EQ(s->cache().size(), 0u);
  EXPECT_EQ(s->next()->report.id, "Q2");
}

TEST(Session, Errors) {
  Fixture f;
  auto s = fresh(f);
  EXPECT_EQ(kind_of([&] { s->confirm("NOPE", {}, false); }), ErrorKind::kNotFound);
  EXPECT_EQ(kind_of([&] { s->confirm("Q2", {}, false); }), ErrorKind::kConflict);
  EXPECT_EQ(kind_of([&] { s->confirm("Q1", {"brand-new"}, false); }), ErrorKind::kValidation);
  s->confirm("Q1", {"alpha"}, false);
  EXPECT_EQ(kind_of([&] { s->confirm("Q1", {"alpha"}, false); }), ErrorKind::kConflict);
  s->confirm("Q2", {"brand-new@1.0"}, true);
  EXPECT_EQ(s->cache().entries().front(), "brand-new@1.0");
  EXPECT_FALSE(s->search_labels("brand").empty());
}

TEST(Session, Stats) {
  Fixture f;
  auto s = fresh(f);
  auto st = s->stats();
  EXPECT_EQ(st.confirmed, 0u);
  EXPECT_FALSE(st.metrics);
  ASSERT_EQ(s->next()->predictions.front().label, "alpha");
  s->confirm("Q1", {"alpha"}, false);
  st = s->stats();
  EXPECT_EQ(st.confirmed, 1u);
  ASSERT_TRUE(st.metrics);
  EXPECT_EQ(st.metrics->at[0].precision, 1.0);
  EXPECT_LE(st.cache_size, st.cache_capacity);
}

TEST(Session, SearchPrefixFirst) {
  Fixture f;
  auto s = fresh(f);
  auto hits = s->search_labels("a");
  ASSERT_FALSE(hits.empty());
  EXPECT_EQ(hits.front(), "alpha");
  EXPECT_EQ(s->search_labels("a", 2).size(), 2u);
}

TEST(Session, ReplayReproducesState) {
  Fixture f;
  auto dir = std::filesystem::temp_directory_path() / "vulnlib_session_test";
  std::filesystem::create_directories(dir);
  auto file = dir / "session.json";
  auto s = fresh(f, file);
  s->confirm("Q1", {"alpha", "gamma"}, false);
  s->confirm("Q2", {"delta"}, false);
  ASSERT_TRUE(std::filesystem::exists(file));
  std::ifstream in(file);
  std::string text((std::istreambuf_iterator<char>(in)), {});

  auto r = TriageSession::restore(f.engine, f.queue, text);
  EXPECT_EQ(r->cache(), s->cache());
  EXPECT_EQ(r->audit_log().size(), 2u);
  auto a = s->next(), b = r->next();
  ASSERT_TRUE(a && b);
  EXPECT_EQ(next_to_json(*a), next_to_json(*b));
  EXPECT_EQ(stats_to_json(r->stats()), stats_to_json(s->stats()));
  std::filesystem::remove_all(dir);
}

class HttpTest : public ::testing::Test {
 protected:
  void SetUp() override {
    session_ = fresh(fixture_);
    server_ = std::make_unique<TriageServer>(*session_);
    port_ = server_->bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_->run(); });
    server_->wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override {
    server_->stop();
    thread_.join();
  }
  httplib::Result confirm(const std::string& id, const std::string& body) {
    return client_->Post("/reports/" + id + "/labels", body, "application/json");
  }

  Fixture fixture_;
  std::unique_ptr<TriageSession> session_;
  std::unique_ptr<TriageServer> server_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(HttpTest, FullLoop) {
  auto next = client_->Get("/session/next");
  ASSERT_TRUE(next);
  EXPECT_EQ(next->status, 200);
  json j = json::parse(next->body);
  EXPECT_EQ(j["id"], "Q1");
  EXPECT_EQ(j["predictions"].size(), 3u);
  EXPECT_TRUE(j["predictions"][0].contains("base_score"));

  auto ok = confirm("Q1", R"({"labels":["alpha"]})");
  ASSERT_TRUE(ok);
  EXPECT_EQ(ok->status, 200);
  json ack = json::parse(ok->body);
  EXPECT_EQ(ack["cache"]["front"][0], "alpha");
  EXPECT_EQ(ack["remaining"], 2);

  EXPECT_EQ(confirm("Q2", R"(["beta"])")->status, 200);
  EXPECT_EQ(confirm("Q3", R"({"labels":[]})")->status, 200);
  EXPECT_EQ(client_->Get("/session/next")->status, 204);

  auto stats = client_->Get("/stats");
  json s = json::parse(stats->body);
  EXPECT_EQ(s["n"], 3);
  EXPECT_EQ(s["metrics"]["n"], 2);
  EXPECT_EQ(s["remaining"], 0);
  EXPECT_LE(s["cache_size"].get<int>(), s["cache_capacity"].get<int>());
}

TEST_F(HttpTest, ErrorStatuses) {
  EXPECT_EQ(confirm("NOPE", R"(["alpha"])")->status, 404);
  EXPECT_EQ(confirm("Q2", R"(["alpha"])")->status, 409);
  auto bad = confirm("Q1", R"(["not-a-label"])");
  EXPECT_EQ(bad->status, 422);
  EXPECT_EQ(json::parse(bad->body)["error"], "validation error");
  EXPECT_EQ(confirm("Q1", "{oops")->status, 400);
  EXPECT_EQ(confirm("Q1", R"({"labels":"alpha"})")->status, 400);
  EXPECT_EQ(confirm("Q1", R"({"labels":["new-lib"],"create":true})")->status, 200);
  EXPECT_EQ(confirm("Q1", R"(["alpha"])")->status, 409);
}

TEST_F(HttpTest, StatsBeforeAnyConfirmation) {
  json s = json::parse(client_->Get("/stats")->body);
  EXPECT_EQ(s["n"], 0);
  EXPECT_TRUE(s["metrics"].is_null());
}

TEST_F(HttpTest, LabelSearchAndCors) {
  auto res = client_->Get("/labels/search?q=be&limit=5");
  ASSERT_TRUE(res);
  json j = json::parse(res->body);
  EXPECT_EQ(j["labels"][0], "beta");
  EXPECT_TRUE(res->has_header("Access-Control-Allow-Origin"));
  auto opt = client_->Options("/stats");
  ASSERT_TRUE(opt);
  EXPECT_EQ(opt->status, 204);
}
