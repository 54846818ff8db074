#include "vulnlib/service.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <mutex>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "vulnlib/error.hpp"
#include "vulnlib/evaluation.hpp"

namespace vulnlib {

using nlohmann::ordered_json;

namespace {

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json metrics_json(const MetricsReport& m) { return ordered_json::parse(m.to_json()); }

}  // namespace

TriageSession::TriageSession(Engine engine, Dataset queue, LruCache cache,
                             std::optional<std::filesystem::path> session_file)
    : engine_(std::move(engine)),
      queue_(std::move(queue)),
      initial_cache_(cache),
      cache_(std::move(cache)),
      k_(engine_.config().k),
      session_file_(std::move(session_file)) {
  queue_.sort_chronologically();
}

std::unique_ptr<TriageSession> TriageSession::restore(
    Engine engine, Dataset queue, std::string_view session_json,
    std::optional<std::filesystem::path> session_file) {
  auto j = ordered_json::parse(session_json, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("format", "") != "vulnlib-session")
    throw Error(ErrorKind::kParse, "not a session document");
  LruCache initial = LruCache::from_json(j.at("initial_cache").dump());
  auto session = std::make_unique<TriageSession>(std::move(engine), std::move(queue), initial);
  for (const auto& e : j.at("audit")) {
    auto labels = e.at("labels").get<std::vector<std::string>>();
    bool create = !e.value("created", ordered_json::array()).empty();
    session->confirm_locked(e.at("id").get<std::string>(), labels, create,
                            e.value("timestamp", std::string()));
  }
  session->session_file_ = std::move(session_file);
  return session;
}

std::optional<TriageSession::Next> TriageSession::next() const {
  std::shared_lock lock(mu_);
  if (head_ >= queue_.size()) return std::nullopt;
  Next n;
  n.report = queue_.reports[head_];
  n.predictions = engine_.predict(n.report, cache_, k_, engine_.config().use_adjustment);
  n.position = head_;
  n.remaining = queue_.size() - head_;
  return n;
}

void TriageSession::confirm(const std::string& report_id, const std::vector<std::string>& labels,
                            bool create) {
  std::unique_lock lock(mu_);
  confirm_locked(report_id, labels, create, utc_now());
  persist_locked();
}

void TriageSession::confirm_locked(const std::string& report_id,
                                   const std::vector<std::string>& raw_labels, bool create,
                                   std::string timestamp) {
  auto it = std::find_if(queue_.reports.begin(), queue_.reports.end(),
                         [&](const VulnerabilityReport& r) { return r.id == report_id; });
  if (it == queue_.reports.end()) throw Error(ErrorKind::kNotFound, "unknown report " + report_id);
  std::size_t index = static_cast<std::size_t>(it - queue_.reports.begin());
  if (index < head_) throw Error(ErrorKind::kConflict, "report " + report_id + " already confirmed");
  if (index > head_)
    throw Error(ErrorKind::kConflict,
                "report " + report_id + " is not the head of the queue (" + queue_.reports[head_].id + ")");

  std::set<LabelId> labels;
  std::vector<LabelId> created;
  for (const auto& raw : raw_labels) {
    LabelId id = canonical_label_id(raw);
    if (!engine_.universe().count(id)) {
      if (!create)
        throw Error(ErrorKind::kValidation, "unknown label '" + id + "' (set create to add it)");
      if (std::find(created.begin(), created.end(), id) == created.end()) created.push_back(id);
    }
    labels.insert(id);
  }
  if (!created.empty()) {
    auto universe = engine_.universe();
    for (const auto& id : created) universe.emplace(id, make_label(id));
    engine_.set_universe(universe);
  }

  const VulnerabilityReport& report = queue_.reports[head_];
  if (!labels.empty()) {
    auto shown = engine_.predict(report, cache_, std::max(k_, kMaxK), engine_.config().use_adjustment);
    std::vector<LabelId> ids;
    for (const auto& a : shown) ids.push_back(a.label);
    if (auto m = evaluate_ranking(ids, labels)) scored_.push_back(*m);
    for (std::size_t r = 0; r < std::min(k_, ids.size()); ++r)
      if (labels.count(ids[r]) && !engine_.training_labels().count(ids[r])) ++unseen_hits_;
  }
  insert_ground_truth(cache_, labels);
  audit_.push_back({report_id, std::vector<LabelId>(labels.begin(), labels.end()), created,
                    std::move(timestamp)});
  ++head_;
}

SessionStats TriageSession::stats() const {
  std::shared_lock lock(mu_);
  SessionStats s;
  s.confirmed = head_;
  s.remaining = queue_.size() - head_;
  if (!scored_.empty()) s.metrics = aggregate(scored_);
  s.cache_size = cache_.size();
  s.cache_capacity = cache_.capacity();
  s.unseen_label_hits = unseen_hits_;
  return s;
}

std::vector<LabelId> TriageSession::search_labels(std::string_view query, std::size_t limit) const {
  std::string q(query);
  for (auto& c : q) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::shared_lock lock(mu_);
  std::vector<LabelId> prefix, inner;
  for (const auto& [id, _] : engine_.universe()) {
    auto pos = id.find(q);
    if (pos == 0) prefix.push_back(id);
    else if (pos != std::string::npos) inner.push_back(id);
  }
  prefix.insert(prefix.end(), inner.begin(), inner.end());
  if (prefix.size() > limit) prefix.resize(limit);
  return prefix;
}

LruCache TriageSession::cache() const {
  std::shared_lock lock(mu_);
  return cache_;
}

std::vector<AuditEntry> TriageSession::audit_log() const {
  std::shared_lock lock(mu_);
  return audit_;
}

std::string TriageSession::to_json() const {
  std::shared_lock lock(mu_);
  return to_json_locked();
}

std::string TriageSession::to_json_locked() const {
  ordered_json j;
  j["format"] = "vulnlib-session";
  j["version"] = 1;
  j["initial_cache"] = ordered_json::parse(initial_cache_.to_json());
  j["cache"] = ordered_json::parse(cache_.to_json());
  j["position"] = head_;
  j["audit"] = ordered_json::array();
  for (const auto& e : audit_) {
    ordered_json a;
    a["id"] = e.report_id;
    a["labels"] = e.labels;
    a["created"] = e.created;
    a["timestamp"] = e.timestamp;
    j["audit"].push_back(a);
  }
  return j.dump(1) + "\n";
}

void TriageSession::persist_locked() const {
  if (!session_file_) return;
  auto tmp = std::filesystem::path(session_file_->string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
    out << to_json_locked();
  }
  std::filesystem::rename(tmp, *session_file_);
}

std::string next_to_json(const TriageSession::Next& n) {
  ordered_json j;
  j["id"] = n.report.id;
  j["published"] = n.report.published.to_string();
  j["description"] = n.report.description;
  j["references"] = ordered_json::array();
  for (const auto& ref : n.report.references) {
    ordered_json r;
    r["url"] = ref.url;
    r["domain"] = ref.domain;
    r["title"] = ref.title ? ordered_json(*ref.title) : ordered_json(nullptr);
    r["text"] = ref.text ? ordered_json(*ref.text) : ordered_json(nullptr);
    j["references"].push_back(r);
  }
  j["cpe"] = n.report.cpe_entries;
  j["predictions"] = ordered_json::array();
  for (const auto& a : n.predictions) j["predictions"].push_back(ordered_json::parse(adjusted_label_json(a)));
  j["position"] = n.position;
  j["remaining"] = n.remaining;
  return j.dump();
}

std::string stats_to_json(const SessionStats& s) {
  ordered_json j;
  j["n"] = s.confirmed;
  j["remaining"] = s.remaining;
  j["metrics"] = s.metrics ? metrics_json(*s.metrics) : ordered_json(nullptr);
  j["cache_size"] = s.cache_size;
  j["cache_capacity"] = s.cache_capacity;
  j["unseen_label_hits"] = s.unseen_label_hits;
  return j.dump();
}

struct TriageServer::Impl {
  TriageSession& session;
  httplib::Server server;
  explicit Impl(TriageSession& s) : session(s) {}
};

namespace {

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotFound: return 404;
    case ErrorKind::kConflict: return 409;
    case ErrorKind::kValidation: return 422;
    case ErrorKind::kParse: return 400;
    default: return 500;
  }
}

void send_error(httplib::Response& res, int status, std::string_view kind, std::string_view message) {
  ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

}  // namespace

TriageServer::TriageServer(TriageSession& session) : impl_(std::make_unique<Impl>(session)) {
  auto& srv = impl_->server;
  TriageSession* s = &session;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  srv.Get("/session/next", [s](const httplib::Request&, httplib::Response& res) {
    auto n = s->next();
    if (!n) {
      res.status = 204;
      return;
    }
    res.set_content(next_to_json(*n), "application/json");
  });

  srv.Post(R"(/reports/([^/]+)/labels)", [s](const httplib::Request& req, httplib::Response& res) {
    std::string id = req.matches[1];
    auto body = ordered_json::parse(req.body, nullptr, false);
    std::vector<std::string> labels;
    bool create = false;
    if (body.is_array()) {
      body = ordered_json{{"labels", body}};
    }
    if (body.is_discarded() || !body.is_object() || !body.contains("labels") ||
        !body["labels"].is_array()) {
      send_error(res, 400, "parse", "expected {\"labels\": [...], \"create\": bool}");
      return;
    }
    for (const auto& l : body["labels"]) {
      if (!l.is_string()) {
        send_error(res, 400, "parse", "labels must be strings");
        return;
      }
      labels.push_back(l.get<std::string>());
    }
    if (body.contains("create")) {
      if (!body["create"].is_boolean()) {
        send_error(res, 400, "parse", "create must be a boolean");
        return;
      }
      create = body["create"].get<bool>();
    }
    try {
      s->confirm(id, labels, create);
    } catch (const Error& e) {
      send_error(res, status_for(e.kind()), to_string(e.kind()), e.what());
      return;
    }
    LruCache cache = s->cache();
    ordered_json j;
    j["ok"] = true;
    j["id"] = id;
    ordered_json c;
    c["size"] = cache.size();
    c["capacity"] = cache.capacity();
    std::vector<LabelId> front(cache.entries().begin(),
                               cache.entries().begin() +
                                   static_cast<std::ptrdiff_t>(std::min<std::size_t>(10, cache.size())));
    c["front"] = front;
    j["cache"] = c;
    j["remaining"] = s->stats().remaining;
    res.set_content(j.dump(), "application/json");
  });

  srv.Get("/stats", [s](const httplib::Request&, httplib::Response& res) {
    res.set_content(stats_to_json(s->stats()), "application/json");
  });

  srv.Get("/labels/search", [s](const httplib::Request& req, httplib::Response& res) {
    std::string q = req.has_param("q") ? req.get_param_value("q") : "";
    std::size_t limit = 20;
    if (req.has_param("limit")) {
      try {
        limit = std::stoul(req.get_param_value("limit"));
      } catch (const std::exception&) {
        send_error(res, 400, "parse", "limit must be a non-negative integer");
        return;
      }
    }
    ordered_json j;
    j["query"] = q;
    j["labels"] = s->search_labels(q, limit);
    res.set_content(j.dump(), "application/json");
  });

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      send_error(res, status_for(e.kind()), to_string(e.kind()), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  });
}

TriageServer::~TriageServer() { stop(); }

int TriageServer::bind(const std::string& host, int port) {
  if (port == 0) {
    int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorKind::kIo, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port))
    throw Error(ErrorKind::kIo, "cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void TriageServer::run() { impl_->server.listen_after_bind(); }

void TriageServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void TriageServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace vulnlib
