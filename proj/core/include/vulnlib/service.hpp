#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "vulnlib/engine.hpp"
#include "vulnlib/metrics.hpp"
#include "vulnlib/temporal.hpp"

namespace vulnlib {

struct AuditEntry {
  std::string report_id;
  std::vector<LabelId> labels;
  std::vector<LabelId> created;
  std::string timestamp;  // UTC, informational only
};

struct SessionStats {
  std::size_t confirmed = 0;
  std::size_t remaining = 0;
  std::optional<MetricsReport> metrics;  // absent until a labeled confirmation
  std::size_t cache_size = 0;
  std::size_t cache_capacity = 0;
  std::size_t unseen_label_hits = 0;  // confirmed labels outside the training set found in top-k
};

/// Human-in-the-loop triage over a chronological queue. Reads may run
/// concurrently; confirmations are serialized.
class TriageSession {
 public:
  /// `queue` is ordered by (published, id). When `session_file` is set the
  /// session is written there after every confirmation.
  TriageSession(Engine engine, Dataset queue, LruCache cache,
                std::optional<std::filesystem::path> session_file = std::nullopt);

  /// Rebuilds a session from a saved session document by replaying its
  /// audit log from the stored initial cache.
  static std::unique_ptr<TriageSession> restore(Engine engine, Dataset queue,
                                                std::string_view session_json,
                                                std::optional<std::filesystem::path> session_file =
                                                    std::nullopt);

  struct Next {
    VulnerabilityReport report;
    std::vector<AdjustedLabel> predictions;
    std::size_t position = 0;
    std::size_t remaining = 0;
  };
  /// Head of the queue with its adjusted top-k; nullopt when done.
  std::optional<Next> next() const;

  /// Confirms the labels of the head report. Errors: kNotFound for an
  /// unknown id, kConflict for an already confirmed or non-head report,
  /// kValidation for labels outside the universe when `create` is false.
  void confirm(const std::string& report_id, const std::vector<std::string>& labels, bool create);

  SessionStats stats() const;
  /// Universe labels containing `query` (prefix matches first), at most `limit`.
  std::vector<LabelId> search_labels(std::string_view query, std::size_t limit = 20) const;

  LruCache cache() const;
  std::vector<AuditEntry> audit_log() const;
  std::string to_json() const;
  std::size_t k() const { return k_; }

 private:
  void confirm_locked(const std::string& report_id, const std::vector<std::string>& labels,
                      bool create, std::string timestamp);
  std::string to_json_locked() const;
  void persist_locked() const;

  mutable std::shared_mutex mu_;
  Engine engine_;
  Dataset queue_;
  LruCache initial_cache_;
  LruCache cache_;
  std::size_t head_ = 0;
  std::size_t k_ = 3;
  std::vector<AuditEntry> audit_;
  std::vector<PerReportMetrics> scored_;
  std::size_t unseen_hits_ = 0;
  std::optional<std::filesystem::path> session_file_;
};

std::string next_to_json(const TriageSession::Next& next);
std::string stats_to_json(const SessionStats& stats);

/// Loopback HTTP front end for a TriageSession.
class TriageServer {
 public:
  explicit TriageServer(TriageSession& session);
  ~TriageServer();
  TriageServer(const TriageServer&) = delete;
  TriageServer& operator=(const TriageServer&) = delete;

  /// Binds `host:port`; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host = "127.0.0.1", int port = 0);
  /// Blocks serving requests until stop().
  void run();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vulnlib
