#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vulnlib/corpus.hpp"

namespace vulnlib {

inline constexpr std::size_t kMaxK = 3;

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

/// P = |top-k ∩ truth| / k, R = |top-k ∩ truth| / |truth|. Returns nullopt
/// (with a warning) when truth is empty.
std::optional<PrecisionRecall> precision_recall_at_k(const std::vector<LabelId>& predicted,
                                                     const std::set<LabelId>& truth,
                                                     std::size_t k);

/// Per-report values for k = 1..3.
using PerReportMetrics = std::array<PrecisionRecall, kMaxK>;

struct MetricsAtK {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  std::array<MetricsAtK, kMaxK> at{};  // index 0 is k = 1
  double avg_f1 = 0.0;
  std::size_t n = 0;

  std::string to_table(const std::string& title = "") const;
  std::string to_json() const;
};

double harmonic_mean(double p, double r);

/// Macro averages of P@k and R@k, then F1@k from the averages.
MetricsReport aggregate(const std::vector<PerReportMetrics>& per_report);

/// Per-report metrics for every k in 1..3; nullopt when truth is empty.
std::optional<PerReportMetrics> evaluate_ranking(const std::vector<LabelId>& predicted,
                                                 const std::set<LabelId>& truth);

}  // namespace vulnlib
