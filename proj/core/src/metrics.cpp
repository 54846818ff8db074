#include "vulnlib/metrics.hpp"

#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vulnlib/error.hpp"
#include "vulnlib/log.hpp"

namespace vulnlib {

std::optional<PrecisionRecall> precision_recall_at_k(const std::vector<LabelId>& predicted,
                                                     const std::set<LabelId>& truth,
                                                     std::size_t k) {
  if (k == 0) throw Error(ErrorKind::kValidation, "k must be at least 1");
  if (truth.empty()) {
    log::warn("report with empty ground truth excluded from metrics");
    return std::nullopt;
  }
  std::size_t hits = 0;
  std::set<LabelId> counted;
  for (std::size_t r = 0; r < std::min(k, predicted.size()); ++r) {
    if (truth.count(predicted[r]) && counted.insert(predicted[r]).second) ++hits;
  }
  return PrecisionRecall{static_cast<double>(hits) / static_cast<double>(k),
                         static_cast<double>(hits) / static_cast<double>(truth.size())};
}

std::optional<PerReportMetrics> evaluate_ranking(const std::vector<LabelId>& predicted,
                                                 const std::set<LabelId>& truth) {
  if (truth.empty()) {
    log::warn("report with empty ground truth excluded from metrics");
    return std::nullopt;
  }
  PerReportMetrics m{};
  for (std::size_t k = 1; k <= kMaxK; ++k) m[k - 1] = *precision_recall_at_k(predicted, truth, k);
  return m;
}

double harmonic_mean(double p, double r) {
  return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

MetricsReport aggregate(const std::vector<PerReportMetrics>& per_report) {
  MetricsReport report;
  report.n = per_report.size();
  if (per_report.empty()) return report;
  for (std::size_t k = 0; k < kMaxK; ++k) {
    double p = 0.0, r = 0.0;
    for (const auto& m : per_report) {
      p += m[k].precision;
      r += m[k].recall;
    }
    p /= static_cast<double>(per_report.size());
    r /= static_cast<double>(per_report.size());
    report.at[k] = {p, r, harmonic_mean(p, r)};
  }
  report.avg_f1 = (report.at[0].f1 + report.at[1].f1 + report.at[2].f1) / 3.0;
  return report;
}

std::string MetricsReport::to_table(const std::string& title) const {
  std::ostringstream out;
  char buf[160];
  if (!title.empty()) out << title << '\n';
  out << "k\tP@k\tR@k\tF1@k\n";
  for (std::size_t k = 0; k < kMaxK; ++k) {
    std::snprintf(buf, sizeof buf, "%zu\t%.4f\t%.4f\t%.4f\n", k + 1, at[k].precision,
                  at[k].recall, at[k].f1);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "avg_F1\t%.4f\nn\t%zu\n", avg_f1, n);
  out << buf;
  return out.str();
}

std::string MetricsReport::to_json() const {
  // Fixed-precision text keeps the output byte-stable across runs.
  auto fixed = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10f", v);
    return nlohmann::json::parse(buf);
  };
  nlohmann::ordered_json j;
  j["n"] = n;
  for (std::size_t k = 0; k < kMaxK; ++k) {
    std::string key = "k" + std::to_string(k + 1);
    j[key]["P"] = fixed(at[k].precision);
    j[key]["R"] = fixed(at[k].recall);
    j[key]["F1"] = fixed(at[k].f1);
  }
  j["avg_F1"] = fixed(avg_f1);
  return j.dump(2) + "\n";
}

}  // namespace vulnlib
