#include "vulnlib/learner.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>

#include "vulnlib/error.hpp"
#include "vulnlib/log.hpp"

namespace vulnlib {

void LearnerParams::validate() const {
  if (K == 0) throw Error(ErrorKind::kConfig, "K must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::kConfig, "lambda must be positive");
  if (refine_passes == 0) throw Error(ErrorKind::kConfig, "refine_passes must be positive");
  if (candidate_cap == 0) throw Error(ErrorKind::kConfig, "candidate_cap must be positive");
}

void WeightMatrix::set_row(std::size_t i, std::vector<Entry> entries) {
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (entries[k].first >= cols_ || (k > 0 && entries[k - 1].first >= entries[k].first))
      throw Error(ErrorKind::kValidation, "set_row: entries must be sorted, unique and in range");
  }
  data_.at(i) = std::move(entries);
}

double WeightMatrix::get(std::size_t row, ColumnId col) const {
  const auto& r = data_.at(row);
  auto it = std::lower_bound(r.begin(), r.end(), col,
                             [](const Entry& e, ColumnId c) { return e.first < c; });
  return (it != r.end() && it->first == col) ? it->second : 0.0;
}

void WeightMatrix::set(std::size_t row, ColumnId col, double value) {
  if (col >= cols_) throw Error(ErrorKind::kValidation, "set: column out of range");
  auto& r = data_.at(row);
  auto it = std::lower_bound(r.begin(), r.end(), col,
                             [](const Entry& e, ColumnId c) { return e.first < c; });
  bool present = it != r.end() && it->first == col;
  if (value == 0.0) {
    if (present) r.erase(it);
  } else if (present) {
    it->second = value;
  } else {
    r.insert(it, Entry{col, value});
  }
}

std::size_t WeightMatrix::nnz() const {
  std::size_t n = 0;
  for (const auto& r : data_) n += r.size();
  return n;
}

std::size_t WeightMatrix::max_row_nnz() const {
  std::size_t n = 0;
  for (const auto& r : data_) n = std::max(n, r.size());
  return n;
}

double WeightMatrix::squared_norm() const {
  double s = 0.0;
  for (const auto& r : data_)
    for (const auto& [_, w] : r) s += w * w;
  return s;
}

std::vector<double> WeightMatrix::project(const SparseVector& d) const {
  if (d.dim != rows())
    throw Error(ErrorKind::kValidation, "project: document dimension does not match W rows");
  std::vector<double> out(cols_, 0.0);
  for (const auto& [a, da] : d.entries)
    for (const auto& [b, w] : data_[a]) out[b] += da * w;
  return out;
}

double relevance(const SparseVector& d, const SparseVector& l, const WeightMatrix& W) {
  if (d.dim != W.rows() || l.dim != W.cols())
    throw Error(ErrorKind::kValidation, "relevance: dimension mismatch");
  double total = 0.0;
  for (const auto& [a, da] : d.entries) {
    auto row = W.row(a);
    auto r = row.begin();
    auto li = l.entries.begin();
    double partial = 0.0;
    while (r != row.end() && li != l.entries.end()) {
      if (r->first < li->first) {
        ++r;
      } else if (li->first < r->first) {
        ++li;
      } else {
        partial += r->second * li->second;
        ++r;
        ++li;
      }
    }
    total += da * partial;
  }
  return total;
}

std::vector<TrainingPair> build_training_pairs(
    const std::vector<std::vector<std::uint32_t>>& positives,
    const std::vector<SparseVector>& doc_match, const std::vector<SparseVector>& label_match,
    const LearnerParams& params, std::uint64_t seed) {
  if (positives.empty()) throw Error(ErrorKind::kValidation, "no training documents");
  if (positives.size() != doc_match.size())
    throw Error(ErrorKind::kValidation, "positives and doc_match differ in length");
  const std::size_t n_labels = label_match.size();

  // Inverted index over the shared matching space.
  std::size_t dim = 0;
  for (const auto& l : label_match) dim = std::max(dim, l.dim);
  std::vector<std::vector<std::pair<std::uint32_t, double>>> postings(dim);
  std::vector<double> label_norm(n_labels);
  for (std::uint32_t j = 0; j < n_labels; ++j) {
    label_norm[j] = std::sqrt(label_match[j].squared_norm());
    for (const auto& [c, v] : label_match[j].entries) postings[c].emplace_back(j, v);
  }

  std::mt19937_64 rng(seed);
  std::vector<TrainingPair> pairs;
  std::vector<double> sim(n_labels, 0.0);
  std::vector<std::uint32_t> touched;
  std::vector<char> excluded(n_labels, 0);

  for (std::uint32_t i = 0; i < positives.size(); ++i) {
    std::vector<std::uint32_t> pos = positives[i];
    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
    if (pos.empty()) {
      log::warn("training document " + std::to_string(i) + " has no positive labels; skipped");
      continue;
    }
    for (auto j : pos) {
      pairs.push_back({i, j, +1});
      excluded[j] = 1;
    }

    std::size_t want = std::min(params.negatives_per_doc, n_labels - pos.size());
    std::vector<std::uint32_t> negatives;
    if (want > 0) {
      touched.clear();
      double dnorm = std::sqrt(doc_match[i].squared_norm());
      if (dnorm > 0.0) {
        for (const auto& [c, v] : doc_match[i].entries) {
          if (c >= dim) continue;
          for (const auto& [j, lv] : postings[c]) {
            if (sim[j] == 0.0) touched.push_back(j);
            sim[j] += v * lv;
          }
        }
      }
      std::vector<std::pair<double, std::uint32_t>> ranked;
      for (auto j : touched) {
        double s = sim[j] / (dnorm * label_norm[j]);
        sim[j] = 0.0;
        if (!excluded[j] && s > 0.0) ranked.emplace_back(s, j);
      }
      std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
      });
      for (std::size_t r = 0; r < ranked.size() && negatives.size() < want; ++r) {
        negatives.push_back(ranked[r].second);
        excluded[ranked[r].second] = 1;
      }
      std::size_t remaining = n_labels - pos.size() - negatives.size();
      std::size_t still = std::min(want - negatives.size(), remaining);
      if (still > 0 && still * 2 >= remaining) {
        std::vector<std::uint32_t> pool;
        for (std::uint32_t j = 0; j < n_labels; ++j)
          if (!excluded[j]) pool.push_back(j);
        std::shuffle(pool.begin(), pool.end(), rng);
        for (std::size_t r = 0; r < still; ++r) {
          negatives.push_back(pool[r]);
          excluded[pool[r]] = 1;
        }
      } else {
        std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n_labels - 1));
        while (still > 0) {
          std::uint32_t j = pick(rng);
          if (excluded[j]) continue;
          negatives.push_back(j);
          excluded[j] = 1;
          --still;
        }
      }
    }
    for (auto j : negatives) pairs.push_back({i, j, -1});
    for (auto j : pos) excluded[j] = 0;
    for (auto j : negatives) excluded[j] = 0;
  }
  return pairs;
}

namespace {

// log(1 + exp(-z)) without overflow.
double logistic_loss(double z) {
  return z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

// 1 / (1 + exp(-z))
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

void check_inputs(std::span<const TrainingPair> pairs, std::span<const SparseVector> docs,
                  std::span<const SparseVector> labels) {
  for (const auto& p : pairs) {
    if (p.doc >= docs.size() || p.label >= labels.size())
      throw Error(ErrorKind::kValidation, "training pair index out of range");
    if (p.y != 1 && p.y != -1) throw Error(ErrorKind::kValidation, "training pair y must be +1 or -1");
  }
}

std::size_t common_dim(std::span<const SparseVector> vs, const char* what) {
  if (vs.empty()) throw Error(ErrorKind::kValidation, std::string("no ") + what + " vectors");
  std::size_t dim = vs.front().dim;
  for (const auto& v : vs)
    if (v.dim != dim) throw Error(ErrorKind::kValidation, std::string(what) + " vectors differ in dimension");
  return dim;
}

std::string entry_name(std::size_t a, ColumnId b) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

}  // namespace

double objective(const WeightMatrix& W, std::span<const TrainingPair> pairs,
                 std::span<const SparseVector> docs, std::span<const SparseVector> labels,
                 double lambda) {
  check_inputs(pairs, docs, labels);
  double loss = 0.0;
  for (const auto& p : pairs)
    loss += logistic_loss(p.y * relevance(docs[p.doc], labels[p.label], W));
  return 0.5 * W.squared_norm() + lambda * loss;
}

double coordinate_gradient(const WeightMatrix& W, std::span<const TrainingPair> pairs,
                           std::span<const SparseVector> docs,
                           std::span<const SparseVector> labels, double lambda,
                           std::size_t row, ColumnId col) {
  check_inputs(pairs, docs, labels);
  double g = W.get(row, col);
  for (const auto& p : pairs) {
    double c = docs[p.doc].at(static_cast<ColumnId>(row)) * labels[p.label].at(col);
    if (c == 0.0) continue;
    double s = relevance(docs[p.doc], labels[p.label], W);
    g += lambda * (-p.y) * sigmoid(-p.y * s) * c;
  }
  return g;
}

WeightMatrix approximate_phase(std::span<const TrainingPair> pairs,
                               std::span<const SparseVector> docs,
                               std::span<const SparseVector> labels, const LearnerParams& params) {
  params.validate();
  if (pairs.empty()) throw Error(ErrorKind::kValidation, "no training pairs");
  check_inputs(pairs, docs, labels);
  const std::size_t rows = common_dim(docs, "document");
  const std::size_t cols = common_dim(labels, "label");
  const double lambda = params.lambda;

  // Per-document aggregates over its pairs: c = sum y*l, q = sum l^2.
  std::vector<SparseVector> agg_c(docs.size()), agg_q(docs.size());
  {
    std::vector<std::vector<const TrainingPair*>> by_doc(docs.size());
    for (const auto& p : pairs) by_doc[p.doc].push_back(&p);
    std::vector<double> c(cols, 0.0), q(cols, 0.0);
    std::vector<ColumnId> touched;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (by_doc[i].empty()) continue;
      touched.clear();
      for (const auto* p : by_doc[i]) {
        for (const auto& [b, lv] : labels[p->label].entries) {
          if (q[b] == 0.0) touched.push_back(b);
          c[b] += p->y * lv;
          q[b] += lv * lv;
        }
      }
      std::sort(touched.begin(), touched.end());
      agg_c[i].dim = agg_q[i].dim = cols;
      for (auto b : touched) {
        agg_c[i].entries.emplace_back(b, c[b]);
        agg_q[i].entries.emplace_back(b, q[b]);
        c[b] = q[b] = 0.0;
      }
    }
  }

  // Inverted index: document feature -> (doc, value) over docs with pairs.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> inv(rows);
  for (std::uint32_t i = 0; i < docs.size(); ++i) {
    if (agg_q[i].entries.empty()) continue;
    for (const auto& [a, da] : docs[i].entries) inv[a].emplace_back(i, da);
  }

  WeightMatrix W(rows, cols);
  std::vector<double> G(cols, 0.0), H(cols, 0.0);
  std::vector<ColumnId> touched;
  struct Candidate {
    ColumnId col;
    double g;
    double h;
  };
  std::vector<Candidate> cand;
  for (std::size_t a = 0; a < rows; ++a) {
    if (inv[a].empty()) continue;
    touched.clear();
    for (const auto& [i, da] : inv[a]) {
      for (const auto& [b, cv] : agg_c[i].entries) G[b] += da * cv;
      for (const auto& [b, qv] : agg_q[i].entries) {
        if (H[b] == 0.0) touched.push_back(b);
        H[b] += da * da * qv;
      }
    }
    cand.clear();
    for (auto b : touched) {
      double g = -0.5 * lambda * G[b];
      double h = 0.25 * lambda * H[b] + 1.0;
      G[b] = H[b] = 0.0;
      if (!std::isfinite(g) || !std::isfinite(h))
        throw Error(ErrorKind::kNumeric, "non-finite gradient at entry " + entry_name(a, b));
      if (g != 0.0) cand.push_back({b, g, h});
    }
    if (cand.empty()) continue;
    auto by_col = [](const Candidate& x, const Candidate& y) { return x.col < y.col; };
    if (cand.size() > params.candidate_cap) {
      std::sort(cand.begin(), cand.end(), [](const Candidate& x, const Candidate& y) {
        double ax = std::abs(x.g), ay = std::abs(y.g);
        return ax != ay ? ax > ay : x.col < y.col;
      });
      cand.resize(params.candidate_cap);
    }
    if (cand.size() > params.K) {
      std::sort(cand.begin(), cand.end(), [](const Candidate& x, const Candidate& y) {
        double sx = x.g * x.g / (2.0 * x.h), sy = y.g * y.g / (2.0 * y.h);
        return sx != sy ? sx > sy : x.col < y.col;
      });
      cand.resize(params.K);
    }
    std::sort(cand.begin(), cand.end(), by_col);
    std::vector<WeightMatrix::Entry> entries;
    entries.reserve(cand.size());
    for (const auto& c : cand) {
      double w = -c.g / c.h;
      if (!std::isfinite(w))
        throw Error(ErrorKind::kNumeric, "non-finite weight at entry " + entry_name(a, c.col));
      entries.emplace_back(c.col, w);
    }
    W.set_row(a, std::move(entries));
  }
  return W;
}

std::vector<double> refine_phase(WeightMatrix& W, std::span<const TrainingPair> pairs,
                                 std::span<const SparseVector> docs,
                                 std::span<const SparseVector> labels,
                                 const LearnerParams& params) {
  params.validate();
  check_inputs(pairs, docs, labels);
  const double lambda = params.lambda;
  const std::size_t rows = W.rows();
  const std::size_t cols = W.cols();

  // Current margins s_p = d^T W l.
  std::vector<double> margin(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p)
    margin[p] = relevance(docs[pairs[p].doc], labels[pairs[p].label], W);

  std::vector<std::vector<std::uint32_t>> pairs_of_doc(docs.size());
  for (std::uint32_t p = 0; p < pairs.size(); ++p) pairs_of_doc[pairs[p].doc].push_back(p);
  std::vector<std::vector<std::pair<std::uint32_t, double>>> inv(rows);
  for (std::uint32_t i = 0; i < docs.size(); ++i) {
    if (pairs_of_doc[i].empty()) continue;
    for (const auto& [a, da] : docs[i].entries) inv[a].emplace_back(i, da);
  }

  auto total_objective = [&] {
    double loss = 0.0;
    for (std::size_t p = 0; p < pairs.size(); ++p) loss += logistic_loss(pairs[p].y * margin[p]);
    return 0.5 * W.squared_norm() + lambda * loss;
  };

  std::vector<double> trace{total_objective()};
  std::vector<int> slot_of(cols, -1);
  // affected[slot] = (pair index, d_a * l_b)
  std::vector<std::vector<std::pair<std::uint32_t, double>>> affected;

  for (std::size_t pass = 0; pass < params.refine_passes; ++pass) {
    for (std::size_t a = 0; a < rows; ++a) {
      auto row = W.row(a);
      if (row.empty() || inv[a].empty()) continue;
      std::vector<WeightMatrix::Entry> entries(row.begin(), row.end());
      affected.assign(entries.size(), {});
      for (std::size_t s = 0; s < entries.size(); ++s) slot_of[entries[s].first] = static_cast<int>(s);
      for (const auto& [i, da] : inv[a]) {
        for (auto p : pairs_of_doc[i]) {
          for (const auto& [b, lv] : labels[pairs[p].label].entries) {
            int s = slot_of[b];
            if (s >= 0) affected[static_cast<std::size_t>(s)].emplace_back(p, da * lv);
          }
        }
      }
      for (const auto& e : entries) slot_of[e.first] = -1;

      for (std::size_t s = 0; s < entries.size(); ++s) {
        double w = entries[s].second;
        const auto& aff = affected[s];
        double grad = w, hess = 1.0;
        for (const auto& [p, c] : aff) {
          double y = pairs[p].y;
          double sg = sigmoid(margin[p]);
          grad += lambda * (-y) * sigmoid(-y * margin[p]) * c;
          hess += lambda * sg * (1.0 - sg) * c * c;
        }
        if (!std::isfinite(grad) || !std::isfinite(hess))
          throw Error(ErrorKind::kNumeric, "non-finite Newton step at entry " + entry_name(a, entries[s].first));
        if (grad == 0.0) continue;
        double step = std::clamp(-grad / hess, -1.0, 1.0);
        // Halve until the exact objective decreases along this coordinate.
        for (int attempt = 0; attempt < 30; ++attempt) {
          double delta = 0.5 * ((w + step) * (w + step) - w * w);
          for (const auto& [p, c] : aff) {
            double y = pairs[p].y;
            delta += lambda * (logistic_loss(y * (margin[p] + step * c)) -
                               logistic_loss(y * margin[p]));
          }
          if (delta < 0.0) {
            for (const auto& [p, c] : aff) margin[p] += step * c;
            w += step;
            break;
          }
          step *= 0.5;
        }
        if (!std::isfinite(w))
          throw Error(ErrorKind::kNumeric, "non-finite weight at entry " + entry_name(a, entries[s].first));
        entries[s].second = w;
      }
      std::erase_if(entries, [](const WeightMatrix::Entry& e) { return e.second == 0.0; });
      W.set_row(a, std::move(entries));
    }
    trace.push_back(total_objective());
  }
  return trace;
}

namespace {
WeightMatrix scaled(const WeightMatrix& W, double t) {
  WeightMatrix out(W.rows(), W.cols());
  for (std::size_t a = 0; a < W.rows(); ++a) {
    auto row = W.row(a);
    if (row.empty()) continue;
    std::vector<WeightMatrix::Entry> entries(row.begin(), row.end());
    for (auto& e : entries) e.second *= t;
    out.set_row(a, std::move(entries));
  }
  return out;
}
}  // namespace

WeightMatrix train(std::span<const TrainingPair> pairs, std::span<const SparseVector> docs,
                   std::span<const SparseVector> labels, const LearnerParams& params) {
  WeightMatrix W = approximate_phase(pairs, docs, labels, params);
  // The Phase-A entries are all set at once, so their joint step can
  // overshoot. Halve it while that lowers the objective, and never start
  // Phase B above the W=0 objective.
  const double at_zero = objective(WeightMatrix(W.rows(), W.cols()), pairs, docs, labels, params.lambda);
  double best = objective(W, pairs, docs, labels, params.lambda);
  for (int attempt = 0; attempt < 30; ++attempt) {
    WeightMatrix half = scaled(W, 0.5);
    double obj = objective(half, pairs, docs, labels, params.lambda);
    if (obj >= best && best <= at_zero) break;
    W = std::move(half);
    best = obj;
  }
  if (best > at_zero) W = WeightMatrix(W.rows(), W.cols());
  refine_phase(W, pairs, docs, labels, params);
  return W;
}

bool ranks_before(const ScoredLabel& a, const ScoredLabel& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.label < b.label;
}

std::vector<double> score_all(const SparseVector& d, std::span<const FeaturizedLabel> universe,
                              const WeightMatrix& W) {
  std::vector<double> u = W.project(d);
  std::vector<double> scores(universe.size(), 0.0);
  for (std::size_t j = 0; j < universe.size(); ++j) {
    const auto& l = universe[j].features;
    if (l.dim != W.cols()) throw Error(ErrorKind::kValidation, "label dimension does not match W cols");
    double s = 0.0;
    for (const auto& [b, v] : l.entries) s += v * u[b];
    scores[j] = s;
  }
  return scores;
}

std::vector<ScoredLabel> top_k_from_scores(std::span<const double> scores,
                                           std::span<const FeaturizedLabel> universe,
                                           std::size_t k) {
  if (universe.empty()) throw Error(ErrorKind::kValidation, "empty label universe");
  if (k == 0) throw Error(ErrorKind::kValidation, "k must be at least 1");
  std::vector<std::uint32_t> idx(universe.size());
  for (std::uint32_t j = 0; j < idx.size(); ++j) idx[j] = j;
  auto before = [&](std::uint32_t x, std::uint32_t y) {
    if (scores[x] != scores[y]) return scores[x] > scores[y];
    return universe[x].id < universe[y].id;
  };
  std::size_t n = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end(), before);
  std::vector<ScoredLabel> out;
  out.reserve(n);
  for (std::size_t r = 0; r < n; ++r) out.push_back({universe[idx[r]].id, scores[idx[r]]});
  return out;
}

std::vector<ScoredLabel> predict_topk(const SparseVector& d,
                                      std::span<const FeaturizedLabel> universe,
                                      const WeightMatrix& W, std::size_t k) {
  if (universe.empty()) throw Error(ErrorKind::kValidation, "empty label universe");
  auto scores = score_all(d, universe, W);
  return top_k_from_scores(scores, universe, k);
}

std::string serialize_model(const WeightMatrix& W, const ModelHeader& header) {
  std::string out;
  char buf[128];
  out += "vulnlib-model 1\n";
  std::snprintf(buf, sizeof buf, "rows %zu cols %zu nnz %zu\n", W.rows(), W.cols(), W.nnz());
  out += buf;
  std::snprintf(buf, sizeof buf, "K %zu lambda %a seed %" PRIu64 "\n", header.K, header.lambda,
                header.seed);
  out += buf;
  std::snprintf(buf, sizeof buf, "doc_vocab %016" PRIx64 " label_vocab %016" PRIx64 "\n",
                header.doc_vocab_checksum, header.label_vocab_checksum);
  out += buf;
  for (std::size_t a = 0; a < W.rows(); ++a) {
    auto row = W.row(a);
    if (row.empty()) continue;
    std::snprintf(buf, sizeof buf, "%zu %zu", a, row.size());
    out += buf;
    for (const auto& [b, w] : row) {
      std::snprintf(buf, sizeof buf, " %u:%a", b, w);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

WeightMatrix deserialize_model(std::string_view text, ModelHeader& header) {
  std::istringstream in{std::string(text)};
  auto fail = [](const std::string& why) -> WeightMatrix {
    throw Error(ErrorKind::kParse, "model file: " + why);
  };
  std::string magic, tag;
  int version = 0;
  if (!(in >> magic >> version) || magic != "vulnlib-model") return fail("bad header");
  if (version != 1) throw Error(ErrorKind::kModelMismatch, "model file: unsupported version");
  std::size_t rows = 0, cols = 0, nnz = 0;
  std::string lambda_text, doc_ck, label_ck;
  if (!(in >> tag >> rows >> tag >> cols >> tag >> nnz)) return fail("bad dimensions");
  if (!(in >> tag >> header.K >> tag >> lambda_text >> tag >> header.seed)) return fail("bad parameters");
  if (!(in >> tag >> doc_ck >> tag >> label_ck)) return fail("bad checksums");
  header.lambda = std::strtod(lambda_text.c_str(), nullptr);
  header.doc_vocab_checksum = std::strtoull(doc_ck.c_str(), nullptr, 16);
  header.label_vocab_checksum = std::strtoull(label_ck.c_str(), nullptr, 16);
  WeightMatrix W(rows, cols);
  std::size_t seen = 0;
  std::size_t a = 0, n = 0;
  while (in >> a >> n) {
    if (a >= rows) return fail("row index out of range");
    std::vector<WeightMatrix::Entry> entries;
    entries.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      std::string item;
      if (!(in >> item)) return fail("truncated row");
      auto colon = item.find(':');
      if (colon == std::string::npos) return fail("bad entry '" + item + "'");
      auto col = static_cast<ColumnId>(std::strtoul(item.substr(0, colon).c_str(), nullptr, 10));
      double w = std::strtod(item.c_str() + colon + 1, nullptr);
      entries.emplace_back(col, w);
    }
    seen += entries.size();
    W.set_row(a, std::move(entries));
  }
  if (seen != nnz) return fail("entry count does not match header");
  return W;
}

}  // namespace vulnlib
