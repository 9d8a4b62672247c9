#include "otmatch/matching.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace otmatch {

namespace {

struct KindPartition {
  std::vector<std::string> iris;
  std::vector<std::vector<double>> means;
  std::vector<bool> degenerate;
};

KindPartition embed_partition(const Ontology& onto, ElementKind kind,
                              const EmbeddingStore& store,
                              const SynonymMap* synonyms) {
  KindPartition part;
  for (const OntologyElement* e : onto.elements_of_kind(kind)) {
    LabelTokens tokens = normalize_label(e->label);
    if (synonyms != nullptr) {
      tokens.tokens = apply_synonyms(tokens.tokens, *synonyms);
    }
    ElementEmbedding emb = embed_element(tokens, store);
    part.iris.push_back(e->iri);
    part.means.push_back(std::move(emb.mean_vector));
    part.degenerate.push_back(emb.degenerate);
  }
  return part;
}

}  // namespace

GlobalCoupleResult global_couple(const Ontology& source, const Ontology& target,
                                 const EmbeddingStore& store, Weighting weighting,
                                 const SinkhornOptions& opts,
                                 const SynonymMap* synonyms) {
  GlobalCoupleResult out;
  out.source_onto = source.id;
  out.target_onto = target.id;

  const ElementKind kinds[] = {ElementKind::Class, ElementKind::ObjectProperty,
                               ElementKind::DatatypeProperty};
  for (ElementKind kind : kinds) {
    KindPartition src = embed_partition(source, kind, store, synonyms);
    KindPartition tgt = embed_partition(target, kind, store, synonyms);
    if (src.iris.empty() || tgt.iris.empty()) {
      if (!src.iris.empty() || !tgt.iris.empty()) {
        out.warnings.push_back(std::string("partition '") + to_string(kind) +
                               "' skipped: no elements on " +
                               (src.iris.empty() ? "source" : "target") + " side");
      }
      continue;
    }

    KindCoupling kc;
    kc.kind = kind;
    kc.source_iris = std::move(src.iris);
    kc.target_iris = std::move(tgt.iris);
    kc.cost = euclidean_cost(src.means, tgt.means);
    penalize_degenerate(kc.cost, src.degenerate, tgt.degenerate);

    Marginal mu = weighting == Weighting::Uniform
                      ? uniform_marginal(kc.source_iris.size())
                      : inverse_min_distance_marginal(kc.cost, MarginalSide::Source);
    Marginal nu = weighting == Weighting::Uniform
                      ? uniform_marginal(kc.target_iris.size())
                      : inverse_min_distance_marginal(kc.cost, MarginalSide::Target);
    kc.coupling = sinkhorn(kc.cost, mu, nu, opts);
    out.partitions.push_back(std::move(kc));
  }

  if (out.partitions.empty()) {
    throw std::invalid_argument(
        "global_couple: no element-kind partition is populated on both sides");
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> mnn_pairs(const Matrix& plan) {
  const std::size_t n = plan.rows();
  const std::size_t m = plan.cols();
  // first argmax per row and per column; "first" implements the
  // lower-index tie rule
  std::vector<std::size_t> row_arg(n, 0);
  std::vector<std::size_t> col_arg(m, 0);
  std::vector<double> col_best(m, -1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = plan.row(i);
    double best = row[0];
    for (std::size_t j = 1; j < m; ++j) {
      if (row[j] > best) {
        best = row[j];
        row_arg[i] = j;
      }
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (row[j] > col_best[j]) {
        col_best[j] = row[j];
        col_arg[j] = i;
      }
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = row_arg[i];
    if (col_arg[j] == i) pairs.emplace_back(i, j);
  }
  return pairs;
}

std::vector<std::vector<std::size_t>> topk_indices(const Matrix& plan, int k) {
  if (k < 1) throw std::invalid_argument("topk_indices: k must be >= 1");
  const std::size_t n = plan.rows();
  const std::size_t m = plan.cols();
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), m);

  std::vector<std::vector<std::size_t>> out(n);
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = plan.row(i);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + static_cast<long>(kk), order.end(),
                      [row](std::size_t a, std::size_t b) {
                        if (row[a] != row[b]) return row[a] > row[b];
                        return a < b;
                      });
    out[i].assign(order.begin(), order.begin() + static_cast<long>(kk));
  }
  return out;
}

namespace {

void append_candidates(CandidateSet& set, const KindCoupling& kc,
                       const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  for (auto [i, j] : pairs) {
    Candidate c;
    c.source_iri = kc.source_iris[i];
    c.target_iri = kc.target_iris[j];
    c.coupling_mass = kc.coupling.plan(i, j);
    c.label_euclidean = kc.cost(i, j);
    set.candidates.push_back(std::move(c));
  }
}

}  // namespace

CandidateSet mnn_extract(const GlobalCoupleResult& global) {
  CandidateSet set;
  set.method = ExtractionMethod::Mnn;
  set.source_onto = global.source_onto;
  set.target_onto = global.target_onto;
  for (const KindCoupling& kc : global.partitions) {
    append_candidates(set, kc, mnn_pairs(kc.coupling.plan));
  }
  return set;
}

CandidateSet topk_extract(const GlobalCoupleResult& global, int k) {
  CandidateSet set;
  set.method = ExtractionMethod::TopK;
  set.k = k;
  set.source_onto = global.source_onto;
  set.target_onto = global.target_onto;
  for (const KindCoupling& kc : global.partitions) {
    const auto rows = topk_indices(kc.coupling.plan, k);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j : rows[i]) pairs.emplace_back(i, j);
    }
    append_candidates(set, kc, pairs);
  }
  return set;
}

}  // namespace otmatch
