// evaluation.hpp - precision/recall/F1 against references, threshold sweeps,
// and ontology-level Wasserstein/Jaccard similarity.
#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "otmatch/embeddings.hpp"
#include "otmatch/ontology.hpp"
#include "otmatch/refinement.hpp"

namespace otmatch {

enum class EvalScope { ClassesOnly, All };

struct ReferenceAlignment {
  std::set<std::pair<std::string, std::string>> pairs;
  EvalScope scope = EvalScope::All;
};

// One pair per line, tab-separated iris; '#' lines are comments.
ReferenceAlignment load_reference(const std::string& path);

// Thin reader for the OAEI alignment XML format: extracts entity1/entity2 of
// cells whose relation is "=" and ignores everything else.
ReferenceAlignment load_reference_oaei(const std::string& path);

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double threshold = 0.0;
  std::size_t true_positive = 0;
  std::size_t predicted = 0;
  std::size_t reference = 0;
};

// Exact set-intersection counting over (source_iri, target_iri) pairs.
// Precision defaults to 1 when nothing was predicted (and recall to 1 when
// the reference is empty); F1 is 0 whenever P+R is.
EvalReport evaluate(const Alignment& alignment, const ReferenceAlignment& reference);

// Evaluates filter_alignment at thresholds 0.00, 0.01, ..., 1.00. Returns the
// report with the best F1 (ties: lowest threshold) plus the 101-point curve.
std::pair<EvalReport, std::vector<EvalReport>> threshold_sweep(
    const std::vector<ScoredCandidate>& scored, const ReferenceAlignment& reference);

// |M| / (|O_S| + |O_T| - |M|); requires n_matchings <= min(n_source, n_target)
// and a nonzero denominator.
double jaccard_similarity(std::size_t n_source, std::size_t n_target,
                          std::size_t n_matchings);

struct OntologySimilarityOptions {
  SinkhornOptions sinkhorn;   // used past the exact-oracle size guard
  const SynonymMap* synonyms = nullptr;
};

// Wasserstein distance between the two ontologies' class-embedding sets under
// uniform weights, and its e^{-wd} similarity.
struct OntologySimilarity {
  double wd = 0.0;
  double ws = 0.0;
};
OntologySimilarity ontology_similarity(const Ontology& source, const Ontology& target,
                                       const EmbeddingStore& store,
                                       const OntologySimilarityOptions& opts = {});

// Sample Pearson correlation; throws on length mismatch, fewer than two
// points, or zero variance.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace otmatch
