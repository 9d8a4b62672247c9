// refinement.hpp - context-based Wasserstein refinement of candidate matchings.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "otmatch/embeddings.hpp"
#include "otmatch/matching.hpp"
#include "otmatch/ontology.hpp"
#include "otmatch/transport.hpp"

namespace otmatch {

// Distance -> similarity conversion used for every component: e^{-x}.
double to_similarity(double distance);

// Levenshtein distance divided by max(len(a), len(b)); 0 for two empty strings.
double levenshtein_norm(std::string_view a, std::string_view b);

// Which similarity components a metric multiplies together.
struct InteractionSpec {
  std::string name;
  bool use_string = false;
  bool use_euclidean = false;
  bool use_label_wd = false;
  bool use_local_wd = false;
};

// Known metric names: string-distance, euclidean-distance, label-wd-distance,
// string-context-distance (default), euclidean-context-distance,
// label-wd-context-distance, all-interactions. Unknown names throw
// std::invalid_argument.
InteractionSpec parse_metric(const std::string& name);
std::vector<std::string> known_metrics();

struct RefineOptions {
  InteractionSpec metric = parse_metric("string-context-distance");
  SinkhornOptions sinkhorn;        // for OT solves past the exact-size cutoff
  std::size_t exact_max_triples = 12;  // localWD uses the exact oracle up to here
  const SynonymMap* synonyms = nullptr;
  unsigned threads = 0;  // 0 = hardware concurrency
};

// Wasserstein distance between the two triples' 3-point label-embedding sets
// (subject, predicate, object; uniform weights, Euclidean ground costs,
// degenerate-embedding penalty). Solved exactly.
double pair_wd(const ContextTriple& a, const ContextTriple& b,
               const EmbeddingStore& store, const SynonymMap* synonyms = nullptr);

// Wasserstein distance between two context triple sets with pair_wd entries
// as ground costs. Either context empty falls back to `empty_fallback`
// (callers pass the Euclidean distance between the two elements' mean label
// embeddings). Both contexts within `exact_max_triples` solve exactly,
// larger ones entropically.
double local_wd(const std::vector<ContextTriple>& ctx_source,
                const std::vector<ContextTriple>& ctx_target,
                const EmbeddingStore& store, double empty_fallback,
                const RefineOptions& opts = {});

struct ScoredCandidate {
  Candidate candidate;
  double string_sim = 0.0;    // e^{-normalized edit distance} of space-joined tokens
  double euclid_sim = 0.0;    // e^{-|mean_s - mean_t|}
  double label_wd_sim = 0.0;  // e^{-WD(token vector sets)}
  double local_wd_sim = 0.0;  // e^{-localWD}
  std::vector<std::string> interaction;  // component names that were multiplied
  double final_score = 0.0;   // product of the interaction components
};

std::vector<ScoredCandidate> score_candidates(const CandidateSet& candidates,
                                              const Ontology& source,
                                              const Ontology& target,
                                              const EmbeddingStore& store,
                                              const RefineOptions& opts = {});

struct Correspondence {
  std::string source_iri;
  std::string target_iri;
  double score = 0.0;
};

struct Alignment {
  std::vector<Correspondence> correspondences;
  double threshold = 0.0;
  std::string metric_name;
};

// Drops candidates below the threshold, then reduces to one-to-one by greedy
// selection in descending score (ties: lexicographic iri order). Threshold
// outside [0,1] throws std::invalid_argument.
Alignment filter_alignment(const std::vector<ScoredCandidate>& scored,
                           double threshold, const std::string& metric_name = {});

}  // namespace otmatch
