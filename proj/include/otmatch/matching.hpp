// matching.hpp - global coupling over two ontologies and candidate extraction.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "otmatch/embeddings.hpp"
#include "otmatch/ontology.hpp"
#include "otmatch/transport.hpp"

namespace otmatch {

struct Candidate {
  std::string source_iri;
  std::string target_iri;
  double coupling_mass = 0.0;
  double label_euclidean = 0.0;  // ground-cost entry for the pair
  std::map<std::string, double> scores;  // named components, filled by refinement
};

enum class ExtractionMethod { Mnn, TopK };

struct CandidateSet {
  ExtractionMethod method = ExtractionMethod::TopK;
  int k = 0;  // meaningful for TopK
  std::string source_onto, target_onto;
  std::vector<Candidate> candidates;
};

enum class Weighting { Uniform, InverseMinDistance };

// One solved transport problem per element kind.
struct KindCoupling {
  ElementKind kind = ElementKind::Class;
  std::vector<std::string> source_iris, target_iris;  // row/column orderings
  Matrix cost;
  Coupling coupling;
};

struct GlobalCoupleResult {
  std::string source_onto, target_onto;
  std::vector<KindCoupling> partitions;
  std::vector<std::string> warnings;  // kinds skipped for lack of elements
};

// Solves one OT problem per element-kind partition (classes against classes,
// properties against properties of the same kind) with Euclidean ground costs
// over mean label embeddings. A kind missing on either side is skipped with a
// warning; all kinds empty is an error.
GlobalCoupleResult global_couple(const Ontology& source, const Ontology& target,
                                 const EmbeddingStore& store, Weighting weighting,
                                 const SinkhornOptions& opts = {},
                                 const SynonymMap* synonyms = nullptr);

// Index-level extractors. Ties break toward the lower column (then row)
// index. mnn_pairs returns cells that are simultaneously their row's and
// column's first argmax; topk_indices returns, per row, the k columns with
// the largest entries (all of them when k >= cols), ordered by descending
// mass then ascending column.
std::vector<std::pair<std::size_t, std::size_t>> mnn_pairs(const Matrix& plan);
std::vector<std::vector<std::size_t>> topk_indices(const Matrix& plan, int k);

// Candidate-set assembly over all partitions of a global coupling.
CandidateSet mnn_extract(const GlobalCoupleResult& global);
CandidateSet topk_extract(const GlobalCoupleResult& global, int k);

}  // namespace otmatch
