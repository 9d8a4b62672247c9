// embeddings.hpp - pre-trained word vectors and label-to-vector encoding.
#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace otmatch {

// Immutable token -> vector map loaded from a word2vec/fasttext-style text
// file. Safe to share across threads after load.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  explicit EmbeddingStore(std::size_t dimension) : dim_(dimension) {}

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return entries_.size(); }

  // nullptr when the token is absent; never fabricates a vector.
  const std::vector<double>* find(const std::string& token) const;

  // Used by tests and synthetic-data tooling. Vector length must match the
  // store dimension (the first insert fixes it when constructed empty).
  void insert(std::string token, std::vector<double> vec);

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> entries_;
};

// Text format: optional first line "<vocab_count> <dimension>", then one line
// per token: "<token> <v1> ... <vd>", single-space separated decimal floats.
// Headerless files infer the dimension from the first row. Malformed rows,
// arity violations, and non-finite values raise ParseError naming the line.
EmbeddingStore load_embeddings(const std::string& path);

struct LabelTokens {
  std::string original;
  std::vector<std::string> tokens;  // lowercase, alphanumeric only
};

// Splits on underscores, hyphens, whitespace, and camelCase boundaries;
// strips remaining non-alphanumeric characters; lowercases. Stopwords are
// kept. Deterministic and idempotent on its own space-joined output.
LabelTokens normalize_label(std::string_view label);

// Optional token -> replacement-tokens table for label augmentation.
using SynonymMap = std::unordered_map<std::string, std::vector<std::string>>;

// One entry per line: "<token>\t<rep1> <rep2> ...". '#' lines are comments.
SynonymMap load_synonyms(const std::string& path);

// Tokens present in the map are replaced by their expansion; others pass
// through unchanged.
std::vector<std::string> apply_synonyms(const std::vector<std::string>& tokens,
                                        const SynonymMap& synonyms);

struct ElementEmbedding {
  std::vector<double> mean_vector;  // zero vector when degenerate
  std::vector<std::pair<std::string, std::vector<double>>> token_vectors;
  std::vector<std::string> oov_tokens;
  bool degenerate = false;  // every token missed the store (or no tokens)
};

// Mean of the in-vocabulary token vectors. Missing tokens are skipped and
// recorded; when everything misses the result is a flagged zero vector. The
// mean is accumulated in sorted-token order so it is invariant, bit for bit,
// under permutations of the token list.
ElementEmbedding embed_element(const LabelTokens& tokens,
                               const EmbeddingStore& store);

}  // namespace otmatch
