#include "otmatch/embeddings.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "otmatch/error.hpp"

namespace otmatch {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
      ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r')
      ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

bool parse_double(std::string_view s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_size(std::string_view s, std::size_t& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

[[noreturn]] void fail(const std::string& path, std::size_t line,
                       const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

const std::vector<double>* EmbeddingStore::find(const std::string& token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? nullptr : &it->second;
}

void EmbeddingStore::insert(std::string token, std::vector<double> vec) {
  if (dim_ == 0 && entries_.empty()) dim_ = vec.size();
  if (vec.size() != dim_) {
    throw std::invalid_argument("EmbeddingStore::insert: vector of length " +
                                std::to_string(vec.size()) + " into store of dimension " +
                                std::to_string(dim_));
  }
  entries_[std::move(token)] = std::move(vec);
}

EmbeddingStore load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open word-vector file");

  std::string line;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  bool saw_any_row = false;
  EmbeddingStore store;

  // peek at the first non-empty line: two integer fields mean a header
  std::streampos after_header = in.tellg();
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_ws(line);
    if (fields.empty()) {
      after_header = in.tellg();
      continue;
    }
    std::size_t count = 0, hdim = 0;
    if (fields.size() == 2 && parse_size(fields[0], count) &&
        parse_size(fields[1], hdim)) {
      if (hdim == 0) fail(path, lineno, "header declares dimension 0");
      dim = hdim;
    } else {
      // headerless: rewind so the row is parsed below
      in.clear();
      in.seekg(after_header);
      --lineno;
    }
    break;
  }

  std::vector<double> vec;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() < 2) fail(path, lineno, "row has no vector components");
    if (dim == 0) {
      dim = fields.size() - 1;
    } else if (fields.size() - 1 != dim) {
      fail(path, lineno,
           "expected " + std::to_string(dim) + " components, found " +
               std::to_string(fields.size() - 1));
    }
    vec.clear();
    vec.reserve(dim);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      double v = 0.0;
      if (!parse_double(fields[k], v)) {
        fail(path, lineno, "bad float '" + std::string(fields[k]) + "'");
      }
      if (!std::isfinite(v)) {
        fail(path, lineno, "non-finite component '" + std::string(fields[k]) + "'");
      }
      vec.push_back(v);
    }
    if (!saw_any_row) {
      store = EmbeddingStore(dim);
      saw_any_row = true;
    }
    store.insert(std::string(fields[0]), vec);
  }

  if (!saw_any_row) throw ParseError(path + ": no word vectors found");
  return store;
}

LabelTokens normalize_label(std::string_view label) {
  LabelTokens out;
  out.original = std::string(label);

  auto is_upper = [](unsigned char c) { return c < 0x80 && std::isupper(c); };
  auto is_lower = [](unsigned char c) {
    // bytes >= 0x80 (UTF-8 continuation/lead) pass through as letter-like
    return c >= 0x80 || std::islower(c);
  };
  auto is_alnum = [](unsigned char c) { return c >= 0x80 || std::isalnum(c); };

  std::string token;
  auto flush = [&] {
    if (!token.empty()) {
      out.tokens.push_back(token);
      token.clear();
    }
  };

  const std::size_t n = label.size();
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char c = static_cast<unsigned char>(label[i]);
    if (!is_alnum(c)) {
      flush();
      continue;
    }
    if (!token.empty() && is_upper(c)) {
      const unsigned char prev = static_cast<unsigned char>(label[i - 1]);
      const bool lower_to_upper = is_lower(prev) || std::isdigit(prev);
      const bool acronym_end = is_upper(prev) && i + 1 < n &&
                               is_lower(static_cast<unsigned char>(label[i + 1])) &&
                               static_cast<unsigned char>(label[i + 1]) < 0x80;
      if (lower_to_upper || acronym_end) flush();
    }
    token.push_back(c < 0x80 ? static_cast<char>(std::tolower(c))
                             : static_cast<char>(c));
  }
  flush();
  return out;
}

SynonymMap load_synonyms(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open synonym file");
  SynonymMap map;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      fail(path, lineno, "expected '<token>\\t<replacements>'");
    }
    std::string token = line.substr(0, tab);
    auto reps = split_ws(std::string_view(line).substr(tab + 1));
    if (token.empty() || reps.empty()) {
      fail(path, lineno, "empty token or replacement list");
    }
    std::vector<std::string> replacement;
    replacement.reserve(reps.size());
    for (auto r : reps) replacement.emplace_back(r);
    map[std::move(token)] = std::move(replacement);
  }
  return map;
}

std::vector<std::string> apply_synonyms(const std::vector<std::string>& tokens,
                                        const SynonymMap& synonyms) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto it = synonyms.find(t);
    if (it == synonyms.end()) {
      out.push_back(t);
    } else {
      out.insert(out.end(), it->second.begin(), it->second.end());
    }
  }
  return out;
}

ElementEmbedding embed_element(const LabelTokens& tokens,
                               const EmbeddingStore& store) {
  ElementEmbedding out;
  for (const auto& tok : tokens.tokens) {
    if (const std::vector<double>* v = store.find(tok)) {
      out.token_vectors.emplace_back(tok, *v);
    } else {
      out.oov_tokens.push_back(tok);
    }
  }

  out.mean_vector.assign(store.dimension(), 0.0);
  if (out.token_vectors.empty()) {
    out.degenerate = true;
    return out;
  }

  // accumulate in sorted-token order: the mean is then bitwise identical for
  // any permutation of the input tokens
  std::vector<std::size_t> order(out.token_vectors.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return out.token_vectors[a].first < out.token_vectors[b].first;
  });
  for (std::size_t idx : order) {
    const auto& v = out.token_vectors[idx].second;
    for (std::size_t k = 0; k < v.size(); ++k) out.mean_vector[k] += v[k];
  }
  const double inv = 1.0 / static_cast<double>(out.token_vectors.size());
  for (double& x : out.mean_vector) x *= inv;
  return out;
}

}  // namespace otmatch
