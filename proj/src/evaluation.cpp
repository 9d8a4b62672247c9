#include "otmatch/evaluation.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "otmatch/error.hpp"
#include "otmatch/transport.hpp"

namespace otmatch {

ReferenceAlignment load_reference(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open reference file");
  ReferenceAlignment ref;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected '<source_iri>\\t<target_iri>'");
    }
    ref.pairs.emplace(line.substr(0, tab), line.substr(tab + 1));
  }
  return ref;
}

namespace {

// value of rdf:resource="..." anywhere inside `piece`
std::string resource_attr(const std::string& piece) {
  const std::size_t at = piece.find("rdf:resource");
  if (at == std::string::npos) return {};
  const std::size_t q1 = piece.find_first_of("\"'", at);
  if (q1 == std::string::npos) return {};
  const std::size_t q2 = piece.find(piece[q1], q1 + 1);
  if (q2 == std::string::npos) return {};
  return piece.substr(q1 + 1, q2 - q1 - 1);
}

std::string tag_content(const std::string& cell, const std::string& tag) {
  const std::size_t open = cell.find("<" + tag);
  if (open == std::string::npos) return {};
  const std::size_t gt = cell.find('>', open);
  const std::size_t close = cell.find("</" + tag, gt);
  if (gt == std::string::npos || close == std::string::npos) return {};
  return cell.substr(gt + 1, close - gt - 1);
}

}  // namespace

ReferenceAlignment load_reference_oaei(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open reference file");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());

  ReferenceAlignment ref;
  std::size_t pos = 0;
  while (true) {
    const std::size_t open = text.find("<Cell", pos);
    if (open == std::string::npos) break;
    const std::size_t close = text.find("</Cell>", open);
    if (close == std::string::npos) break;
    const std::string cell = text.substr(open, close - open);
    pos = close + 7;

    std::string relation = tag_content(cell, "relation");
    // trim
    const auto l = relation.find_first_not_of(" \t\r\n");
    const auto r = relation.find_last_not_of(" \t\r\n");
    relation = l == std::string::npos ? std::string{} : relation.substr(l, r - l + 1);
    if (relation != "=") continue;

    const std::size_t e1 = cell.find("entity1");
    const std::size_t e2 = cell.find("entity2");
    if (e1 == std::string::npos || e2 == std::string::npos) continue;
    const std::string s = resource_attr(cell.substr(e1));
    const std::string t = resource_attr(cell.substr(e2));
    if (!s.empty() && !t.empty()) ref.pairs.emplace(s, t);
  }
  return ref;
}

EvalReport evaluate(const Alignment& alignment, const ReferenceAlignment& reference) {
  EvalReport rep;
  rep.threshold = alignment.threshold;
  rep.predicted = alignment.correspondences.size();
  rep.reference = reference.pairs.size();
  for (const auto& c : alignment.correspondences) {
    if (reference.pairs.count({c.source_iri, c.target_iri}) != 0) ++rep.true_positive;
  }
  rep.precision = rep.predicted == 0
                      ? 1.0
                      : static_cast<double>(rep.true_positive) /
                            static_cast<double>(rep.predicted);
  rep.recall = rep.reference == 0
                   ? 1.0
                   : static_cast<double>(rep.true_positive) /
                         static_cast<double>(rep.reference);
  rep.f1 = rep.precision + rep.recall > 0.0
               ? 2.0 * rep.precision * rep.recall / (rep.precision + rep.recall)
               : 0.0;
  return rep;
}

std::pair<EvalReport, std::vector<EvalReport>> threshold_sweep(
    const std::vector<ScoredCandidate>& scored, const ReferenceAlignment& reference) {
  std::vector<EvalReport> curve;
  curve.reserve(101);
  EvalReport best;
  bool have_best = false;
  for (int i = 0; i <= 100; ++i) {
    const double t = static_cast<double>(i) / 100.0;
    EvalReport rep = evaluate(filter_alignment(scored, t), reference);
    rep.threshold = t;
    if (!have_best || rep.f1 > best.f1) {
      best = rep;
      have_best = true;
    }
    curve.push_back(rep);
  }
  return {best, curve};
}

double jaccard_similarity(std::size_t n_source, std::size_t n_target,
                          std::size_t n_matchings) {
  if (n_matchings > std::min(n_source, n_target)) {
    throw std::invalid_argument(
        "jaccard_similarity: more matchings than elements on one side");
  }
  const double denom = static_cast<double>(n_source) + static_cast<double>(n_target) -
                       static_cast<double>(n_matchings);
  if (denom <= 0.0) {
    throw std::invalid_argument("jaccard_similarity: both ontologies are empty");
  }
  return static_cast<double>(n_matchings) / denom;
}

OntologySimilarity ontology_similarity(const Ontology& source, const Ontology& target,
                                       const EmbeddingStore& store,
                                       const OntologySimilarityOptions& opts) {
  auto class_embeddings = [&](const Ontology& onto,
                              std::vector<std::vector<double>>& means,
                              std::vector<bool>& degenerate) {
    for (const OntologyElement* e : onto.elements_of_kind(ElementKind::Class)) {
      LabelTokens tokens = normalize_label(e->label);
      if (opts.synonyms != nullptr) {
        tokens.tokens = apply_synonyms(tokens.tokens, *opts.synonyms);
      }
      ElementEmbedding emb = embed_element(tokens, store);
      means.push_back(std::move(emb.mean_vector));
      degenerate.push_back(emb.degenerate);
    }
  };
  std::vector<std::vector<double>> xs, ys;
  std::vector<bool> xdeg, ydeg;
  class_embeddings(source, xs, xdeg);
  class_embeddings(target, ys, ydeg);
  if (xs.empty() || ys.empty()) {
    throw std::invalid_argument("ontology_similarity: both ontologies need classes");
  }

  Matrix cost = euclidean_cost(xs, ys);
  penalize_degenerate(cost, xdeg, ydeg);
  const Marginal mu = uniform_marginal(xs.size());
  const Marginal nu = uniform_marginal(ys.size());

  OntologySimilarity out;
  out.wd = cost.size() <= 10000 ? exact_ot(cost, mu, nu).wd
                                : sinkhorn(cost, mu, nu, opts.sinkhorn).wd;
  out.ws = std::exp(-out.wd);
  return out;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("pearson: length mismatch");
  }
  if (xs.size() < 2) {
    throw std::invalid_argument("pearson: need at least two points");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw std::invalid_argument("pearson: zero variance");
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace otmatch
