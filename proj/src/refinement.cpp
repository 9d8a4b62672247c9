#include "otmatch/refinement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "otmatch/kernels.hpp"
#include "otmatch/parallel.hpp"

namespace otmatch {

double to_similarity(double distance) { return std::exp(-distance); }

double levenshtein_norm(std::string_view a, std::string_view b) {
  const std::size_t la = a.size();
  const std::size_t lb = b.size();
  if (la == 0 && lb == 0) return 0.0;
  if (la == 0 || lb == 0) return 1.0;

  std::vector<std::size_t> prev(lb + 1), cur(lb + 1);
  for (std::size_t j = 0; j <= lb; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= la; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= lb; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[lb]) / static_cast<double>(std::max(la, lb));
}

InteractionSpec parse_metric(const std::string& name) {
  InteractionSpec spec;
  spec.name = name;
  if (name == "string-distance") {
    spec.use_string = true;
  } else if (name == "euclidean-distance") {
    spec.use_euclidean = true;
  } else if (name == "label-wd-distance") {
    spec.use_label_wd = true;
  } else if (name == "string-context-distance") {
    spec.use_string = spec.use_local_wd = true;
  } else if (name == "euclidean-context-distance") {
    spec.use_euclidean = spec.use_local_wd = true;
  } else if (name == "label-wd-context-distance") {
    spec.use_label_wd = spec.use_local_wd = true;
  } else if (name == "all-interactions") {
    spec.use_string = spec.use_euclidean = spec.use_label_wd = spec.use_local_wd = true;
  } else {
    throw std::invalid_argument("unknown metric '" + name + "'");
  }
  return spec;
}

std::vector<std::string> known_metrics() {
  return {"string-distance",
          "euclidean-distance",
          "label-wd-distance",
          "string-context-distance",
          "euclidean-context-distance",
          "label-wd-context-distance",
          "all-interactions"};
}

namespace {

struct PositionEmbeds {
  std::array<std::vector<double>, 3> means;
  std::array<bool, 3> degenerate{};
};

ElementEmbedding embed_label(const std::string& label, const EmbeddingStore& store,
                             const SynonymMap* synonyms) {
  LabelTokens tokens = normalize_label(label);
  if (synonyms != nullptr) tokens.tokens = apply_synonyms(tokens.tokens, *synonyms);
  return embed_element(tokens, store);
}

PositionEmbeds embed_triple(const ContextTriple& t, const EmbeddingStore& store,
                            const SynonymMap* synonyms) {
  PositionEmbeds out;
  const std::string* labels[3] = {&t.subject_label, &t.predicate_label,
                                  &t.object_label};
  for (int p = 0; p < 3; ++p) {
    ElementEmbedding e = embed_label(*labels[p], store, synonyms);
    out.means[p] = std::move(e.mean_vector);
    out.degenerate[p] = e.degenerate;
  }
  return out;
}

double pair_wd_embedded(const PositionEmbeds& a, const PositionEmbeds& b) {
  const std::vector<std::vector<double>> xs(a.means.begin(), a.means.end());
  const std::vector<std::vector<double>> ys(b.means.begin(), b.means.end());
  Matrix cost = euclidean_cost(xs, ys);
  penalize_degenerate(cost,
                      {a.degenerate[0], a.degenerate[1], a.degenerate[2]},
                      {b.degenerate[0], b.degenerate[1], b.degenerate[2]});
  return exact_ot(cost, uniform_marginal(3), uniform_marginal(3)).wd;
}

// OT distance between two small point sets, uniform weights. Exact within the
// oracle's size guard, entropic beyond it.
double point_set_wd(const std::vector<std::vector<double>>& xs,
                    const std::vector<std::vector<double>>& ys,
                    const SinkhornOptions& entropic) {
  const Matrix cost = euclidean_cost(xs, ys);
  const Marginal mu = uniform_marginal(xs.size());
  const Marginal nu = uniform_marginal(ys.size());
  if (cost.size() <= 10000) return exact_ot(cost, mu, nu).wd;
  return sinkhorn(cost, mu, nu, entropic).wd;
}

}  // namespace

double pair_wd(const ContextTriple& a, const ContextTriple& b,
               const EmbeddingStore& store, const SynonymMap* synonyms) {
  return pair_wd_embedded(embed_triple(a, store, synonyms),
                          embed_triple(b, store, synonyms));
}

double local_wd(const std::vector<ContextTriple>& ctx_source,
                const std::vector<ContextTriple>& ctx_target,
                const EmbeddingStore& store, double empty_fallback,
                const RefineOptions& opts) {
  if (ctx_source.empty() || ctx_target.empty()) return empty_fallback;

  std::vector<PositionEmbeds> src, tgt;
  src.reserve(ctx_source.size());
  tgt.reserve(ctx_target.size());
  for (const auto& t : ctx_source) src.push_back(embed_triple(t, store, opts.synonyms));
  for (const auto& t : ctx_target) tgt.push_back(embed_triple(t, store, opts.synonyms));

  Matrix cost(src.size(), tgt.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (std::size_t j = 0; j < tgt.size(); ++j) {
      cost(i, j) = pair_wd_embedded(src[i], tgt[j]);
    }
  }

  const Marginal mu = uniform_marginal(src.size());
  const Marginal nu = uniform_marginal(tgt.size());
  if (src.size() <= opts.exact_max_triples && tgt.size() <= opts.exact_max_triples) {
    return exact_ot(cost, mu, nu).wd;
  }
  return sinkhorn(cost, mu, nu, opts.sinkhorn).wd;
}

namespace {

struct ElementView {
  std::string joined_tokens;
  std::vector<double> mean;
  bool degenerate = false;
  std::vector<std::vector<double>> token_vectors;
  std::vector<ContextTriple> context;
};

std::unordered_map<std::string, ElementView> build_views(
    const Ontology& onto, const std::set<std::string>& iris,
    const EmbeddingStore& store, const SynonymMap* synonyms) {
  std::unordered_map<std::string, ElementView> views;
  for (const std::string& iri : iris) {
    const OntologyElement* e = onto.find(iri);
    if (e == nullptr) {
      throw std::invalid_argument("score_candidates: candidate references unknown iri '" +
                                  iri + "' in ontology '" + onto.id + "'");
    }
    ElementView view;
    LabelTokens tokens = normalize_label(e->label);
    if (synonyms != nullptr) tokens.tokens = apply_synonyms(tokens.tokens, *synonyms);
    ElementEmbedding emb = embed_element(tokens, store);

    std::string joined;
    for (std::size_t i = 0; i < tokens.tokens.size(); ++i) {
      if (i > 0) joined += ' ';
      joined += tokens.tokens[i];
    }
    view.joined_tokens = std::move(joined);
    view.mean = std::move(emb.mean_vector);
    view.degenerate = emb.degenerate;
    for (auto& [tok, vec] : emb.token_vectors) view.token_vectors.push_back(vec);
    view.context = extract_context(onto, iri);
    views.emplace(iri, std::move(view));
  }
  return views;
}

}  // namespace

std::vector<ScoredCandidate> score_candidates(const CandidateSet& candidates,
                                              const Ontology& source,
                                              const Ontology& target,
                                              const EmbeddingStore& store,
                                              const RefineOptions& opts) {
  std::set<std::string> src_iris, tgt_iris;
  for (const Candidate& c : candidates.candidates) {
    src_iris.insert(c.source_iri);
    tgt_iris.insert(c.target_iri);
  }
  const auto src_views = build_views(source, src_iris, store, opts.synonyms);
  const auto tgt_views = build_views(target, tgt_iris, store, opts.synonyms);

  std::vector<std::string> component_names;
  if (opts.metric.use_string) component_names.push_back("string");
  if (opts.metric.use_euclidean) component_names.push_back("euclidean");
  if (opts.metric.use_label_wd) component_names.push_back("label-wd");
  if (opts.metric.use_local_wd) component_names.push_back("local-wd");

  std::vector<ScoredCandidate> out(candidates.candidates.size());
  parallel_for(
      0, candidates.candidates.size(),
      [&](std::size_t idx) {
        const Candidate& cand = candidates.candidates[idx];
        const ElementView& sv = src_views.at(cand.source_iri);
        const ElementView& tv = tgt_views.at(cand.target_iri);

        ScoredCandidate sc;
        sc.candidate = cand;

        const double string_dist = levenshtein_norm(sv.joined_tokens, tv.joined_tokens);
        sc.string_sim = to_similarity(string_dist);

        const double euclid_dist =
            kernels::l2(sv.mean.data(), tv.mean.data(), sv.mean.size());
        sc.euclid_sim = to_similarity(euclid_dist);

        double label_wd = euclid_dist;  // fallback when a side has no vectors
        if (!sv.token_vectors.empty() && !tv.token_vectors.empty()) {
          label_wd = point_set_wd(sv.token_vectors, tv.token_vectors, opts.sinkhorn);
        }
        sc.label_wd_sim = to_similarity(label_wd);

        const double lwd =
            local_wd(sv.context, tv.context, store, euclid_dist, opts);
        sc.local_wd_sim = to_similarity(lwd);

        sc.interaction = component_names;
        double score = 1.0;
        if (opts.metric.use_string) score *= sc.string_sim;
        if (opts.metric.use_euclidean) score *= sc.euclid_sim;
        if (opts.metric.use_label_wd) score *= sc.label_wd_sim;
        if (opts.metric.use_local_wd) score *= sc.local_wd_sim;
        sc.final_score = score;

        sc.candidate.scores["string"] = sc.string_sim;
        sc.candidate.scores["euclidean"] = sc.euclid_sim;
        sc.candidate.scores["label-wd"] = sc.label_wd_sim;
        sc.candidate.scores["local-wd"] = sc.local_wd_sim;
        sc.candidate.scores["final"] = sc.final_score;

        out[idx] = std::move(sc);
      },
      opts.threads);
  return out;
}

Alignment filter_alignment(const std::vector<ScoredCandidate>& scored,
                           double threshold, const std::string& metric_name) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("filter_alignment: threshold must lie in [0,1]");
  }

  std::vector<const ScoredCandidate*> kept;
  kept.reserve(scored.size());
  for (const auto& sc : scored) {
    if (sc.final_score >= threshold) kept.push_back(&sc);
  }
  std::sort(kept.begin(), kept.end(), [](const ScoredCandidate* a,
                                         const ScoredCandidate* b) {
    if (a->final_score != b->final_score) return a->final_score > b->final_score;
    if (a->candidate.source_iri != b->candidate.source_iri) {
      return a->candidate.source_iri < b->candidate.source_iri;
    }
    return a->candidate.target_iri < b->candidate.target_iri;
  });

  Alignment out;
  out.threshold = threshold;
  out.metric_name = metric_name;
  std::set<std::string> used_sources, used_targets;
  for (const ScoredCandidate* sc : kept) {
    if (used_sources.count(sc->candidate.source_iri) != 0 ||
        used_targets.count(sc->candidate.target_iri) != 0) {
      continue;
    }
    used_sources.insert(sc->candidate.source_iri);
    used_targets.insert(sc->candidate.target_iri);
    out.correspondences.push_back(Correspondence{sc->candidate.source_iri,
                                                 sc->candidate.target_iri,
                                                 sc->final_score});
  }
  std::sort(out.correspondences.begin(), out.correspondences.end(),
            [](const Correspondence& a, const Correspondence& b) {
              if (a.source_iri != b.source_iri) return a.source_iri < b.source_iri;
              return a.target_iri < b.target_iri;
            });
  return out;
}

}  // namespace otmatch
