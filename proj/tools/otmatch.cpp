// otmatch - align two ontologies with optimal transport over label embeddings.
//
// Subcommands compose through files so every pipeline stage can be rerun and
// compared independently:
//   match      global coupling per element kind -> candidate file
//   refine     score candidates (string/euclidean/label-WD/context-WD
//              interactions) -> alignment file, optionally sweeping thresholds
//              against a reference
//   eval       precision/recall/F1 of an alignment file against a reference
//   correlate  ontology-level Wasserstein vs Jaccard similarity across cases
//   ontosim    Wasserstein distance/similarity between two ontologies
//
// Exit codes: 0 success, 1 usage error, 2 input/parse error, 3 solver failure
// (non-convergence is only fatal under --strict).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "otmatch/error.hpp"
#include "otmatch/evaluation.hpp"
#include "otmatch/io.hpp"
#include "otmatch/kernels.hpp"
#include "otmatch/matching.hpp"
#include "otmatch/ontology.hpp"
#include "otmatch/refinement.hpp"
#include "otmatch/transport.hpp"

namespace {

using namespace otmatch;

struct SolverFlags {
  double epsilon = 0.0;  // <= 0: 0.01 * mean cost
  int max_iter = 2000;
  double tol = 1e-6;

  SinkhornOptions options() const { return SinkhornOptions{epsilon, max_iter, tol}; }
  void echo(ConfigEcho& cfg) const {
    cfg.emplace_back("epsilon", epsilon > 0.0 ? format_double(epsilon) : "auto");
    cfg.emplace_back("max-iter", std::to_string(max_iter));
    cfg.emplace_back("tol", format_double(tol));
  }
};

void add_solver_flags(CLI::App* cmd, SolverFlags& flags) {
  cmd->add_option("--epsilon", flags.epsilon,
                  "entropic regularization (default: 0.01 x mean cost)");
  cmd->add_option("--max-iter", flags.max_iter, "sinkhorn iteration budget");
  cmd->add_option("--tol", flags.tol, "marginal violation tolerance");
}

ReferenceAlignment load_reference_any(const std::string& path,
                                      const std::string& format) {
  if (format == "tsv") return load_reference(path);
  if (format == "oaei") return load_reference_oaei(path);
  // auto: XML when the first non-space byte is '<'
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open reference file");
  char c = 0;
  while (in.get(c) && (c == ' ' || c == '\t' || c == '\n' || c == '\r')) {
  }
  return c == '<' ? load_reference_oaei(path) : load_reference(path);
}

bool is_class(const Ontology& onto, const std::string& iri) {
  const OntologyElement* e = onto.find(iri);
  return e != nullptr && e->kind == ElementKind::Class;
}

void filter_reference_to_classes(ReferenceAlignment& ref, const Ontology& source,
                                 const Ontology& target) {
  for (auto it = ref.pairs.begin(); it != ref.pairs.end();) {
    if (is_class(source, it->first) && is_class(target, it->second)) {
      ++it;
    } else {
      it = ref.pairs.erase(it);
    }
  }
  ref.scope = EvalScope::ClassesOnly;
}

void print_report(const EvalReport& rep) {
  std::printf("threshold %.2f\n", rep.threshold);
  std::printf("precision %.4f\n", rep.precision);
  std::printf("recall    %.4f\n", rep.recall);
  std::printf("f1        %.4f\n", rep.f1);
  std::printf("counts    tp=%zu predicted=%zu reference=%zu\n", rep.true_positive,
              rep.predicted, rep.reference);
}

int run_match(const std::string& embeddings_path, const std::string& source_path,
              const std::string& target_path, const std::string& output_path,
              const std::string& weighting_name, const std::string& extraction_name,
              int k, const SolverFlags& solver, const std::string& synonyms_path,
              int seed, bool strict) {
  const EmbeddingStore store = load_embeddings(embeddings_path);
  const Ontology source = load_ontology(source_path);
  const Ontology target = load_ontology(target_path);
  SynonymMap synonyms;
  if (!synonyms_path.empty()) synonyms = load_synonyms(synonyms_path);

  const Weighting weighting = weighting_name == "uniform"
                                  ? Weighting::Uniform
                                  : Weighting::InverseMinDistance;
  GlobalCoupleResult global =
      global_couple(source, target, store, weighting, solver.options(),
                    synonyms_path.empty() ? nullptr : &synonyms);
  for (const std::string& w : global.warnings) {
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  }
  if (strict) {
    for (const KindCoupling& kc : global.partitions) {
      if (!kc.coupling.converged) {
        std::fprintf(stderr,
                     "error: sinkhorn did not converge for partition '%s' "
                     "within %d iterations\n",
                     to_string(kc.kind), solver.max_iter);
        return 3;
      }
    }
  }

  const CandidateSet set = extraction_name == "mnn" ? mnn_extract(global)
                                                    : topk_extract(global, k);

  ConfigEcho cfg;
  cfg.emplace_back("embeddings", embeddings_path);
  cfg.emplace_back("source", source_path);
  cfg.emplace_back("target", target_path);
  cfg.emplace_back("weighting", weighting_name);
  cfg.emplace_back("extraction", extraction_name == "mnn"
                                     ? std::string("mnn")
                                     : "topk k=" + std::to_string(k));
  solver.echo(cfg);
  cfg.emplace_back("synonyms", synonyms_path.empty() ? "-" : synonyms_path);
  cfg.emplace_back("seed", std::to_string(seed));
  write_candidates(output_path, set, cfg);

  std::printf("%zu candidates (%zu partitions) -> %s\n", set.candidates.size(),
              global.partitions.size(), output_path.c_str());
  return 0;
}

int run_refine(const std::string& embeddings_path, const std::string& source_path,
               const std::string& target_path, const std::string& candidates_path,
               const std::string& output_path, const std::string& metric_name,
               std::optional<double> threshold, const std::string& reference_path,
               const std::string& reference_format, std::string curve_path,
               const std::string& scope, std::size_t exact_max_triples,
               const SolverFlags& solver, const std::string& synonyms_path,
               int seed) {
  if (threshold.has_value() == !reference_path.empty()) {
    std::fprintf(stderr,
                 "error: provide exactly one of --threshold or --reference\n");
    return 1;
  }
  RefineOptions opts;
  opts.metric = parse_metric(metric_name);  // throws invalid_argument -> usage
  if (threshold && !(*threshold >= 0.0 && *threshold <= 1.0)) {
    std::fprintf(stderr, "error: --threshold must lie in [0,1]\n");
    return 1;
  }

  const EmbeddingStore store = load_embeddings(embeddings_path);
  const Ontology source = load_ontology(source_path);
  const Ontology target = load_ontology(target_path);
  CandidateSet candidates = read_candidates(candidates_path);
  SynonymMap synonyms;
  if (!synonyms_path.empty()) {
    synonyms = load_synonyms(synonyms_path);
    opts.synonyms = &synonyms;
  }
  opts.sinkhorn = solver.options();
  opts.exact_max_triples = exact_max_triples;

  if (scope == "classes-only") {
    std::vector<Candidate> kept;
    for (Candidate& c : candidates.candidates) {
      if (is_class(source, c.source_iri) && is_class(target, c.target_iri)) {
        kept.push_back(std::move(c));
      }
    }
    candidates.candidates = std::move(kept);
  }

  const std::vector<ScoredCandidate> scored =
      score_candidates(candidates, source, target, store, opts);

  ConfigEcho cfg;
  cfg.emplace_back("embeddings", embeddings_path);
  cfg.emplace_back("source", source_path);
  cfg.emplace_back("target", target_path);
  cfg.emplace_back("candidates", candidates_path);
  cfg.emplace_back("metric", metric_name);
  cfg.emplace_back("scope", scope);
  cfg.emplace_back("exact-max-triples", std::to_string(exact_max_triples));
  solver.echo(cfg);
  cfg.emplace_back("synonyms", synonyms_path.empty() ? "-" : synonyms_path);
  cfg.emplace_back("seed", std::to_string(seed));

  if (threshold) {
    cfg.emplace_back("threshold", format_double(*threshold));
    Alignment alignment = filter_alignment(scored, *threshold, metric_name);
    write_alignment(output_path, alignment, cfg);
    std::printf("%zu correspondences at threshold %s -> %s\n",
                alignment.correspondences.size(), format_double(*threshold).c_str(),
                output_path.c_str());
    return 0;
  }

  ReferenceAlignment reference = load_reference_any(reference_path, reference_format);
  if (scope == "classes-only") filter_reference_to_classes(reference, source, target);
  cfg.emplace_back("reference", reference_path);

  const auto [best, curve] = threshold_sweep(scored, reference);
  Alignment alignment = filter_alignment(scored, best.threshold, metric_name);
  write_alignment(output_path, alignment, cfg);
  if (curve_path.empty()) curve_path = output_path + ".curve";
  write_curve(curve_path, curve, cfg);

  print_report(best);
  std::printf("alignment -> %s\ncurve     -> %s\n", output_path.c_str(),
              curve_path.c_str());
  return 0;
}

int run_eval(const std::string& alignment_path, const std::string& reference_path,
             const std::string& reference_format, const std::string& scope,
             const std::string& source_path, const std::string& target_path) {
  if (scope == "classes-only" && (source_path.empty() || target_path.empty())) {
    std::fprintf(stderr,
                 "error: --scope classes-only needs --source and --target to "
                 "resolve element kinds\n");
    return 1;
  }
  Alignment alignment = read_alignment(alignment_path);
  ReferenceAlignment reference = load_reference_any(reference_path, reference_format);
  if (scope == "classes-only") {
    const Ontology source = load_ontology(source_path);
    const Ontology target = load_ontology(target_path);
    filter_reference_to_classes(reference, source, target);
    std::vector<Correspondence> kept;
    for (Correspondence& c : alignment.correspondences) {
      if (is_class(source, c.source_iri) && is_class(target, c.target_iri)) {
        kept.push_back(std::move(c));
      }
    }
    alignment.correspondences = std::move(kept);
  }
  print_report(evaluate(alignment, reference));
  return 0;
}

int run_correlate(const std::string& embeddings_path, const std::string& cases_path,
                  const std::string& output_path, const std::string& scope,
                  const std::string& reference_format, const SolverFlags& solver) {
  const EmbeddingStore store = load_embeddings(embeddings_path);

  std::ifstream in(cases_path);
  if (!in) throw ParseError(cases_path + ": cannot open case manifest");
  struct Case {
    std::string source, target, reference;
  };
  std::vector<Case> cases;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t t1 = line.find('\t');
    const std::size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) {
      throw ParseError(cases_path + ":" + std::to_string(lineno) +
                       ": expected '<source>\\t<target>\\t<reference>'");
    }
    cases.push_back(Case{line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1),
                         line.substr(t2 + 1)});
  }
  if (cases.size() < 2) {
    std::fprintf(stderr, "error: correlation needs at least two cases\n");
    return 1;
  }

  OntologySimilarityOptions sim_opts;
  sim_opts.sinkhorn = solver.options();

  std::vector<double> ws_values, jaccard_values;
  std::vector<std::string> rows;
  for (const Case& c : cases) {
    const Ontology source = load_ontology(c.source);
    const Ontology target = load_ontology(c.target);
    ReferenceAlignment reference = load_reference_any(c.reference, reference_format);
    if (scope == "classes-only") filter_reference_to_classes(reference, source, target);

    const OntologySimilarity sim = ontology_similarity(source, target, store, sim_opts);
    const double jac = jaccard_similarity(source.class_count(), target.class_count(),
                                          reference.pairs.size());
    ws_values.push_back(sim.ws);
    jaccard_values.push_back(jac);

    const std::string name = std::filesystem::path(c.source).stem().string() + "-" +
                             std::filesystem::path(c.target).stem().string();
    rows.push_back(name + "\t" + format_double(sim.wd) + "\t" + format_double(sim.ws) +
                   "\t" + format_double(jac));
  }

  const double pcc = pearson(ws_values, jaccard_values);  // throws on zero variance

  std::string table = "# columns: case\twd\tws\tjaccard\n";
  for (const std::string& r : rows) table += r + "\n";
  table += "# pcc: " + format_double(pcc) + "\n";

  if (!output_path.empty()) {
    std::ofstream out(output_path);
    if (!out) throw ParseError(output_path + ": cannot open for writing");
    out << "# otmatch correlate\n"
        << "# config: embeddings=" << embeddings_path << " cases=" << cases_path
        << " scope=" << scope << "\n"
        << table;
  }
  std::fputs(table.c_str(), stdout);
  return 0;
}

int run_ontosim(const std::string& embeddings_path, const std::string& source_path,
                const std::string& target_path, const SolverFlags& solver) {
  const EmbeddingStore store = load_embeddings(embeddings_path);
  const Ontology source = load_ontology(source_path);
  const Ontology target = load_ontology(target_path);
  OntologySimilarityOptions opts;
  opts.sinkhorn = solver.options();
  const OntologySimilarity sim = ontology_similarity(source, target, store, opts);
  std::printf("wd %s\nws %s\n", format_double(sim.wd).c_str(),
              format_double(sim.ws).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ontology matching via optimal transport over label embeddings"};
  app.require_subcommand(1);

  std::string embeddings, source, target, output, candidates, alignment, reference,
      cases, curve, synonyms;
  std::string weighting = "inverse-min-distance";
  std::string extraction = "topk";
  std::string metric = "string-context-distance";
  std::string scope = "all";
  std::string reference_format = "auto";
  int k = 20;
  int seed = 0;
  std::size_t exact_max_triples = 12;
  std::optional<double> threshold;
  bool strict = false;
  SolverFlags solver;

  CLI::App* match = app.add_subcommand("match", "derive candidates from the global coupling");
  match->add_option("--embeddings", embeddings, "word-vector text file")->required();
  match->add_option("--source", source, "source ontology document")->required();
  match->add_option("--target", target, "target ontology document")->required();
  match->add_option("--output", output, "candidate file to write")->required();
  match->add_option("--weighting", weighting, "uniform | inverse-min-distance")
      ->check(CLI::IsMember({"uniform", "inverse-min-distance"}));
  match->add_option("--extraction", extraction, "mnn | topk")
      ->check(CLI::IsMember({"mnn", "topk"}));
  match->add_option("--k", k, "targets per source for topk")->check(CLI::PositiveNumber);
  match->add_option("--synonyms", synonyms, "token synonym file");
  match->add_option("--seed", seed, "echoed into output headers");
  match->add_flag("--strict", strict, "fail (exit 3) when sinkhorn does not converge");
  add_solver_flags(match, solver);

  CLI::App* refine = app.add_subcommand("refine", "score candidates and filter an alignment");
  refine->add_option("--embeddings", embeddings)->required();
  refine->add_option("--source", source)->required();
  refine->add_option("--target", target)->required();
  refine->add_option("--candidates", candidates, "candidate file from 'match'")->required();
  refine->add_option("--output", output, "alignment file to write")->required();
  refine->add_option("--metric", metric,
                     "string-distance | euclidean-distance | label-wd-distance | "
                     "string-context-distance | euclidean-context-distance | "
                     "label-wd-context-distance | all-interactions");
  refine->add_option("--threshold", threshold, "fixed score threshold in [0,1]");
  refine->add_option("--reference", reference, "reference pairs: sweep thresholds for best F1");
  refine->add_option("--reference-format", reference_format, "auto | tsv | oaei")
      ->check(CLI::IsMember({"auto", "tsv", "oaei"}));
  refine->add_option("--curve", curve, "where to write the 101-point sweep curve");
  refine->add_option("--scope", scope, "all | classes-only")
      ->check(CLI::IsMember({"all", "classes-only"}));
  refine->add_option("--exact-max-triples", exact_max_triples,
                     "largest context solved with the exact oracle");
  refine->add_option("--synonyms", synonyms);
  refine->add_option("--seed", seed, "echoed into output headers");
  add_solver_flags(refine, solver);

  CLI::App* eval = app.add_subcommand("eval", "score an alignment against a reference");
  eval->add_option("--alignment", alignment)->required();
  eval->add_option("--reference", reference)->required();
  eval->add_option("--reference-format", reference_format)
      ->check(CLI::IsMember({"auto", "tsv", "oaei"}));
  eval->add_option("--scope", scope)->check(CLI::IsMember({"all", "classes-only"}));
  eval->add_option("--source", source, "needed for --scope classes-only");
  eval->add_option("--target", target, "needed for --scope classes-only");

  // Jaccard counts classes, so the reference defaults to class pairs here
  std::string correlate_scope = "classes-only";
  CLI::App* correlate = app.add_subcommand(
      "correlate", "Wasserstein vs Jaccard similarity over a list of cases");
  correlate->add_option("--embeddings", embeddings)->required();
  correlate->add_option("--cases", cases, "manifest: source\\ttarget\\treference per line")
      ->required();
  correlate->add_option("--output", output, "write the table here as well");
  correlate->add_option("--scope", correlate_scope)
      ->check(CLI::IsMember({"all", "classes-only"}));
  correlate->add_option("--reference-format", reference_format)
      ->check(CLI::IsMember({"auto", "tsv", "oaei"}));
  add_solver_flags(correlate, solver);

  CLI::App* ontosim = app.add_subcommand("ontosim", "Wasserstein distance between two ontologies");
  ontosim->add_option("--embeddings", embeddings)->required();
  ontosim->add_option("--source", source)->required();
  ontosim->add_option("--target", target)->required();
  add_solver_flags(ontosim, solver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (match->parsed()) {
      return run_match(embeddings, source, target, output, weighting, extraction, k,
                       solver, synonyms, seed, strict);
    }
    if (refine->parsed()) {
      return run_refine(embeddings, source, target, candidates, output, metric,
                        threshold, reference, reference_format, curve, scope,
                        exact_max_triples, solver, synonyms, seed);
    }
    if (eval->parsed()) {
      return run_eval(alignment, reference, reference_format, scope, source, target);
    }
    if (correlate->parsed()) {
      return run_correlate(embeddings, cases, output, correlate_scope,
                           reference_format, solver);
    }
    if (ontosim->parsed()) {
      return run_ontosim(embeddings, source, target, solver);
    }
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const SolveError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
