#include <cmath>
#include <map>
#include <random>
#include <set>

#include <doctest.h>

#include "otmatch/matching.hpp"
#include "oracle_helpers.hpp"
#include "test_util.hpp"

using namespace otmatch;

namespace {

using PairSet = std::set<std::pair<std::size_t, std::size_t>>;

PairSet as_set(const std::vector<std::pair<std::size_t, std::size_t>>& v) {
  return PairSet(v.begin(), v.end());
}

// feasible 3x4 plan built by hand: row sums 0.39/0.37/0.24, column sums
// 0.30/0.24/0.27/0.19
Matrix conference_plan() {
  Matrix t(3, 4);
  // rows: Document, Writer, Topic
  // cols: Paper, Accepted_Paper, Author, Subject_Area
  t(0, 0) = 0.08; t(0, 1) = 0.20; t(0, 2) = 0.02; t(0, 3) = 0.09;
  t(1, 0) = 0.10; t(1, 1) = 0.03; t(1, 2) = 0.22; t(1, 3) = 0.02;
  t(2, 0) = 0.12; t(2, 1) = 0.01; t(2, 2) = 0.03; t(2, 3) = 0.08;
  return t;
}

Ontology classes_ontology(const std::string& id,
                          const std::vector<std::string>& labels) {
  Ontology onto;
  onto.id = id;
  for (const auto& label : labels) {
    onto.elements.push_back(
        OntologyElement{id + "#" + label, ElementKind::Class, label, {}});
  }
  onto.finalize();
  return onto;
}

}  // namespace

TEST_SUITE_BEGIN("matching");

TEST_CASE("mnn_pairs base cases") {
  SUBCASE("dominant diagonal") {
    Matrix t(2, 2);
    t(0, 0) = 0.4; t(0, 1) = 0.1;
    t(1, 0) = 0.1; t(1, 1) = 0.4;
    CHECK(as_set(mnn_pairs(t)) == PairSet{{0, 0}, {1, 1}});
  }
  SUBCASE("a larger entry claims the shared column") {
    Matrix t(2, 2);
    t(0, 0) = 0.4; t(0, 1) = 0.35;
    t(1, 0) = 0.3; t(1, 1) = 0.2;
    CHECK(as_set(mnn_pairs(t)) == PairSet{{0, 0}});
  }
  SUBCASE("1x1") {
    Matrix t(1, 1, 0.5);
    CHECK(as_set(mnn_pairs(t)) == PairSet{{0, 0}});
  }
}

TEST_CASE("topk_indices base cases") {
  SUBCASE("order statistics in one row") {
    Matrix t(1, 4);
    t(0, 0) = 0.1; t(0, 1) = 0.5; t(0, 2) = 0.2; t(0, 3) = 0.3;
    const auto rows = topk_indices(t, 2);
    CHECK(rows[0] == std::vector<std::size_t>{1, 3});
  }
  SUBCASE("k saturates at the column count") {
    Matrix t(1, 3);
    t(0, 0) = 0.3; t(0, 1) = 0.1; t(0, 2) = 0.2;
    const auto rows = topk_indices(t, 10);
    CHECK(rows[0] == std::vector<std::size_t>{0, 2, 1});
  }
  SUBCASE("k must be positive") {
    Matrix t(1, 1, 1.0);
    CHECK_THROWS_AS(topk_indices(t, 0), std::invalid_argument);
  }
}

TEST_CASE("hand-built conference plan extracts the expected candidates") {
  const Matrix t = conference_plan();

  // mutual nearest neighbors: Document->Accepted_Paper, Writer->Author,
  // Topic->Paper
  CHECK(as_set(mnn_pairs(t)) == PairSet{{0, 1}, {1, 2}, {2, 0}});

  // top-2 targets per source
  const auto rows = topk_indices(t, 2);
  CHECK(rows[0] == std::vector<std::size_t>{1, 3});  // Accepted_Paper, Subject_Area
  CHECK(rows[1] == std::vector<std::size_t>{2, 0});  // Author, Paper
  CHECK(rows[2] == std::vector<std::size_t>{0, 3});  // Paper, Subject_Area
}

TEST_CASE("extractors agree with exhaustive scans on random plans") {
  std::mt19937 rng(31);
  std::uniform_int_distribution<std::size_t> size(1, 8);
  std::uniform_real_distribution<double> mass(0.0, 1.0);
  for (int round = 0; round < 60; ++round) {
    const std::size_t n = size(rng);
    const std::size_t m = size(rng);
    Matrix t(n, m);
    for (std::size_t k = 0; k < t.size(); ++k) {
      double v = mass(rng);
      // a third of the plans get quantized entries to exercise tie handling
      if (round % 3 == 0) v = std::round(v * 8.0) / 8.0;
      t.data()[k] = v;
    }
    CAPTURE(round);
    CHECK(as_set(mnn_pairs(t)) == as_set(oracle::mnn_scan(t)));

    std::uniform_int_distribution<int> kdist(1, 10);
    const int k = kdist(rng);
    const auto got = topk_indices(t, k);
    const auto want = oracle::topk_scan(t, static_cast<std::size_t>(k));
    CHECK(got == want);

    // every mutual pair appears in the top-1 list of its row
    const auto top1 = topk_indices(t, 1);
    for (auto [i, j] : mnn_pairs(t)) CHECK(top1[i][0] == j);

    // positive rescaling leaves mnn untouched
    Matrix scaled = t;
    for (std::size_t z = 0; z < scaled.size(); ++z) scaled.data()[z] *= 4.25;
    CHECK(as_set(mnn_pairs(scaled)) == as_set(mnn_pairs(t)));
  }
}

TEST_CASE("global_couple solves one problem per populated kind") {
  const std::vector<std::string> labels = {"alpha", "beta", "gamma", "delta"};
  const EmbeddingStore store = testutil::random_store(labels, 12, 7);

  SUBCASE("self-alignment concentrates mass on the diagonal") {
    const Ontology onto = classes_ontology("o", labels);
    const GlobalCoupleResult global =
        global_couple(onto, onto, store, Weighting::Uniform);
    REQUIRE(global.partitions.size() == 1);
    const KindCoupling& kc = global.partitions[0];

    // the exact oracle on the same cost transports along the diagonal for free
    CHECK(exact_ot(kc.cost, uniform_marginal(4), uniform_marginal(4)).wd ==
          doctest::Approx(0.0));

    const Matrix& plan = kc.coupling.plan;
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        if (j != i) {
          CHECK(plan(i, i) > plan(i, j));
          CHECK(plan(i, i) > plan(j, i));
        }
      }
    }
  }

  SUBCASE("1 vs 2 classes: the row is forced by feasibility") {
    const Ontology src = classes_ontology("s", {"alpha"});
    const Ontology tgt = classes_ontology("t", {"beta", "gamma"});
    const GlobalCoupleResult global =
        global_couple(src, tgt, store, Weighting::Uniform);
    REQUIRE(global.partitions.size() == 1);
    const Matrix& plan = global.partitions[0].coupling.plan;
    CHECK(plan(0, 0) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(plan(0, 1) == doctest::Approx(0.5).epsilon(1e-6));
  }

  SUBCASE("3 vs 4 coupling satisfies the estimated marginals") {
    const Ontology src = classes_ontology("s", {"alpha", "beta", "gamma"});
    const Ontology tgt = classes_ontology("t", {"alpha", "beta", "gamma", "delta"});
    const GlobalCoupleResult global =
        global_couple(src, tgt, store, Weighting::InverseMinDistance);
    REQUIRE(global.partitions.size() == 1);
    const KindCoupling& kc = global.partitions[0];
    REQUIRE(kc.coupling.plan.rows() == 3);
    REQUIRE(kc.coupling.plan.cols() == 4);

    const Marginal mu = inverse_min_distance_marginal(kc.cost, MarginalSide::Source);
    const Marginal nu = inverse_min_distance_marginal(kc.cost, MarginalSide::Target);
    CHECK(marginal_violation(kc.coupling.plan, mu, nu) <= 1e-6 + 1e-12);
  }

  SUBCASE("one-sided property partition is skipped with a warning") {
    Ontology src = classes_ontology("s", {"alpha", "beta"});
    src.elements.push_back(
        OntologyElement{"s#hasPart", ElementKind::ObjectProperty, "hasPart", {}});
    src.finalize();
    const Ontology tgt = classes_ontology("t", {"alpha", "beta"});
    const GlobalCoupleResult global =
        global_couple(src, tgt, store, Weighting::Uniform);
    CHECK(global.partitions.size() == 1);
    REQUIRE(global.warnings.size() == 1);
    CHECK(global.warnings[0].find("object_property") != std::string::npos);
  }

  SUBCASE("nothing to match at all is an error") {
    Ontology src;
    src.id = "s";
    src.elements.push_back(
        OntologyElement{"s#p", ElementKind::ObjectProperty, "p", {}});
    src.finalize();
    const Ontology tgt = classes_ontology("t", {"alpha"});
    CHECK_THROWS_AS(global_couple(src, tgt, store, Weighting::Uniform),
                    std::invalid_argument);
  }
}

TEST_CASE("candidate sets respect cardinality invariants") {
  const std::vector<std::string> labels = {"alpha", "beta", "gamma", "delta", "epsilon"};
  const EmbeddingStore store = testutil::random_store(labels, 12, 17);
  const Ontology src = classes_ontology("s", {"alpha", "beta", "gamma", "delta"});
  const Ontology tgt = classes_ontology("t", labels);
  const GlobalCoupleResult global = global_couple(src, tgt, store, Weighting::Uniform);

  const CandidateSet mnn = mnn_extract(global);
  std::set<std::string> sources, targets;
  for (const Candidate& c : mnn.candidates) {
    CHECK(sources.insert(c.source_iri).second);
    CHECK(targets.insert(c.target_iri).second);
  }

  const CandidateSet top2 = topk_extract(global, 2);
  std::map<std::string, int> per_source;
  for (const Candidate& c : top2.candidates) ++per_source[c.source_iri];
  CHECK(per_source.size() == 4);
  for (const auto& [iri, count] : per_source) CHECK(count == 2);

  // coupling_mass must be the exact plan entry
  const KindCoupling& kc = global.partitions[0];
  for (const Candidate& c : top2.candidates) {
    std::size_t i = 0, j = 0;
    for (std::size_t z = 0; z < kc.source_iris.size(); ++z) {
      if (kc.source_iris[z] == c.source_iri) i = z;
    }
    for (std::size_t z = 0; z < kc.target_iris.size(); ++z) {
      if (kc.target_iris[z] == c.target_iri) j = z;
    }
    CHECK(c.coupling_mass == kc.coupling.plan(i, j));
    CHECK(c.label_euclidean == kc.cost(i, j));
  }
}

TEST_SUITE_END();
