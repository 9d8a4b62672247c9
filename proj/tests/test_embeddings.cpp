#include <cstring>
#include <random>

#include <doctest.h>

#include "otmatch/embeddings.hpp"
#include "otmatch/error.hpp"
#include "test_util.hpp"

using namespace otmatch;
using testutil::TempDir;
using testutil::write_file;

TEST_SUITE_BEGIN("embeddings");

TEST_CASE("load_embeddings reads the header format") {
  TempDir dir("otm-emb");
  const auto path = dir.file("vec.txt");
  write_file(path, "2 3\npaper 1 0 0\nauthor 0 1 0\n");
  const EmbeddingStore store = load_embeddings(path);
  CHECK(store.size() == 2);
  CHECK(store.dimension() == 3);
  REQUIRE(store.find("paper") != nullptr);
  CHECK((*store.find("paper"))[0] == 1.0);
  CHECK(store.find("topic") == nullptr);
}

TEST_CASE("load_embeddings reads headerless files") {
  TempDir dir("otm-emb");
  const auto path = dir.file("vec.txt");
  write_file(path, "paper 1.5 -2 0.25\nauthor 0 1 0\n");
  const EmbeddingStore store = load_embeddings(path);
  CHECK(store.size() == 2);
  CHECK(store.dimension() == 3);
  CHECK((*store.find("paper"))[1] == -2.0);
}

TEST_CASE("load_embeddings failure modes") {
  TempDir dir("otm-emb");

  SUBCASE("empty file") {
    write_file(dir.file("e.txt"), "");
    CHECK_THROWS_AS(load_embeddings(dir.file("e.txt")), ParseError);
  }
  SUBCASE("arity violation names the line") {
    write_file(dir.file("a.txt"), "2 3\npaper 1 0 0\ntopic 1.0 2.0\n");
    try {
      load_embeddings(dir.file("a.txt"));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }
  }
  SUBCASE("non-finite component") {
    write_file(dir.file("n.txt"), "w nan 1\n");
    CHECK_THROWS_AS(load_embeddings(dir.file("n.txt")), ParseError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_embeddings(dir.file("nope.txt")), ParseError);
  }
}

TEST_CASE("normalize_label splits underscores, hyphens, and camelCase") {
  CHECK(normalize_label("Accepted_Paper").tokens ==
        std::vector<std::string>{"accepted", "paper"});
  CHECK(normalize_label("hasSpeaker").tokens ==
        std::vector<std::string>{"has", "speaker"});
  CHECK(normalize_label("").tokens.empty());
  CHECK(normalize_label("co-located event").tokens ==
        std::vector<std::string>{"co", "located", "event"});
  CHECK(normalize_label("PDFDocument").tokens ==
        std::vector<std::string>{"pdf", "document"});
  CHECK(normalize_label("___").tokens.empty());
  CHECK(normalize_label("isAbout").tokens == std::vector<std::string>{"is", "about"});
}

TEST_CASE("normalize_label is idempotent on its space-joined output") {
  const char* labels[] = {"Accepted_Paper", "hasSpeaker",  "PDFDocument",
                          "mp3 Player",     "SIGIR-2021",  "subClassOf",
                          "has_the_same_TOPIC", "camelCaseABCWord"};
  for (const char* raw : labels) {
    CAPTURE(raw);
    const auto first = normalize_label(raw);
    std::string joined;
    for (std::size_t i = 0; i < first.tokens.size(); ++i) {
      if (i) joined += ' ';
      joined += first.tokens[i];
    }
    CHECK(normalize_label(joined).tokens == first.tokens);
  }
}

TEST_CASE("embed_element averages in-vocabulary vectors") {
  EmbeddingStore store(3);
  store.insert("paper", {1, 0, 0});
  store.insert("accepted", {0, 2, 0});

  SUBCASE("single token") {
    const auto e = embed_element(normalize_label("paper"), store);
    CHECK(e.mean_vector == std::vector<double>{1, 0, 0});
    CHECK(e.oov_tokens.empty());
    CHECK_FALSE(e.degenerate);
  }
  SUBCASE("two-token average") {
    const auto e = embed_element(normalize_label("Accepted_Paper"), store);
    CHECK(e.mean_vector == std::vector<double>{0.5, 1.0, 0.0});
    CHECK(e.token_vectors.size() == 2);
  }
  SUBCASE("all tokens out of vocabulary") {
    const auto e = embed_element(normalize_label("zzzz"), store);
    CHECK(e.degenerate);
    CHECK(e.mean_vector == std::vector<double>{0, 0, 0});
    CHECK(e.oov_tokens == std::vector<std::string>{"zzzz"});
  }
  SUBCASE("partial miss keeps the hit") {
    const auto e = embed_element(normalize_label("accepted_zzzz"), store);
    CHECK_FALSE(e.degenerate);
    CHECK(e.mean_vector == std::vector<double>{0, 2, 0});
    CHECK(e.oov_tokens == std::vector<std::string>{"zzzz"});
  }
}

TEST_CASE("mean is bitwise permutation-invariant and label-deterministic") {
  const std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta", "eps"};
  const EmbeddingStore store = testutil::random_store(vocab, 16, 99);

  LabelTokens fwd, rev;
  fwd.tokens = {"alpha", "beta", "gamma", "delta", "eps"};
  rev.tokens = {"eps", "delta", "gamma", "beta", "alpha"};
  const auto a = embed_element(fwd, store);
  const auto b = embed_element(rev, store);
  REQUIRE(a.mean_vector.size() == b.mean_vector.size());
  CHECK(std::memcmp(a.mean_vector.data(), b.mean_vector.data(),
                    a.mean_vector.size() * sizeof(double)) == 0);

  // identical token lists -> bitwise identical embeddings
  const auto c = embed_element(fwd, store);
  CHECK(std::memcmp(a.mean_vector.data(), c.mean_vector.data(),
                    a.mean_vector.size() * sizeof(double)) == 0);
}

TEST_CASE("synonym table rewrites tokens") {
  TempDir dir("otm-syn");
  const auto path = dir.file("syn.tsv");
  write_file(path, "# test synonyms\nwriter\tauthor\npaper\tarticle document\n");
  const SynonymMap syn = load_synonyms(path);
  const auto out = apply_synonyms({"writer", "paper", "topic"}, syn);
  CHECK(out == std::vector<std::string>{"author", "article", "document", "topic"});
}

TEST_SUITE_END();
