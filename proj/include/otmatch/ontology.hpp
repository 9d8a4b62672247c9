// ontology.hpp - ontology elements, triples, and one-hop context extraction.
#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace otmatch {

enum class ElementKind { Class, ObjectProperty, DatatypeProperty };

const char* to_string(ElementKind kind);

struct OntologyElement {
  std::string iri;
  ElementKind kind = ElementKind::Class;
  std::string label;  // never empty; falls back to the iri's local fragment
  std::vector<std::string> synonyms;
};

struct Triple {
  std::string subject;    // element iri
  std::string predicate;  // "subClassOf" or a property element iri
  std::string object;     // element iri
};

// Reserved predicate keyword for hierarchy edges.
inline constexpr const char* kSubClassOf = "subClassOf";

// Immutable after load; element order follows the document (all derived
// orderings in the pipeline inherit this, which keeps runs deterministic).
class Ontology {
 public:
  std::string id;
  std::vector<OntologyElement> elements;
  std::vector<Triple> triples;

  const OntologyElement* find(const std::string& iri) const;
  std::size_t class_count() const;
  std::vector<const OntologyElement*> elements_of_kind(ElementKind kind) const;

  // Rebuild the iri index and validate invariants (unique iris, resolvable
  // triple references, property predicates). Called by the loader; exposed
  // for ontologies assembled in code.
  void finalize();

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

// Canonical ontology document (JSON): {"id": ..., "elements": [{"iri", "kind",
// "label", "synonyms"?}], "triples": [[s, p, o], ...]}. Kind is one of
// "class", "object_property", "datatype_property". Dangling references and
// duplicate iris are load errors naming the location.
Ontology load_ontology(const std::string& path);
Ontology parse_ontology(const std::string& text, const std::string& origin);
std::string serialize_ontology(const Ontology& onto);

// A one-hop triple around a focal element, with resolved display labels for
// all three positions. `subClassOf` keeps its keyword as the label.
struct ContextTriple {
  std::string subject_iri, subject_label;
  std::string predicate_iri, predicate_label;
  std::string object_iri, object_label;
  enum class Direction { Outgoing, Incoming } direction = Direction::Outgoing;
};

// Every triple in which the element appears as subject or object: subClassOf
// edges to parents and children plus property edges in both directions.
// Unknown iri raises std::invalid_argument.
std::vector<ContextTriple> extract_context(const Ontology& onto,
                                           const std::string& element_iri);

}  // namespace otmatch
