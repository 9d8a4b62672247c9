#include "otmatch/ontology.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "otmatch/error.hpp"

namespace otmatch {

namespace {

using nlohmann::json;

ElementKind kind_from_string(const std::string& s, const std::string& where) {
  if (s == "class") return ElementKind::Class;
  if (s == "object_property") return ElementKind::ObjectProperty;
  if (s == "datatype_property") return ElementKind::DatatypeProperty;
  throw ParseError(where + ": unknown element kind '" + s + "'");
}

// local fragment after the last '#', '/' or ':'
std::string iri_fragment(const std::string& iri) {
  const std::size_t pos = iri.find_last_of("#/:");
  std::string frag = pos == std::string::npos ? iri : iri.substr(pos + 1);
  return frag.empty() ? iri : frag;
}

}  // namespace

const char* to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::Class: return "class";
    case ElementKind::ObjectProperty: return "object_property";
    case ElementKind::DatatypeProperty: return "datatype_property";
  }
  return "class";
}

const OntologyElement* Ontology::find(const std::string& iri) const {
  auto it = index_.find(iri);
  return it == index_.end() ? nullptr : &elements[it->second];
}

std::size_t Ontology::class_count() const {
  std::size_t n = 0;
  for (const auto& e : elements) n += e.kind == ElementKind::Class ? 1 : 0;
  return n;
}

std::vector<const OntologyElement*> Ontology::elements_of_kind(
    ElementKind kind) const {
  std::vector<const OntologyElement*> out;
  for (const auto& e : elements) {
    if (e.kind == kind) out.push_back(&e);
  }
  return out;
}

void Ontology::finalize() {
  index_.clear();
  for (std::size_t i = 0; i < elements.size(); ++i) {
    auto& e = elements[i];
    if (e.iri.empty()) {
      throw ParseError(id + ": elements[" + std::to_string(i) + "]: empty iri");
    }
    if (e.label.empty()) e.label = iri_fragment(e.iri);
    if (!index_.emplace(e.iri, i).second) {
      throw ParseError(id + ": elements[" + std::to_string(i) +
                       "]: duplicate iri '" + e.iri + "'");
    }
  }
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const auto& t = triples[i];
    const std::string where = id + ": triples[" + std::to_string(i) + "]";
    if (find(t.subject) == nullptr) {
      throw ParseError(where + ": unknown subject iri '" + t.subject + "'");
    }
    if (find(t.object) == nullptr) {
      throw ParseError(where + ": unknown object iri '" + t.object + "'");
    }
    if (t.predicate != kSubClassOf) {
      const OntologyElement* p = find(t.predicate);
      if (p == nullptr) {
        throw ParseError(where + ": unknown predicate iri '" + t.predicate + "'");
      }
      if (p->kind == ElementKind::Class) {
        throw ParseError(where + ": predicate '" + t.predicate +
                         "' is a class, not a property");
      }
    }
  }
}

Ontology parse_ontology(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError(origin + ": document root must be an object");

  Ontology onto;
  try {
    onto.id = doc.value("id", std::string{});
    if (onto.id.empty()) onto.id = origin;

    if (!doc.contains("elements") || !doc["elements"].is_array()) {
      throw ParseError(origin + ": missing 'elements' array");
    }
    for (std::size_t i = 0; i < doc["elements"].size(); ++i) {
      const json& je = doc["elements"][i];
      const std::string where = origin + ": elements[" + std::to_string(i) + "]";
      if (!je.is_object()) throw ParseError(where + ": not an object");
      OntologyElement e;
      e.iri = je.value("iri", std::string{});
      if (e.iri.empty()) throw ParseError(where + ": missing iri");
      e.kind = kind_from_string(je.value("kind", std::string("class")), where);
      e.label = je.value("label", std::string{});
      if (je.contains("synonyms")) {
        for (const auto& s : je["synonyms"]) e.synonyms.push_back(s.get<std::string>());
      }
      onto.elements.push_back(std::move(e));
    }

    if (doc.contains("triples")) {
      if (!doc["triples"].is_array()) throw ParseError(origin + ": 'triples' must be an array");
      for (std::size_t i = 0; i < doc["triples"].size(); ++i) {
        const json& jt = doc["triples"][i];
        const std::string where = origin + ": triples[" + std::to_string(i) + "]";
        if (!jt.is_array() || jt.size() != 3) {
          throw ParseError(where + ": expected [subject, predicate, object]");
        }
        onto.triples.push_back(Triple{jt[0].get<std::string>(),
                                      jt[1].get<std::string>(),
                                      jt[2].get<std::string>()});
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }

  onto.finalize();
  return onto;
}

Ontology load_ontology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open ontology document");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ontology(buf.str(), path);
}

std::string serialize_ontology(const Ontology& onto) {
  json doc;
  doc["id"] = onto.id;
  doc["elements"] = json::array();
  for (const auto& e : onto.elements) {
    json je;
    je["iri"] = e.iri;
    je["kind"] = to_string(e.kind);
    je["label"] = e.label;
    if (!e.synonyms.empty()) je["synonyms"] = e.synonyms;
    doc["elements"].push_back(std::move(je));
  }
  doc["triples"] = json::array();
  for (const auto& t : onto.triples) {
    doc["triples"].push_back(json::array({t.subject, t.predicate, t.object}));
  }
  return doc.dump(2);
}

std::vector<ContextTriple> extract_context(const Ontology& onto,
                                           const std::string& element_iri) {
  if (onto.find(element_iri) == nullptr) {
    throw std::invalid_argument(onto.id + ": unknown element '" + element_iri + "'");
  }
  std::vector<ContextTriple> out;
  for (const auto& t : onto.triples) {
    const bool is_subject = t.subject == element_iri;
    const bool is_object = t.object == element_iri;
    if (!is_subject && !is_object) continue;

    ContextTriple ct;
    const OntologyElement* s = onto.find(t.subject);
    const OntologyElement* o = onto.find(t.object);
    ct.subject_iri = t.subject;
    ct.subject_label = s->label;
    ct.object_iri = t.object;
    ct.object_label = o->label;
    ct.predicate_iri = t.predicate;
    if (t.predicate == kSubClassOf) {
      ct.predicate_label = kSubClassOf;
    } else {
      ct.predicate_label = onto.find(t.predicate)->label;
    }
    ct.direction = is_subject ? ContextTriple::Direction::Outgoing
                              : ContextTriple::Direction::Incoming;
    out.push_back(std::move(ct));
  }
  return out;
}

}  // namespace otmatch
