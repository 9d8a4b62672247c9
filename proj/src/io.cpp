#include "otmatch/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "otmatch/error.hpp"

namespace otmatch {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  return out;
}

void write_header(std::ofstream& out, const std::string& kind,
                  const ConfigEcho& config) {
  out << "# otmatch " << kind << "\n";
  if (!config.empty()) {
    out << "# config:";
    for (const auto& [key, value] : config) out << ' ' << key << '=' << value;
    out << "\n";
  }
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
    fields.back().pop_back();
  }
  return fields;
}

double parse_double_field(const std::string& s, const std::string& path,
                          std::size_t lineno) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(path + ":" + std::to_string(lineno) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

void write_candidates(const std::string& path, const CandidateSet& set,
                      const ConfigEcho& config) {
  std::ofstream out = open_out(path);
  write_header(out, "candidates", config);
  out << "# columns: source_iri\ttarget_iri\tcoupling_mass\tmethod\n";
  const std::string method = set.method == ExtractionMethod::Mnn
                                 ? "mnn"
                                 : "top" + std::to_string(set.k);
  for (const Candidate& c : set.candidates) {
    out << c.source_iri << '\t' << c.target_iri << '\t'
        << format_double(c.coupling_mass) << '\t' << method << "\n";
  }
}

CandidateSet read_candidates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open candidate file");
  CandidateSet set;
  set.method = ExtractionMethod::TopK;
  std::string line;
  std::size_t lineno = 0;
  bool method_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected 4 tab-separated fields, found " +
                       std::to_string(fields.size()));
    }
    Candidate c;
    c.source_iri = fields[0];
    c.target_iri = fields[1];
    c.coupling_mass = parse_double_field(fields[2], path, lineno);
    if (!method_seen) {
      method_seen = true;
      if (fields[3] == "mnn") {
        set.method = ExtractionMethod::Mnn;
      } else if (fields[3].rfind("top", 0) == 0) {
        set.method = ExtractionMethod::TopK;
        set.k = std::atoi(fields[3].c_str() + 3);
      } else {
        throw ParseError(path + ":" + std::to_string(lineno) +
                         ": unknown extraction method '" + fields[3] + "'");
      }
    }
    set.candidates.push_back(std::move(c));
  }
  return set;
}

void write_alignment(const std::string& path, const Alignment& alignment,
                     const ConfigEcho& config) {
  std::ofstream out = open_out(path);
  write_header(out, "alignment", config);
  out << "# metric: " << alignment.metric_name << "\n";
  out << "# threshold: " << format_double(alignment.threshold) << "\n";
  out << "# columns: source_iri\ttarget_iri\tscore\n";
  for (const Correspondence& c : alignment.correspondences) {
    out << c.source_iri << '\t' << c.target_iri << '\t' << format_double(c.score)
        << "\n";
  }
}

Alignment read_alignment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open alignment file");
  Alignment alignment;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# metric: ", 0) == 0) alignment.metric_name = line.substr(10);
      if (line.rfind("# threshold: ", 0) == 0) {
        alignment.threshold = parse_double_field(line.substr(13), path, lineno);
      }
      continue;
    }
    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected 3 tab-separated fields, found " +
                       std::to_string(fields.size()));
    }
    alignment.correspondences.push_back(Correspondence{
        fields[0], fields[1], parse_double_field(fields[2], path, lineno)});
  }
  return alignment;
}

void write_curve(const std::string& path, const std::vector<EvalReport>& curve,
                 const ConfigEcho& config) {
  std::ofstream out = open_out(path);
  write_header(out, "threshold curve", config);
  out << "# columns: threshold precision recall f1\n";
  char buf[96];
  for (const EvalReport& r : curve) {
    std::snprintf(buf, sizeof(buf), "%.2f %.6f %.6f %.6f\n", r.threshold, r.precision,
                  r.recall, r.f1);
    out << buf;
  }
}

}  // namespace otmatch
