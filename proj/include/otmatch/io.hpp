// io.hpp - line-delimited pipeline file formats. Every writer starts the file
// with '#' header lines echoing the effective configuration so runs are
// reproducible from their outputs alone.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "otmatch/evaluation.hpp"
#include "otmatch/matching.hpp"
#include "otmatch/refinement.hpp"

namespace otmatch {

// fixed-format double, stable across runs
std::string format_double(double v);

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

// Candidate rows: source_iri \t target_iri \t coupling_mass \t method
void write_candidates(const std::string& path, const CandidateSet& set,
                      const ConfigEcho& config);
CandidateSet read_candidates(const std::string& path);

// Alignment rows: source_iri \t target_iri \t score; the header carries the
// metric name, threshold, and solver parameters.
void write_alignment(const std::string& path, const Alignment& alignment,
                     const ConfigEcho& config);
Alignment read_alignment(const std::string& path);

// Curve rows: threshold precision recall f1 (101 lines).
void write_curve(const std::string& path, const std::vector<EvalReport>& curve,
                 const ConfigEcho& config);

}  // namespace otmatch
