#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "ample/castles.hpp"
#include "ample/finite_groupoid.hpp"
#include "ample/measures.hpp"

namespace ample {

// Text-format error with a 1-based line number.
struct ParseError : std::runtime_error {
    int line;
    ParseError(int l, const std::string& msg)
        : std::runtime_error("line " + std::to_string(l) + ": " + msg), line(l) {}
};

enum class GroupoidKind { Transformation, Finite, Coarse };

// One groupoid spec file: header "groupoid transformation|finite|coarse",
// then the variant body.
//   transformation: "alphabet SYMBOLS"; "generator NAME" blocks whose lines
//     are rules "u -> v" and "exception PRE/PERIOD -> PRE/PERIOD".
//   finite: "units N [names...]"; "arrow SRC DST" lines, at most one arrow
//     per ordered pair of units (composition and inverses are derived).
//   coarse: "points NAME..."; one "dist RAT..." row per point.
struct ParsedGroupoid {
    GroupoidKind kind = GroupoidKind::Transformation;
    std::optional<TransformationGroupoid> transformation;
    std::optional<FiniteGroupoid> finite;
    std::optional<FiniteMetricSpace> space;
};

ParsedGroupoid parse_groupoid_text(const std::string& text);
ParsedGroupoid load_groupoid(const std::string& path);
std::string groupoid_text(const ParsedGroupoid& pg);

// Clopen-set spec: "full", "empty", or comma-separated cylinder words
// (refined to a common depth), e.g. "00,01,11".
ClopenSet parse_clopen(const Alphabet& a, const std::string& spec);
std::string clopen_spec(const ClopenSet& s);

// Compact-set spec: comma-separated items "WORD" (full domain) or
// "WORD@CLOPEN-SPEC" with '|' separating clopen words, e.g. "T^-1,T^1" or
// "T@00|01". "id" alone denotes the empty list (units only).
KSpec parse_kspec(const TransformationGroupoid& g, const std::string& spec);
std::string kspec_spec(const TransformationGroupoid& g, const KSpec& k);

// Measure file: "depth D" header, then one "CYLINDER P/Q" line per depth-D
// cylinder in lexicographic order.
CylinderMeasure parse_measure_text(const Alphabet& a, const std::string& text);
std::string measure_text(const CylinderMeasure& mu);

// Castle certificate: "castle" header; "multisection L" blocks of
// "ladder I J WORD CLOPEN-SPEC" lines (a full source column or a full
// matrix); optional trailer "extendable-to FILE with KSPEC".
struct CastleFile {
    Castle castle;
    std::optional<std::string> extendable_to;
    std::optional<std::string> kspec;
};
CastleFile parse_castle_text(const TransformationGroupoid& g, const std::string& text);
std::string castle_text(const TransformationGroupoid& g, const Castle& c,
                        const std::optional<std::string>& extendable_to = std::nullopt,
                        const std::optional<std::string>& kspec = std::nullopt);

// Comparison witness: "compare U-SPEC V-SPEC" header plus "route WORD
// CLOPEN-SPEC" lines.
ComparisonWitness parse_witness_text(const TransformationGroupoid& g,
                                     const std::string& text);
std::string witness_text(const TransformationGroupoid& g, const ComparisonWitness& w);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace ample
