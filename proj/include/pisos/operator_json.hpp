#pragma once

#include <map>
#include <optional>
#include <string>

#include "pisos/opvar.hpp"
#include "pisos/program.hpp"

namespace pisos {

// Operator files are JSON:
//
//   {"dims": [p, m, q, n], "interval": [a, b],
//    "P": [[poly, ...], ...], "Q1": ..., "Q2": ..., "R0": ..., "R1": ..., "R2": ...}
//
// Blocks are row-major 2-D arrays (missing blocks are zero) and a
// polynomial is a list of terms [i, j, c] meaning c s^i theta^j.
// Numbers are written as the shortest decimal that reads back to the same
// double, so a write/read cycle is exact.

std::string format_operator(const OpVar& a);
// Throws ParseError (with line/column for malformed JSON) on bad input,
// DimMismatch for blocks that disagree with dims and BadInterval for a
// degenerate interval.
OpVar parse_operator(const std::string& text);

// A file for the executives: either one operator or an object whose
// operator-valued members are named (H, A, B, ...), optionally with scalar
// settings "eps", "gamma" and "deg": [d1, d2, d3].
struct OperatorFile {
  std::map<std::string, OpVar> operators;
  std::optional<double> eps;
  std::optional<double> gamma;
  std::optional<DegreeSpec> deg;

  // Throws ParseError naming the missing operator.
  const OpVar& at(const std::string& name) const;
};

OperatorFile parse_operator_file(const std::string& text);
std::string format_operator_file(const OperatorFile& file);

}  // namespace pisos
