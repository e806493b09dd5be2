#include "pisos/operator_json.hpp"

#include <cmath>

#include <json.hpp>

#include "pisos/errors.hpp"

namespace pisos {

namespace {

using nlohmann::json;

struct BlockRef {
  const char* name;
  PolyMatrix OpVar::*member;
  int OpDims::*rows;
  int OpDims::*cols;
};

const BlockRef kBlocks[] = {
    {"P", &OpVar::P, &OpDims::p, &OpDims::m},
    {"Q1", &OpVar::Q1, &OpDims::p, &OpDims::n},
    {"Q2", &OpVar::Q2, &OpDims::q, &OpDims::m},
    {"R0", &OpVar::R0, &OpDims::q, &OpDims::n},
    {"R1", &OpVar::R1, &OpDims::q, &OpDims::n},
    {"R2", &OpVar::R2, &OpDims::q, &OpDims::n},
};

json poly_to_json(const Poly2& p) {
  json terms = json::array();
  for (const auto& [exp, coeff] : p.terms()) {
    if (!coeff.is_numeric()) {
      throw DimMismatch("only numeric operators can be written to a file");
    }
    terms.push_back(json::array({exp.first, exp.second, coeff.constant()}));
  }
  return terms;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

int exponent(const json& v, const std::string& where) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    fail(where, "exponents must be integers");
  }
  const long long e = v.get<long long>();
  if (e < 0 || e > 1000) fail(where, "exponents must be in [0, 1000]");
  return static_cast<int>(e);
}

Poly2 poly_from_json(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "a polynomial must be a list of [i, j, c] terms");
  Poly2 p;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const json& t = v[k];
    const std::string at = where + "[" + std::to_string(k) + "]";
    if (!t.is_array() || t.size() != 3 || !t[2].is_number()) {
      fail(at, "a term must be [i, j, c]");
    }
    const double c = t[2].get<double>();
    if (!std::isfinite(c)) fail(at, "coefficient is not finite");
    p.add_term(exponent(t[0], at), exponent(t[1], at), c);
  }
  return p.normalize();
}

PolyMatrix block_from_json(const json& v, int rows, int cols,
                           const std::string& where) {
  PolyMatrix m(rows, cols);
  if (!v.is_array() || static_cast<int>(v.size()) != rows) {
    throw DimMismatch(where + ": expected " + std::to_string(rows) + " rows");
  }
  for (int r = 0; r < rows; ++r) {
    const json& row = v[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw DimMismatch(where + ": row " + std::to_string(r) + " should have " +
                        std::to_string(cols) + " entries");
    }
    for (int c = 0; c < cols; ++c) {
      m(r, c) = poly_from_json(row[c], where + "[" + std::to_string(r) + "][" +
                                           std::to_string(c) + "]");
    }
  }
  return m;
}

json operator_to_json(const OpVar& a) {
  json j;
  j["dims"] = {a.dims.p, a.dims.m, a.dims.q, a.dims.n};
  j["interval"] = {a.interval.a, a.interval.b};
  for (const auto& blk : kBlocks) {
    const PolyMatrix& m = a.*(blk.member);
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < m.cols(); ++c) row.push_back(poly_to_json(m(r, c)));
      rows.push_back(row);
    }
    j[blk.name] = rows;
  }
  return j;
}

OpVar operator_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "an operator must be a JSON object");
  if (!j.contains("dims")) fail(where, "missing \"dims\"");
  const json& d = j["dims"];
  if (!d.is_array() || d.size() != 4) fail(where, "\"dims\" must be [p, m, q, n]");
  int dims[4];
  for (int k = 0; k < 4; ++k) {
    if (!d[k].is_number_integer() || d[k].get<long long>() < 0) {
      fail(where, "\"dims\" entries must be nonnegative integers");
    }
    dims[k] = static_cast<int>(d[k].get<long long>());
  }
  Interval iv;
  if (j.contains("interval")) {
    const json& i = j["interval"];
    if (!i.is_array() || i.size() != 2 || !i[0].is_number() || !i[1].is_number()) {
      fail(where, "\"interval\" must be [a, b]");
    }
    iv = Interval(i[0].get<double>(), i[1].get<double>());
  }
  OpVar a = op_new({dims[0], dims[1], dims[2], dims[3]}, iv);
  for (const auto& blk : kBlocks) {
    if (!j.contains(blk.name)) continue;
    a.*(blk.member) = block_from_json(j[blk.name], a.dims.*(blk.rows),
                                      a.dims.*(blk.cols), where + "." + blk.name);
  }
  a.validate();
  return a;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

// One member per line, in schema order, values compact.
std::string format_object(const json& j, const std::string& indent) {
  static const char* kOrder[] = {"dims", "interval", "P", "Q1", "Q2", "R0", "R1", "R2"};
  std::string out = "{\n";
  bool first = true;
  for (const char* key : kOrder) {
    if (!j.contains(key)) continue;
    out += (first ? "" : ",\n") + indent + " \"" + key + "\": " + j[key].dump();
    first = false;
  }
  return out + "\n" + indent + "}";
}

}  // namespace

std::string format_operator(const OpVar& a) {
  return format_object(operator_to_json(a), "") + "\n";
}

OpVar parse_operator(const std::string& text) {
  return operator_from_json(parse_json(text), "operator");
}

const OpVar& OperatorFile::at(const std::string& name) const {
  const auto it = operators.find(name);
  if (it == operators.end()) {
    throw ParseError("operator file has no operator named \"" + name + "\"");
  }
  return it->second;
}

OperatorFile parse_operator_file(const std::string& text) {
  const json j = parse_json(text);
  if (!j.is_object()) throw ParseError("operator file must hold a JSON object");
  OperatorFile out;
  if (j.contains("dims")) {
    out.operators[""] = operator_from_json(j, "operator");
    return out;
  }
  for (const auto& [key, value] : j.items()) {
    if (key == "eps" || key == "gamma") {
      if (!value.is_number()) throw ParseError("\"" + key + "\" must be a number");
      (key == "eps" ? out.eps : out.gamma) = value.get<double>();
    } else if (key == "deg") {
      if (!value.is_array() || value.size() != 3) {
        throw ParseError("\"deg\" must be [d1, d2, d3]");
      }
      DegreeSpec d;
      d.d1 = exponent(value[0], "deg");
      d.d2 = exponent(value[1], "deg");
      d.d3 = exponent(value[2], "deg");
      out.deg = d;
    } else if (value.is_object()) {
      out.operators[key] = operator_from_json(value, key);
    } else {
      throw ParseError("unexpected member \"" + key + "\" in operator file");
    }
  }
  return out;
}

std::string format_operator_file(const OperatorFile& file) {
  std::vector<std::string> members;
  for (const auto& [name, op] : file.operators) {
    members.push_back(" " + json(name).dump() + ": " +
                      format_object(operator_to_json(op), " "));
  }
  if (file.eps) members.push_back(" \"eps\": " + json(*file.eps).dump());
  if (file.gamma) members.push_back(" \"gamma\": " + json(*file.gamma).dump());
  if (file.deg) {
    members.push_back(" \"deg\": " +
                      json({file.deg->d1, file.deg->d2, file.deg->d3}).dump());
  }
  std::string out = "{\n";
  for (std::size_t k = 0; k < members.size(); ++k) {
    out += members[k] + (k + 1 < members.size() ? ",\n" : "\n");
  }
  return out + "}\n";
}

}  // namespace pisos
