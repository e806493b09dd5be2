#include <cctype>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "pisos/errors.hpp"
#include "pisos/sdp.hpp"

namespace pisos {

namespace {

void write_entry(std::ostringstream& out, int mat, const SymEntry& e,
                 double value) {
  out << mat << ' ' << e.block + 1 << ' ' << e.row + 1 << ' ' << e.col + 1
      << ' ' << value << '\n';
}

bool is_comment(const std::string& line) {
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '"' || c == '*';
  }
  return true;  // blank
}

// SDPA allows separators ',', '{', '}', '(', ')' around numbers.
std::vector<std::string> tokens(const std::string& line) {
  std::string cleaned = line;
  for (char& c : cleaned) {
    if (c == ',' || c == '{' || c == '}' || c == '(' || c == ')') c = ' ';
  }
  std::istringstream in(cleaned);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

double parse_double(const std::string& t, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": expected a number, got '" +
                     t + "'");
  }
}

int parse_int(const std::string& t, int line) {
  const double v = parse_double(t, line);
  if (v != std::floor(v)) {
    throw ParseError("line " + std::to_string(line) + ": expected an integer, got '" +
                     t + "'");
  }
  return static_cast<int>(v);
}

// Nested brace lists as they appear in SDPA result files.
struct Nested {
  bool is_number = false;
  double number = 0.0;
  std::vector<Nested> items;
};

class NestedParser {
 public:
  explicit NestedParser(const std::string& text) : text_(text) {}

  Nested parse() {
    skip();
    if (pos_ >= text_.size() || text_[pos_] != '{') {
      throw ParseError("SDPA solution: expected '{'");
    }
    return list();
  }

 private:
  void skip() {
    while (pos_ < text_.size() &&
           (std::isspace(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == ',')) {
      ++pos_;
    }
  }

  Nested list() {
    Nested n;
    ++pos_;  // '{'
    for (;;) {
      skip();
      if (pos_ >= text_.size()) throw ParseError("SDPA solution: unterminated list");
      if (text_[pos_] == '}') {
        ++pos_;
        return n;
      }
      if (text_[pos_] == '{') {
        n.items.push_back(list());
        continue;
      }
      std::size_t end = pos_;
      while (end < text_.size() && text_[end] != ',' && text_[end] != '}' &&
             !std::isspace(static_cast<unsigned char>(text_[end]))) {
        ++end;
      }
      Nested leaf;
      leaf.is_number = true;
      const std::string tok = text_.substr(pos_, end - pos_);
      try {
        leaf.number = std::stod(tok);
      } catch (const std::exception&) {
        throw ParseError("SDPA solution: bad number '" + tok + "'");
      }
      n.items.push_back(leaf);
      pos_ = end;
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

std::string section_after(const std::string& text, const std::string& key) {
  const auto at = text.find(key);
  if (at == std::string::npos) {
    throw ParseError("SDPA solution: missing '" + key + "'");
  }
  const auto eq = text.find('=', at);
  if (eq == std::string::npos) {
    throw ParseError("SDPA solution: missing '=' after '" + key + "'");
  }
  return text.substr(eq + 1);
}

BlockMatrix read_blocks(const Nested& n, const SdpProblem& problem,
                        const char* what) {
  const std::size_t nb = problem.block_sizes.size();
  if (n.items.size() != nb) {
    throw ParseError(std::string("SDPA solution: ") + what + " has " +
                     std::to_string(n.items.size()) + " blocks, expected " +
                     std::to_string(nb));
  }
  BlockMatrix out = zero_blocks(problem);
  for (std::size_t b = 0; b < nb; ++b) {
    const int d = problem.block_dim(static_cast<int>(b));
    const Nested& blk = n.items[b];
    if (problem.is_diagonal(static_cast<int>(b))) {
      if (static_cast<int>(blk.items.size()) != d) {
        throw ParseError(std::string("SDPA solution: bad diagonal block in ") + what);
      }
      for (int i = 0; i < d; ++i) out[b](i, i) = blk.items[i].number;
      continue;
    }
    if (static_cast<int>(blk.items.size()) != d) {
      throw ParseError(std::string("SDPA solution: bad block in ") + what);
    }
    for (int i = 0; i < d; ++i) {
      const Nested& row = blk.items[i];
      if (row.is_number && d == 1) {
        out[b](0, 0) = row.number;
        continue;
      }
      if (static_cast<int>(row.items.size()) != d) {
        throw ParseError(std::string("SDPA solution: bad row in ") + what);
      }
      for (int j = 0; j < d; ++j) out[b](i, j) = row.items[j].number;
    }
  }
  return out;
}

void write_blocks(std::ostringstream& out, const BlockMatrix& m,
                  const SdpProblem& problem) {
  out << "{\n";
  for (std::size_t b = 0; b < m.size(); ++b) {
    const int d = problem.block_dim(static_cast<int>(b));
    if (problem.is_diagonal(static_cast<int>(b))) {
      out << "{";
      for (int i = 0; i < d; ++i) out << (i ? "," : "") << m[b](i, i);
      out << "}\n";
      continue;
    }
    out << "{\n";
    for (int i = 0; i < d; ++i) {
      out << "{";
      for (int j = 0; j < d; ++j) out << (j ? "," : "") << m[b](i, j);
      out << "}" << (i + 1 < d ? ",\n" : "\n");
    }
    out << "}\n";
  }
  out << "}\n";
}

}  // namespace

std::string export_sdpa(const SdpProblem& problem) {
  problem.validate();
  std::ostringstream out;
  out << std::setprecision(17);
  out << problem.constraints.size() << '\n';
  if (problem.block_sizes.empty()) {
    // The format needs at least one block; a zero 1x1 diagonal one is inert.
    out << "1\n-1\n";
  } else {
    out << problem.block_sizes.size() << '\n';
    for (std::size_t b = 0; b < problem.block_sizes.size(); ++b) {
      out << (b ? " " : "") << problem.block_sizes[b];
    }
    out << '\n';
  }
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    out << (i ? " " : "") << problem.constraints[i].rhs;
  }
  out << '\n';
  for (const auto& e : problem.objective) {
    if (e.value != 0.0) write_entry(out, 0, e, -e.value);
  }
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    for (const auto& e : problem.constraints[i].entries) {
      if (e.value != 0.0) write_entry(out, static_cast<int>(i) + 1, e, e.value);
    }
  }
  return out.str();
}

SdpProblem import_sdpa(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  // Header values may share lines, so collect them token by token.
  std::vector<std::pair<std::string, int>> header;
  int m = -1;
  int nblocks = -1;
  SdpProblem problem;
  auto next_header_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (is_comment(line)) continue;
      for (auto& t : tokens(line)) header.emplace_back(t, line_no);
      return true;
    }
    return false;
  };
  auto take = [&]() -> std::pair<std::string, int> {
    while (header.empty()) {
      if (!next_header_line()) throw ParseError("unexpected end of SDPA input");
    }
    auto t = header.front();
    header.erase(header.begin());
    return t;
  };

  {
    auto t = take();
    m = parse_int(t.first, t.second);
    // Only the first token of each header line is significant for m and
    // nBlocks; SDPA writers often append comments.
    header.clear();
    t = take();
    nblocks = parse_int(t.first, t.second);
    header.clear();
  }
  if (m < 0 || nblocks <= 0) throw ParseError("line " + std::to_string(line_no) +
                                              ": bad problem size");
  for (int b = 0; b < nblocks; ++b) {
    auto t = take();
    const int size = parse_int(t.first, t.second);
    if (size == 0) throw ParseError("line " + std::to_string(t.second) +
                                    ": zero block size");
    problem.block_sizes.push_back(size);
  }
  header.clear();
  problem.constraints.resize(m);
  for (int i = 0; i < m; ++i) {
    auto t = take();
    problem.constraints[i].rhs = parse_double(t.first, t.second);
  }
  header.clear();

  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment(line)) continue;
    auto tok = tokens(line);
    if (tok.size() < 5) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected 'mat block row col value'");
    }
    const int mat = parse_int(tok[0], line_no);
    const int blk = parse_int(tok[1], line_no) - 1;
    int r = parse_int(tok[2], line_no) - 1;
    int c = parse_int(tok[3], line_no) - 1;
    const double v = parse_double(tok[4], line_no);
    if (mat < 0 || mat > m) {
      throw ParseError("line " + std::to_string(line_no) + ": matrix index out of range");
    }
    if (blk < 0 || blk >= nblocks) {
      throw ParseError("line " + std::to_string(line_no) + ": block index out of range");
    }
    const int d = std::abs(problem.block_sizes[blk]);
    if (r < 0 || c < 0 || r >= d || c >= d) {
      throw ParseError("line " + std::to_string(line_no) + ": entry index out of range");
    }
    if (r > c) std::swap(r, c);
    if (problem.block_sizes[blk] < 0 && r != c) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": off-diagonal entry in a diagonal block");
    }
    SymEntry e{blk, r, c, v};
    if (mat == 0) {
      e.value = -v;
      problem.objective.push_back(e);
    } else {
      problem.constraints[mat - 1].entries.push_back(e);
    }
  }
  return problem;
}

SdpSolution import_sdpa_solution(const std::string& text,
                                 const SdpProblem& problem) {
  SdpSolution sol;
  sol.status = SdpStatus::MaxIter;
  const auto phase_at = text.find("phase.value");
  if (phase_at != std::string::npos) {
    std::istringstream in(section_after(text.substr(phase_at), "phase.value"));
    std::string phase;
    in >> phase;
    if (phase == "pdOPT") {
      sol.status = SdpStatus::Optimal;
    } else if (phase == "pFEAS_dINF" || phase == "pUNBD") {
      // SDPA's dual is our primal.
      sol.status = SdpStatus::Infeasible;
    } else if (phase == "pINF_dFEAS" || phase == "dUNBD") {
      sol.status = SdpStatus::Unbounded;
    }
  }

  const Nested xvec = NestedParser(section_after(text, "xVec")).parse();
  if (xvec.items.size() != problem.constraints.size()) {
    throw ParseError("SDPA solution: xVec has " + std::to_string(xvec.items.size()) +
                     " entries, expected " +
                     std::to_string(problem.constraints.size()));
  }
  sol.y.resize(static_cast<Eigen::Index>(xvec.items.size()));
  for (std::size_t i = 0; i < xvec.items.size(); ++i) {
    sol.y(static_cast<Eigen::Index>(i)) = -xvec.items[i].number;
  }
  sol.S = read_blocks(NestedParser(section_after(text, "xMat")).parse(), problem,
                      "xMat");
  sol.X = read_blocks(NestedParser(section_after(text, "yMat")).parse(), problem,
                      "yMat");
  compute_residuals(problem, sol);
  return sol;
}

std::string export_sdpa_solution(const SdpSolution& solution,
                                 const SdpProblem& problem) {
  std::ostringstream out;
  out << std::setprecision(17);
  const char* phase = "noINFO";
  switch (solution.status) {
    case SdpStatus::Optimal: phase = "pdOPT"; break;
    case SdpStatus::Infeasible: phase = "pFEAS_dINF"; break;
    case SdpStatus::Unbounded: phase = "pINF_dFEAS"; break;
    case SdpStatus::MaxIter: phase = "noINFO"; break;
  }
  out << "phase.value  = " << phase << '\n';
  out << "objValPrimal = " << -solution.dual_objective << '\n';
  out << "objValDual   = " << -solution.primal_objective << '\n';
  out << "xVec = \n{";
  for (Eigen::Index i = 0; i < solution.y.size(); ++i) {
    out << (i ? "," : "") << -solution.y(i);
  }
  out << "}\n";
  out << "xMat = \n";
  write_blocks(out, solution.S, problem);
  out << "yMat = \n";
  write_blocks(out, solution.X, problem);
  return out.str();
}

}  // namespace pisos
