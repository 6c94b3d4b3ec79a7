#include "conerepair/problem_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace conerepair {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_value(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Tokenized line reader tracking 1-based line numbers; skips blank lines and
// '#' comments.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::vector<std::string>* tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      std::istringstream ss(line);
      tokens->clear();
      std::string tok;
      while (ss >> tok) tokens->push_back(tok);
      if (!tokens->empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(line_, message);
  }

  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 0;
};

Index parse_count(LineReader& reader, const std::string& tok,
                  const char* what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(tok, &pos);
    if (pos != tok.size() || v < 0) throw std::invalid_argument(tok);
    return static_cast<Index>(v);
  } catch (const std::exception&) {
    reader.fail(std::string("expected nonnegative integer for ") + what +
                ", got '" + tok + "'");
  }
}

double parse_value(LineReader& reader, const std::string& tok) {
  if (tok == "inf") return kInf;
  if (tok == "-inf") return -kInf;
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    reader.fail("expected numeric value, got '" + tok + "'");
  }
}

SparseMatrix parse_sparse_matrix(LineReader& reader, Index count, Index m,
                                 Index n) {
  std::vector<Triplet> entries;
  entries.reserve(count);
  std::vector<std::string> toks;
  for (Index i = 0; i < count; ++i) {
    if (!reader.next(&toks)) reader.fail("unexpected end of file in matrix");
    if (toks.size() != 3) reader.fail("expected 'row col value'");
    const Index row = parse_count(reader, toks[0], "row");
    const Index col = parse_count(reader, toks[1], "col");
    if (row >= m || col >= n) reader.fail("matrix entry index out of range");
    entries.push_back({row, col, parse_value(reader, toks[2])});
  }
  return SparseMatrix(m, n, std::move(entries));
}

Vector parse_sparse_vector(LineReader& reader, Index count, Index dim) {
  Vector out = Vector::Zero(dim);
  std::vector<std::string> toks;
  for (Index i = 0; i < count; ++i) {
    if (!reader.next(&toks)) reader.fail("unexpected end of file in vector");
    if (toks.size() != 2) reader.fail("expected 'index value'");
    const Index idx = parse_count(reader, toks[0], "index");
    if (idx >= dim) reader.fail("vector index out of range");
    out[idx] += parse_value(reader, toks[1]);
  }
  return out;
}

void serialize_sparse_vector(std::ostream& out, const char* name,
                             const Vector& v) {
  Index nnz = 0;
  for (Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) ++nnz;
  }
  out << name << " " << nnz << "\n";
  for (Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) out << i << " " << format_value(v[i]) << "\n";
  }
}

void serialize_sparse_matrix(std::ostream& out, const char* name,
                             const SparseMatrix& A) {
  out << name << " " << A.entries().size() << "\n";
  for (const Triplet& t : A.entries()) {
    out << t.row << " " << t.col << " " << format_value(t.value) << "\n";
  }
}

}  // namespace

ProblemFile parse_problem(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string> toks;

  if (!reader.next(&toks) || toks.size() != 2 || toks[0] != "conerepair" ||
      toks[1] != "v1") {
    reader.fail("expected header 'conerepair v1'");
  }

  if (!reader.next(&toks) || toks.size() != 7 || toks[0] != "dims" ||
      toks[1] != "n" || toks[3] != "m" || toks[5] != "k") {
    reader.fail("expected 'dims n <n> m <m> k <k>'");
  }
  const Index n = parse_count(reader, toks[2], "n");
  const Index m = parse_count(reader, toks[4], "m");
  const Index k = parse_count(reader, toks[6], "k");

  if (!reader.next(&toks) || toks.size() != 2 || toks[0] != "cones") {
    reader.fail("expected 'cones <count>'");
  }
  const Index num_blocks = parse_count(reader, toks[1], "cone block count");
  ConeDescriptor cones;
  for (Index i = 0; i < num_blocks; ++i) {
    if (!reader.next(&toks) || toks.size() != 2) {
      reader.fail("expected cone block '<kind> <dim>'");
    }
    ConeKind kind;
    if (toks[0] == "zero") kind = ConeKind::Zero;
    else if (toks[0] == "nonneg") kind = ConeKind::NonNeg;
    else if (toks[0] == "soc") kind = ConeKind::Soc;
    else reader.fail("unknown cone kind '" + toks[0] + "'");
    const Index dim = parse_count(reader, toks[1], "cone dim");
    if (dim < 1) reader.fail("cone block dim must be >= 1");
    cones.append(kind, dim);
  }
  if (cones.total_dim() != m) {
    reader.fail("cone dimensions sum to " + std::to_string(cones.total_dim()) +
                ", expected m = " + std::to_string(m));
  }

  auto expect_section = [&](const char* name) -> Index {
    if (!reader.next(&toks) || toks.size() != 2 || toks[0] != name) {
      reader.fail(std::string("expected section '") + name + " <count>'");
    }
    return parse_count(reader, toks[1], "entry count");
  };

  SparseMatrix A0 = parse_sparse_matrix(reader, expect_section("A"), m, n);
  Vector b0 = parse_sparse_vector(reader, expect_section("b"), m);
  Vector c0 = parse_sparse_vector(reader, expect_section("c"), n);

  std::vector<ParamIncrement> increments(k);
  for (Index p = 0; p < k; ++p) {
    if (!reader.next(&toks) || toks.size() != 2 || toks[0] != "param") {
      reader.fail("expected 'param " + std::to_string(p) + "'");
    }
    if (parse_count(reader, toks[1], "param index") != p) {
      reader.fail("param sections must appear in order");
    }
    ParamIncrement inc;
    inc.A = SparseMatrix(m, n);
    inc.b = Vector::Zero(m);
    inc.c = Vector::Zero(n);
    // Optional A/b/c subsections, terminated by 'endparam'.
    while (true) {
      std::vector<std::string> peek;
      if (!reader.next(&peek)) reader.fail("unexpected end of file in params");
      if (peek[0] == "A" && peek.size() == 2) {
        inc.A = parse_sparse_matrix(reader,
                                    parse_count(reader, peek[1], "count"), m,
                                    n);
      } else if (peek[0] == "b" && peek.size() == 2) {
        inc.b = parse_sparse_vector(reader,
                                    parse_count(reader, peek[1], "count"), m);
      } else if (peek[0] == "c" && peek.size() == 2) {
        inc.c = parse_sparse_vector(reader,
                                    parse_count(reader, peek[1], "count"), n);
      } else if (peek[0] == "endparam" && peek.size() == 1) {
        break;
      } else {
        reader.fail("unknown key '" + peek[0] + "' in param section");
      }
    }
    increments[p] = std::move(inc);
  }

  if (!reader.next(&toks) || toks.size() != 2 || toks[0] != "theta0") {
    reader.fail("expected 'theta0 <k>'");
  }
  if (parse_count(reader, toks[1], "theta0 length") != k) {
    reader.fail("theta0 length must equal k");
  }
  Vector theta0(k);
  for (Index i = 0; i < k; ++i) {
    if (!reader.next(&toks) || toks.size() != 1) {
      reader.fail("expected one theta0 value per line");
    }
    theta0[i] = parse_value(reader, toks[0]);
  }

  if (!reader.next(&toks) || toks.size() != 2 || toks[0] != "regularizer") {
    reader.fail("expected 'regularizer <atom count>'");
  }
  const Index natoms = parse_count(reader, toks[1], "atom count");
  std::vector<RegAtom> atoms;
  for (Index a = 0; a < natoms; ++a) {
    if (!reader.next(&toks) || toks.size() != 3 || toks[0] != "atom") {
      reader.fail("expected 'atom <kind> <count>'");
    }
    RegAtom atom;
    bool is_box = false;
    if (toks[1] == "l1") atom.kind = AtomKind::ScaledL1;
    else if (toks[1] == "l2sq") atom.kind = AtomKind::ScaledL2Sq;
    else if (toks[1] == "box") { atom.kind = AtomKind::BoxIndicator; is_box = true; }
    else reader.fail("unknown atom kind '" + toks[1] + "'");
    const Index count = parse_count(reader, toks[2], "atom entry count");
    atom.coords.resize(count);
    if (is_box) {
      atom.lower.resize(count);
      atom.upper.resize(count);
    } else {
      atom.weights.resize(count);
      atom.centers.resize(count);
    }
    for (Index i = 0; i < count; ++i) {
      if (!reader.next(&toks) || toks.size() != 3) {
        reader.fail(is_box ? "expected '<coord> <lower> <upper>'"
                           : "expected '<coord> <weight> <center>'");
      }
      const Index coord = parse_count(reader, toks[0], "coordinate");
      if (coord >= k) reader.fail("atom coordinate out of range");
      atom.coords[i] = coord;
      if (is_box) {
        atom.lower[i] = parse_value(reader, toks[1]);
        atom.upper[i] = parse_value(reader, toks[2]);
      } else {
        atom.weights[i] = parse_value(reader, toks[1]);
        atom.centers[i] = parse_value(reader, toks[2]);
      }
    }
    atoms.push_back(std::move(atom));
  }

  if (!reader.next(&toks) || toks.size() != 1 || toks[0] != "end") {
    reader.fail("expected 'end'");
  }
  if (reader.next(&toks)) {
    reader.fail("unexpected content after 'end'");
  }

  ProblemFile out;
  try {
    out.pcp = ParamConeProgram(std::move(A0), std::move(b0), std::move(c0),
                               std::move(cones), std::move(increments));
    out.regularizer = Regularizer(k, std::move(atoms));
  } catch (const std::invalid_argument& e) {
    reader.fail(e.what());
  }
  out.theta0 = std::move(theta0);
  return out;
}

ProblemFile parse_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(0, "cannot open file '" + path + "'");
  }
  return parse_problem(in);
}

void serialize_problem(const ProblemFile& problem, std::ostream& out) {
  const ParamConeProgram& pcp = problem.pcp;
  out << "conerepair v1\n";
  out << "dims n " << pcp.n() << " m " << pcp.m() << " k " << pcp.num_params()
      << "\n";
  out << "cones " << pcp.cones().blocks().size() << "\n";
  for (const ConeBlock& blk : pcp.cones().blocks()) {
    const char* kind = blk.kind == ConeKind::Zero ? "zero"
                       : blk.kind == ConeKind::NonNeg ? "nonneg" : "soc";
    out << kind << " " << blk.dim << "\n";
  }
  serialize_sparse_matrix(out, "A", pcp.A0());
  serialize_sparse_vector(out, "b", pcp.b0());
  serialize_sparse_vector(out, "c", pcp.c0());
  for (Index p = 0; p < pcp.num_params(); ++p) {
    const ParamIncrement& inc = pcp.increments()[p];
    out << "param " << p << "\n";
    if (!inc.A.entries().empty()) serialize_sparse_matrix(out, "A", inc.A);
    if (!inc.b.isZero(0.0)) serialize_sparse_vector(out, "b", inc.b);
    if (!inc.c.isZero(0.0)) serialize_sparse_vector(out, "c", inc.c);
    out << "endparam\n";
  }
  out << "theta0 " << problem.theta0.size() << "\n";
  for (Index i = 0; i < problem.theta0.size(); ++i) {
    out << format_value(problem.theta0[i]) << "\n";
  }
  out << "regularizer " << problem.regularizer.atoms().size() << "\n";
  for (const RegAtom& atom : problem.regularizer.atoms()) {
    const bool is_box = atom.kind == AtomKind::BoxIndicator;
    const char* kind = atom.kind == AtomKind::ScaledL1 ? "l1"
                       : atom.kind == AtomKind::ScaledL2Sq ? "l2sq" : "box";
    out << "atom " << kind << " " << atom.coords.size() << "\n";
    for (std::size_t i = 0; i < atom.coords.size(); ++i) {
      const auto idx = static_cast<Index>(i);
      out << atom.coords[i] << " ";
      if (is_box) {
        out << format_value(atom.lower[idx]) << " "
            << format_value(atom.upper[idx]) << "\n";
      } else {
        out << format_value(atom.weights[idx]) << " "
            << format_value(atom.centers[idx]) << "\n";
      }
    }
  }
  out << "end\n";
}

std::string serialize_problem(const ProblemFile& problem) {
  std::ostringstream ss;
  serialize_problem(problem, ss);
  return ss.str();
}

void write_problem_file(const ProblemFile& problem, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write file '" + path + "'");
  }
  serialize_problem(problem, out);
}

}  // namespace conerepair
