#ifndef CONEREPAIR_PROBLEM_IO_HPP_
#define CONEREPAIR_PROBLEM_IO_HPP_

#include <iosfwd>
#include <string>

#include "conerepair/regularizer.hpp"
#include "conerepair/types.hpp"

namespace conerepair {

// Parse failure with the 1-based line number where it was detected.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A parsed problem file: the parametrized program, the starting parameter,
// and the performance metric.
struct ProblemFile {
  ParamConeProgram pcp;
  Vector theta0;
  Regularizer regularizer{0, {}};
};

// Line-oriented text format, explicit dims first, sparse entries as
// "index value" / "row col value" lines. Values are written with 17
// significant digits so serialize/parse round-trips bit-exactly.
ProblemFile parse_problem(std::istream& in);
ProblemFile parse_problem_file(const std::string& path);

void serialize_problem(const ProblemFile& problem, std::ostream& out);
std::string serialize_problem(const ProblemFile& problem);
void write_problem_file(const ProblemFile& problem, const std::string& path);

}  // namespace conerepair

#endif  // CONEREPAIR_PROBLEM_IO_HPP_
