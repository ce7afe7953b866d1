#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "psdcuts/model.hpp"

namespace psdcuts {

/// Malformed instance text; the message starts with "line <k>:".
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Reads the native instance format:
///
///   QCQP <n> <m> <p>
///   BOUNDS X        then lines  i l u   (1-based)
///   BOUNDS Y        then lines  j l u
///   OBJ Q           then lines  i j q   (i <= j; sets Q_ij = Q_ji = q)
///   OBJ A           then lines  i a
///   OBJ B           then lines  j b
///   CON <k> <c_k>   then Q / A / B subsections as above
///
/// A section keyword may also carry one entry inline (`OBJ Q 1 1 -1`).
/// `#` starts a comment. Every variable needs a finite bound pair.
QcqpProblem parse_instance(std::string_view text);

/// Canonical text: every section header present, zero entries omitted,
/// entries sorted by index, shortest round-trip decimal numbers.
std::string serialize_instance(const QcqpProblem& problem);

QcqpProblem read_instance_file(const std::string& path);
void write_instance_file(const std::string& path, const QcqpProblem& problem);

/// Value of a `# opt=<v>` comment, if the text has one.
std::optional<double> find_opt_comment(std::string_view text);

/// Free-format MPS of the lifted EXT+RLT LP (maximization, OBJSENSE MAX).
/// Column names: x<i>, X<i>_<j>, y<j>, all 1-based.
void write_mps(std::ostream& out, const ExtendedModel& model, const std::string& name);

/// Command-line entry point. Subcommands: solve, compare, tune, gen-boxqp.
/// Returns 0 on success, 2 on bad usage, 1 on any other error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace psdcuts
