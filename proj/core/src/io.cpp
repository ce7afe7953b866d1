#include "psdcuts/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <tuple>

namespace psdcuts {
namespace {

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

class InstanceParser {
 public:
  QcqpProblem parse(std::string_view text) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t eol = std::min(text.find('\n', pos), text.size());
      std::string_view line = text.substr(pos, eol - pos);
      pos = eol + 1;
      ++line_;
      if (const auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);
      auto tokens = tokenize(line);
      if (!tokens.empty()) handle(tokens);
      if (eol == text.size()) break;
    }
    if (!header_) fail("missing 'QCQP <n> <m> <p>' header");
    finish();
    return std::move(problem_);
  }

 private:
  enum class Section { kNone, kBoundsX, kBoundsY, kQ, kA, kB };

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

  double number(std::string_view tok) const {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      fail("bad number '" + std::string(tok) + "'");
    return v;
  }

  Index index(std::string_view tok, Index count, const char* what) const {
    long long v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      fail(std::string("bad ") + what + " index '" + std::string(tok) + "'");
    if (v < 1 || v > count)
      fail(std::string(what) + " index " + std::string(tok) + " out of range 1.." +
           std::to_string(count));
    return static_cast<Index>(v - 1);
  }

  void handle(std::vector<std::string_view>& t) {
    const std::string_view kw = t[0];
    if (kw == "QCQP") {
      if (header_) fail("duplicate QCQP header");
      if (t.size() != 4) fail("expected 'QCQP <n> <m> <p>'");
      const auto count = [&](std::string_view tok) {
        long long v = -1;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || v < 0)
          fail("bad count '" + std::string(tok) + "'");
        return static_cast<Index>(v);
      };
      const Index n = count(t[1]), m = count(t[2]), p = count(t[3]);
      problem_ = QcqpProblem::zeros(n, m);
      problem_.x_lower.setConstant(std::nan(""));
      problem_.x_upper.setConstant(std::nan(""));
      problem_.y_lower.setConstant(std::nan(""));
      problem_.y_upper.setConstant(std::nan(""));
      problem_.constraints.assign(static_cast<std::size_t>(p),
                                  {Matrix::Zero(n, n), Vector::Zero(n), Vector::Zero(m), 0.0});
      con_seen_.assign(static_cast<std::size_t>(p), false);
      header_ = true;
      return;
    }
    if (!header_) fail("expected 'QCQP <n> <m> <p>' before '" + std::string(kw) + "'");

    std::size_t consumed = 0;
    if (kw == "BOUNDS") {
      if (t.size() < 2 || (t[1] != "X" && t[1] != "Y")) fail("expected 'BOUNDS X' or 'BOUNDS Y'");
      section_ = t[1] == "X" ? Section::kBoundsX : Section::kBoundsY;
      constraint_ = -1;
      consumed = 2;
    } else if (kw == "OBJ") {
      if (t.size() < 2) fail("expected 'OBJ Q|A|B'");
      section_ = subsection(t[1]);
      constraint_ = -1;
      consumed = 2;
    } else if (kw == "CON") {
      if (t.size() != 3) fail("expected 'CON <k> <c_k>'");
      constraint_ = index(t[1], problem_.p(), "constraint");
      if (con_seen_[static_cast<std::size_t>(constraint_)])
        fail("duplicate constraint " + std::string(t[1]));
      con_seen_[static_cast<std::size_t>(constraint_)] = true;
      const double rhs = number(t[2]);
      if (!std::isfinite(rhs)) fail("non-finite right-hand side");
      problem_.constraints[static_cast<std::size_t>(constraint_)].rhs = rhs;
      section_ = Section::kNone;
      return;
    } else if (kw == "Q" || kw == "A" || kw == "B") {
      if (constraint_ < 0) fail("'" + std::string(kw) + "' outside a CON block");
      section_ = subsection(kw);
      consumed = 1;
    } else if (!std::isdigit(static_cast<unsigned char>(kw[0])) && kw[0] != '-' &&
               kw[0] != '+' && kw[0] != '.') {
      fail("unknown section '" + std::string(kw) + "'");
    }
    if (consumed == t.size()) return;
    entry(std::span(t).subspan(consumed));
  }

  Section subsection(std::string_view s) const {
    if (s == "Q") return Section::kQ;
    if (s == "A") return Section::kA;
    if (s == "B") return Section::kB;
    fail("unknown section '" + std::string(s) + "'");
  }

  void entry(std::span<std::string_view> t) {
    const auto key = [&](int a, Index b, Index c) {
      if (!seen_.insert({constraint_, a, b, c}).second) fail("duplicate entry");
    };
    switch (section_) {
      case Section::kNone:
        fail("data line outside a section");
      case Section::kBoundsX:
      case Section::kBoundsY: {
        if (t.size() != 3) fail("expected 'index lower upper'");
        const bool x = section_ == Section::kBoundsX;
        const Index i = index(t[0], x ? problem_.n() : problem_.m(), x ? "x" : "y");
        const double lo = number(t[1]), up = number(t[2]);
        if (!std::isfinite(lo) || !std::isfinite(up)) fail("non-finite bound");
        if (lo > up) fail("lower bound exceeds upper bound");
        key(x ? 0 : 1, i, 0);
        (x ? problem_.x_lower : problem_.y_lower)[i] = lo;
        (x ? problem_.x_upper : problem_.y_upper)[i] = up;
        return;
      }
      case Section::kQ: {
        if (t.size() != 3) fail("expected 'i j q'");
        const Index i = index(t[0], problem_.n(), "x");
        const Index j = index(t[1], problem_.n(), "x");
        if (i > j) fail("triplet has i > j");
        const double v = number(t[2]);
        if (!std::isfinite(v)) fail("non-finite coefficient");
        key(2, i, j);
        Matrix& q = constraint_ < 0 ? problem_.q0 : con().q;
        q(i, j) = q(j, i) = v;
        return;
      }
      case Section::kA:
      case Section::kB: {
        if (t.size() != 2) fail("expected 'index value'");
        const bool a = section_ == Section::kA;
        const Index i = index(t[0], a ? problem_.n() : problem_.m(), a ? "x" : "y");
        const double v = number(t[1]);
        if (!std::isfinite(v)) fail("non-finite coefficient");
        key(a ? 3 : 4, i, 0);
        Vector& vec = constraint_ < 0 ? (a ? problem_.a0 : problem_.b0)
                                      : (a ? con().a : con().b);
        vec[i] = v;
        return;
      }
    }
  }

  QuadraticConstraint& con() {
    return problem_.constraints[static_cast<std::size_t>(constraint_)];
  }

  void finish() {
    for (Index i = 0; i < problem_.n(); ++i)
      if (std::isnan(problem_.x_lower[i]))
        fail("missing bound for x " + std::to_string(i + 1));
    for (Index j = 0; j < problem_.m(); ++j)
      if (std::isnan(problem_.y_lower[j]))
        fail("missing bound for y " + std::to_string(j + 1));
    for (std::size_t k = 0; k < con_seen_.size(); ++k)
      if (!con_seen_[k]) fail("missing CON block " + std::to_string(k + 1));
    problem_.normalize();
  }

  QcqpProblem problem_;
  bool header_ = false;
  int line_ = 0;
  Section section_ = Section::kNone;
  Index constraint_ = -1;
  std::vector<bool> con_seen_;
  std::set<std::tuple<Index, int, Index, Index>> seen_;
};

void write_quadratic(std::ostringstream& os, const Matrix& q) {
  for (Index i = 0; i < q.rows(); ++i)
    for (Index j = i; j < q.cols(); ++j)
      if (q(i, j) != 0.0) os << i + 1 << ' ' << j + 1 << ' ' << fmt(q(i, j)) << '\n';
}

void write_linear(std::ostringstream& os, const Vector& v) {
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) os << i + 1 << ' ' << fmt(v[i]) << '\n';
}

}  // namespace

QcqpProblem parse_instance(std::string_view text) { return InstanceParser().parse(text); }

std::string serialize_instance(const QcqpProblem& problem) {
  QcqpProblem p = problem;
  p.normalize();
  std::ostringstream os;
  os << "QCQP " << p.n() << ' ' << p.m() << ' ' << p.p() << '\n';
  os << "BOUNDS X\n";
  for (Index i = 0; i < p.n(); ++i)
    os << i + 1 << ' ' << fmt(p.x_lower[i]) << ' ' << fmt(p.x_upper[i]) << '\n';
  os << "BOUNDS Y\n";
  for (Index j = 0; j < p.m(); ++j)
    os << j + 1 << ' ' << fmt(p.y_lower[j]) << ' ' << fmt(p.y_upper[j]) << '\n';
  os << "OBJ Q\n";
  write_quadratic(os, p.q0);
  os << "OBJ A\n";
  write_linear(os, p.a0);
  os << "OBJ B\n";
  write_linear(os, p.b0);
  for (std::size_t k = 0; k < p.constraints.size(); ++k) {
    const auto& c = p.constraints[k];
    os << "CON " << k + 1 << ' ' << fmt(c.rhs) << '\n';
    os << "Q\n";
    write_quadratic(os, c.q);
    os << "A\n";
    write_linear(os, c.a);
    os << "B\n";
    write_linear(os, c.b);
  }
  return os.str();
}

QcqpProblem read_instance_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open instance file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_instance(buf.str());
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ":" + e.what());
  }
}

void write_instance_file(const std::string& path, const QcqpProblem& problem) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write instance file '" + path + "'");
  out << serialize_instance(problem);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::optional<double> find_opt_comment(std::string_view text) {
  std::size_t pos = 0;
  while ((pos = text.find("# opt=", pos)) != std::string_view::npos) {
    pos += 6;
    std::size_t end = pos;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    double v = 0.0;
    const auto res = std::from_chars(text.data() + pos, text.data() + end, v);
    if (res.ec == std::errc() && res.ptr == text.data() + end) return v;
  }
  return std::nullopt;
}

void write_mps(std::ostream& out, const ExtendedModel& model, const std::string& name) {
  const auto col_name = [&](Index col) -> std::string {
    const Index n = model.n();
    if (col < n) return "x" + std::to_string(col + 1);
    if (col >= model.y_col(0) && model.m() > 0)
      return "y" + std::to_string(col - model.y_col(0) + 1);
    for (Index i = 0; i < n; ++i)
      for (Index j = i; j < n; ++j)
        if (model.X_col(i, j) == col)
          return "X" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
    return "c" + std::to_string(col);
  };
  const auto& rows = model.rows();
  out << "NAME " << name << "\nOBJSENSE\n    MAX\nROWS\n N obj\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const char sense = row.lower == row.upper ? 'E'
                       : std::isfinite(row.upper) ? 'L'
                                                  : 'G';
    out << ' ' << sense << " r" << r + 1 << '\n';
  }
  std::vector<std::vector<std::pair<std::size_t, double>>> cols(
      static_cast<std::size_t>(model.num_columns()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& [c, v] : rows[r].terms) cols[static_cast<std::size_t>(c)].emplace_back(r, v);
  out << "COLUMNS\n";
  for (Index c = 0; c < model.num_columns(); ++c) {
    const std::string cn = col_name(c);
    if (model.objective()[c] != 0.0) out << "    " << cn << " obj " << fmt(model.objective()[c]) << '\n';
    for (const auto& [r, v] : cols[static_cast<std::size_t>(c)])
      out << "    " << cn << " r" << r + 1 << ' ' << fmt(v) << '\n';
  }
  out << "RHS\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const double rhs = std::isfinite(row.upper) ? row.upper : row.lower;
    if (rhs != 0.0) out << "    rhs r" << r + 1 << ' ' << fmt(rhs) << '\n';
  }
  bool any_range = false;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (std::isfinite(row.lower) && std::isfinite(row.upper) && row.lower != row.upper) {
      if (!any_range) out << "RANGES\n";
      any_range = true;
      out << "    rng r" << r + 1 << ' ' << fmt(row.upper - row.lower) << '\n';
    }
  }
  out << "BOUNDS\n";
  for (Index c = 0; c < model.num_columns(); ++c) {
    const std::string cn = col_name(c);
    const double lo = model.column_lower()[c], up = model.column_upper()[c];
    if (lo == up) {
      out << " FX bnd " << cn << ' ' << fmt(lo) << '\n';
    } else {
      out << " LO bnd " << cn << ' ' << fmt(lo) << '\n';
      out << " UP bnd " << cn << ' ' << fmt(up) << '\n';
    }
  }
  out << "ENDATA\n";
}

}  // namespace psdcuts
