#include <string>

#include "ail/error.hpp"
#include "ail/format.hpp"
#include "ail/problems.hpp"

namespace ail {

namespace {

std::string row_text(const Eigen::Ref<const Vec>& v) {
  std::string out;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (j) out += ',';
    out += fmt_real(v[j]);
  }
  return out;
}

Vec parse_row(std::string_view line, Eigen::Index expect, std::size_t lineno) {
  auto cells = split(line, ',');
  if (static_cast<Eigen::Index>(cells.size()) != expect)
    throw Error(Errc::parse_error, "line " + std::to_string(lineno) + ": expected " + std::to_string(expect) + " values");
  Vec v(expect);
  for (Eigen::Index j = 0; j < expect; ++j) {
    auto x = parse_real(cells[static_cast<std::size_t>(j)]);
    if (!x) throw Error(Errc::parse_error, "line " + std::to_string(lineno) + ": bad number");
    v[j] = *x;
  }
  return v;
}

}  // namespace

std::string serialize_problem(const SmoothSum& p) {
  std::string out;
  out += "family = ";
  out += smooth_family_name(p.family());
  out += "\nrows = " + std::to_string(p.A().rows());
  out += "\ncols = " + std::to_string(p.A().cols());
  out += "\n[A]\n";
  for (Eigen::Index i = 0; i < p.A().rows(); ++i) out += row_text(p.A().row(i).transpose()) + "\n";
  out += "[b]\n" + row_text(p.b()) + "\n";
  return out;
}

SmoothSum parse_problem(std::string_view text) {
  std::string family;
  Eigen::Index rows = -1, cols = -1;
  Mat A;
  Vec b;
  bool have_b = false;
  Eigen::Index next_row = 0;
  enum { header, in_a, in_b } state = header;
  std::size_t lineno = 0;
  for (auto raw : split(text, '\n')) {
    ++lineno;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line == "[A]") {
      if (rows <= 0 || cols <= 0) throw Error(Errc::parse_error, "rows and cols must precede [A]");
      A.resize(rows, cols);
      state = in_a;
      continue;
    }
    if (line == "[b]") {
      state = in_b;
      continue;
    }
    if (state == header) {
      auto eq = line.find('=');
      if (eq == std::string_view::npos) throw Error(Errc::parse_error, "line " + std::to_string(lineno) + ": expected key = value");
      auto key = trim(line.substr(0, eq));
      auto val = trim(line.substr(eq + 1));
      if (key == "family") family = std::string(val);
      else if (key == "rows" || key == "cols") {
        auto v = parse_int(val);
        if (!v || *v <= 0) throw Error(Errc::parse_error, "line " + std::to_string(lineno) + ": bad size");
        (key == "rows" ? rows : cols) = static_cast<Eigen::Index>(*v);
      } else {
        throw Error(Errc::parse_error, "line " + std::to_string(lineno) + ": unknown key " + std::string(key));
      }
    } else if (state == in_a) {
      if (next_row >= rows) throw Error(Errc::parse_error, "too many rows in [A]");
      A.row(next_row++) = parse_row(line, cols, lineno).transpose();
    } else {
      if (have_b) throw Error(Errc::parse_error, "[b] must be a single line");
      b = parse_row(line, family == "quadratic" ? cols : rows, lineno);
      have_b = true;
    }
  }
  if (next_row != rows || !have_b) throw Error(Errc::parse_error, "incomplete problem document");
  if (family == "least-squares") return SmoothSum::least_squares(std::move(A), std::move(b));
  if (family == "logistic") return SmoothSum::logistic(std::move(A), std::move(b));
  if (family == "quadratic") return SmoothSum::quadratic(std::move(A), std::move(b));
  throw Error(Errc::unsupported_family, "unknown problem family '" + family + "'");
}

}  // namespace ail
