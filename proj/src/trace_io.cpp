#include <string>

#include "ail/certificates.hpp"
#include "ail/error.hpp"
#include "ail/format.hpp"

namespace ail {

namespace {

constexpr const char* kHeader = "k,V,W,X,e,tau,gamma";

void cell(std::string& out, const std::vector<double>& s, std::size_t k) {
  out += ',';
  if (!s.empty()) out += fmt_real(s[k]);
}

}  // namespace

std::string trace_to_csv(const Trace& t) {
  t.validate();
  std::string out = kHeader;
  out += '\n';
  for (std::size_t k = 0; k < t.size(); ++k) {
    out += std::to_string(k);
    out += ',';
    out += fmt_real(t.V[k]);
    cell(out, t.W, k);
    cell(out, t.X, k);
    cell(out, t.e, k);
    out += ',';
    out += std::to_string(t.delays[k]);
    cell(out, t.gamma, k);
    out += '\n';
  }
  return out;
}

Trace trace_from_csv(std::string_view text) {
  auto lines = split(text, '\n');
  if (lines.empty() || trim(lines[0]) != kHeader)
    throw Error(Errc::parse_error, std::string("trace CSV must start with header ") + kHeader);
  Trace t;
  std::vector<double>* optional_cols[] = {&t.W, &t.X, &t.e};
  bool present[4] = {false, false, false, false};  // W, X, e, gamma
  bool decided = false;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    auto line = trim(lines[li]);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != 7) throw Error(Errc::parse_error, "trace row " + std::to_string(li) + " needs 7 cells");
    auto k = parse_u64(cells[0]);
    if (!k || *k != t.V.size()) throw Error(Errc::parse_error, "trace rows must be numbered 0,1,2,... (row " + std::to_string(li) + ")");
    auto v = parse_real(cells[1]);
    if (!v) throw Error(Errc::parse_error, "bad V in row " + std::to_string(li));
    t.V.push_back(*v);
    std::string_view opt[4] = {cells[2], cells[3], cells[4], cells[6]};
    if (!decided) {
      for (int i = 0; i < 4; ++i) present[i] = !trim(opt[i]).empty();
      decided = true;
    }
    for (int i = 0; i < 4; ++i) {
      bool has = !trim(opt[i]).empty();
      if (has != present[i]) throw Error(Errc::parse_error, "optional trace column is partially filled (row " + std::to_string(li) + ")");
      if (!has) continue;
      auto x = parse_real(opt[i]);
      if (!x) throw Error(Errc::parse_error, "bad number in row " + std::to_string(li));
      if (i < 3) optional_cols[i]->push_back(*x);
      else t.gamma.push_back(*x);
    }
    auto tau = parse_u64(cells[5]);
    if (!tau) throw Error(Errc::parse_error, "bad tau in row " + std::to_string(li));
    t.delays.push_back(static_cast<std::size_t>(*tau));
  }
  t.validate();
  return t;
}

}  // namespace ail
