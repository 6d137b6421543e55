#include <charconv>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "imli/maxsat.hpp"

namespace imli {

const char *to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimum: return "optimum";
    case SolveStatus::best_found: return "best_found";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::timeout_no_solution: return "timeout_no_solution";
    case SolveStatus::solver_error: return "solver_error";
  }
  return "?";
}

WcnfDocument to_document(const MaxSatQuery &q) {
  WcnfDocument d;
  d.num_vars = q.vars.num_vars();
  d.soft = q.soft;
  d.hard = q.hard;
  Weight total = 0;
  for (const auto &c : q.soft) {
    if (c.weight > std::numeric_limits<Weight>::max() - 1 - total)
      throw UsageError("sum of soft weights overflows 64-bit WCNF top weight");
    total += c.weight;
  }
  d.top = total + 1;
  return d;
}

std::string to_wcnf(const MaxSatQuery &q, WcnfDialect dialect) {
  const WcnfDocument d = to_document(q);
  std::string out;
  out.reserve(16 * (d.soft.size() + d.hard.size()) + 32);
  auto put_lits = [&](const Clause &c) {
    for (Lit l : c) {
      out += ' ';
      out += std::to_string(l);
    }
    out += " 0\n";
  };
  if (dialect == WcnfDialect::classic) {
    out += "p wcnf " + std::to_string(d.num_vars) + ' ' +
           std::to_string(d.soft.size() + d.hard.size()) + ' ' + std::to_string(d.top) + '\n';
  }
  for (const auto &c : d.soft) {
    out += std::to_string(c.weight);
    put_lits(c.lits);
  }
  const std::string hard_tag = dialect == WcnfDialect::classic ? std::to_string(d.top) : "h";
  for (const auto &c : d.hard) {
    out += hard_tag;
    put_lits(c);
  }
  return out;
}

namespace {

template <class T>
bool parse_int(const std::string &tok, T &out) {
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && p == tok.data() + tok.size();
}

}  // namespace

WcnfDocument parse_wcnf(const std::string &text) {
  WcnfDocument d;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  std::optional<Weight> top;
  std::size_t declared_clauses = 0;
  std::size_t line_no = 0;
  std::size_t max_var = 0;

  auto fail = [&](const std::string &why) {
    throw DataError("WCNF line " + std::to_string(line_no) + ": " + why);
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok[0] == 'c') continue;
    if (tok == "p") {
      std::string fmt, nv, nc, tp;
      ls >> fmt >> nv >> nc;
      if (fmt != "wcnf" || !parse_int(nv, d.num_vars) || !parse_int(nc, declared_clauses))
        fail("bad header");
      if (ls >> tp) {
        Weight t = 0;
        if (!parse_int(tp, t)) fail("bad top weight");
        top = t;
      }
      have_header = true;
      continue;
    }
    bool hard = false;
    Weight w = 0;
    if (tok == "h") {
      hard = true;
    } else {
      if (!parse_int(tok, w) || w == 0) fail("bad clause weight '" + tok + "'");
      if (top && w >= *top) hard = true;
    }
    Clause c;
    bool terminated = false;
    while (ls >> tok) {
      Lit l = 0;
      if (!parse_int(tok, l)) fail("bad literal '" + tok + "'");
      if (l == 0) {
        terminated = true;
        break;
      }
      max_var = std::max<std::size_t>(max_var, static_cast<std::size_t>(std::abs(l)));
      c.push_back(l);
    }
    if (!terminated) fail("clause not terminated by 0");
    if (hard) {
      d.hard.push_back(std::move(c));
    } else {
      d.soft.push_back({std::move(c), w});
    }
  }
  if (have_header) {
    if (max_var > d.num_vars) throw DataError("WCNF literal exceeds declared variable count");
    if (declared_clauses != d.soft.size() + d.hard.size())
      throw DataError("WCNF clause count differs from header");
  } else {
    d.num_vars = max_var;
  }
  Weight total = 0;
  for (const auto &c : d.soft) total += c.weight;
  d.top = top ? *top : total + 1;
  return d;
}

SolveOutcome parse_solver_output(const std::string &text, std::size_t num_vars) {
  SolveOutcome out;
  std::istringstream in(text);
  std::string line;
  std::optional<std::string> status;
  std::vector<std::string> vtokens;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() < 2 || line[1] != ' ') continue;
    const std::string rest = line.substr(2);
    switch (line[0]) {
      case 's': {
        auto b = rest.find_first_not_of(' ');
        status = b == std::string::npos ? "" : rest.substr(b);
        break;
      }
      case 'o': {
        std::istringstream ls(rest);
        std::string tok;
        Weight w = 0;
        if (ls >> tok && parse_int(tok, w)) out.weight = w;
        break;
      }
      case 'v': {
        std::istringstream ls(rest);
        std::string tok;
        while (ls >> tok) vtokens.push_back(tok);
        break;
      }
      default: break;
    }
  }

  if (!vtokens.empty()) {
    const std::string &only = vtokens.front();
    const bool bitstring = vtokens.size() == 1 &&
                           only.find_first_not_of("01") == std::string::npos &&
                           (only != "0" || num_vars == 1);
    Assignment a;
    if (bitstring) {
      if (num_vars && only.size() != num_vars) {
        out.status = SolveStatus::solver_error;
        out.message = "model bit string has " + std::to_string(only.size()) +
                      " entries, expected " + std::to_string(num_vars);
        return out;
      }
      a.assign(only.size() + 1, 0);
      for (std::size_t i = 0; i < only.size(); ++i) a[i + 1] = only[i] == '1';
    } else {
      a.assign(num_vars + 1, 0);
      std::vector<std::uint8_t> seen(num_vars + 1, 0);
      for (const auto &tok : vtokens) {
        long lit = 0;
        if (!parse_int(tok, lit)) {
          out.status = SolveStatus::solver_error;
          out.message = "bad model literal '" + tok + "'";
          return out;
        }
        if (lit == 0) continue;
        const auto var = static_cast<std::size_t>(std::labs(lit));
        if (num_vars && var > num_vars) {
          out.status = SolveStatus::solver_error;
          out.message = "model mentions variable " + std::to_string(var) + " beyond " +
                        std::to_string(num_vars);
          return out;
        }
        if (var >= a.size()) {
          a.resize(var + 1, 0);
          seen.resize(var + 1, 0);
        }
        a[var] = lit > 0;
        seen[var] = 1;
      }
      for (std::size_t v = 1; v <= num_vars; ++v) {
        if (!seen[v]) {
          out.status = SolveStatus::solver_error;
          out.message = "model leaves variable " + std::to_string(v) + " unassigned";
          return out;
        }
      }
    }
    out.assignment = std::move(a);
  }

  if (!status) {
    out.status = SolveStatus::solver_error;
    out.message = "solver output has no status line";
  } else if (*status == "OPTIMUM FOUND") {
    out.status = SolveStatus::optimum;
  } else if (*status == "SATISFIABLE") {
    out.status = SolveStatus::best_found;
  } else if (*status == "UNSATISFIABLE") {
    out.status = SolveStatus::infeasible;
    out.assignment.clear();
  } else if (*status == "UNKNOWN") {
    out.status = out.weight ? SolveStatus::best_found : SolveStatus::timeout_no_solution;
  } else {
    out.status = SolveStatus::solver_error;
    out.message = "unrecognised status line 's " + *status + "'";
  }
  return out;
}

}  // namespace imli
