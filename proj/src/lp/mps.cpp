#include "usc/lp/mps.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

namespace usc::lp {

namespace {

std::string number(double v, MpsFormat format) {
  if (format == MpsFormat::kFree) return fmt::format("{:.17g}", v);
  // Fixed fields hold 12 characters.
  for (int prec = 12; prec > 1; --prec) {
    std::string s = fmt::format("{:.{}g}", v, prec);
    if (s.size() <= 12) return s;
  }
  return fmt::format("{:.1e}", v);
}

class MpsWriter {
 public:
  MpsWriter(const LpProblem& p, std::ostream& out, MpsFormat format)
      : p_(p), out_(out), format_(format) {}

  std::string column(int j) const {
    return format_ == MpsFormat::kFree ? p_.names().column_name(j)
                                       : fmt::format("C{:07d}", j + 1);
  }
  std::string row(int i) const {
    return format_ == MpsFormat::kFree ? p_.names().row_name(i)
                                       : fmt::format("R{:07d}", i + 1);
  }

  // Data line with up to one (name, value) pair after the first name field.
  void data_line(const std::string& type, const std::string& f1,
                 const std::string& f2, double value) {
    if (format_ == MpsFormat::kFree) {
      out_ << ' ' << (type.empty() ? std::string("  ") : type) << ' ' << f1
           << ' ' << f2 << ' ' << number(value, format_) << '\n';
      return;
    }
    // Fields: 2-3 type, 5-12 name, 15-22 name, 25-36 value.
    out_ << fmt::format(" {:<2} {:<8}  {:<8}  {:>12}\n", type, f1, f2,
                        number(value, format_));
  }

  void header_line(const std::string& type, const std::string& f1) {
    if (format_ == MpsFormat::kFree) {
      out_ << ' ' << type << ' ' << f1 << '\n';
    } else {
      out_ << fmt::format(" {:<2} {}\n", type, f1);
    }
  }

 private:
  const LpProblem& p_;
  std::ostream& out_;
  MpsFormat format_;
};

}  // namespace

void write_mps(const LpProblem& problem, std::ostream& out, MpsFormat format,
               const std::string& name) {
  MpsWriter w(problem, out, format);
  const int n = problem.num_columns();
  const int m = problem.num_rows();

  out << fmt::format("NAME          {}\n", name);
  out << "ROWS\n";
  w.header_line("N", "OBJ");
  for (int i = 0; i < m; ++i) {
    const char* t = "E";
    if (problem.row(i).sense == Sense::kLessEqual) t = "L";
    if (problem.row(i).sense == Sense::kGreaterEqual) t = "G";
    w.header_line(t, w.row(i));
  }

  // Column-major view of the rows.
  std::vector<std::vector<std::pair<int, double>>> cols(n);
  for (int i = 0; i < m; ++i) {
    for (const Term& t : problem.row(i).terms) cols[t.col].emplace_back(i, t.value);
  }
  out << "COLUMNS\n";
  for (int j = 0; j < n; ++j) {
    const double c = problem.objective()[j];
    if (c != 0.0 || cols[j].empty()) w.data_line("", w.column(j), "OBJ", c);
    for (const auto& [i, v] : cols[j]) w.data_line("", w.column(j), w.row(i), v);
  }

  out << "RHS\n";
  for (int i = 0; i < m; ++i) {
    if (problem.row(i).rhs != 0.0) {
      w.data_line("", "RHS", w.row(i), problem.row(i).rhs);
    }
  }

  out << "BOUNDS\n";
  for (int j = 0; j < n; ++j) {
    const double lo = problem.lower()[j];
    const double up = problem.upper()[j];
    const std::string col = w.column(j);
    if (lo == up) {
      w.data_line("FX", "BND", col, lo);
      continue;
    }
    if (std::isinf(lo) && std::isinf(up)) {
      w.header_line("FR", "BND " + col);
      continue;
    }
    if (std::isinf(lo)) {
      w.header_line("MI", "BND " + col);
    } else if (lo != 0.0 || (std::isfinite(up) && up < 0.0)) {
      w.data_line("LO", "BND", col, lo);
    }
    if (std::isfinite(up)) w.data_line("UP", "BND", col, up);
  }
  out << "ENDATA\n";
}

LpProblem read_mps(std::istream& in) {
  enum class Section { kNone, kRows, kColumns, kRhs, kBounds, kRanges };
  Section section = Section::kNone;
  std::string objective_row;
  std::vector<std::string> row_names;
  std::vector<Sense> senses;
  std::map<std::string, int> row_ids;
  std::vector<std::string> col_names;
  std::map<std::string, int> col_ids;
  std::vector<double> cost;
  std::vector<std::vector<Term>> row_terms;
  std::vector<double> rhs;
  std::vector<double> lo;
  std::vector<double> up;

  auto fail = [](int line, const std::string& what) {
    return InvalidProblemError(fmt::format("MPS line {}: {}", line, what));
  };
  auto col_id = [&](const std::string& name) {
    auto it = col_ids.find(name);
    if (it != col_ids.end()) return it->second;
    const int id = static_cast<int>(col_names.size());
    col_ids.emplace(name, id);
    col_names.push_back(name);
    cost.push_back(0.0);
    lo.push_back(0.0);
    up.push_back(kInf);
    return id;
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '*') continue;
    std::istringstream ss(line);
    std::vector<std::string> f;
    for (std::string tok; ss >> tok;) f.push_back(tok);
    if (f.empty()) continue;
    if (line[0] != ' ') {
      if (f[0] == "NAME") continue;
      if (f[0] == "ROWS") section = Section::kRows;
      else if (f[0] == "COLUMNS") section = Section::kColumns;
      else if (f[0] == "RHS") section = Section::kRhs;
      else if (f[0] == "BOUNDS") section = Section::kBounds;
      else if (f[0] == "RANGES") throw fail(line_no, "RANGES not supported");
      else if (f[0] == "ENDATA") break;
      else throw fail(line_no, "unknown section " + f[0]);
      continue;
    }
    switch (section) {
      case Section::kRows: {
        if (f.size() != 2) throw fail(line_no, "malformed ROWS entry");
        if (f[0] == "N") {
          if (objective_row.empty()) objective_row = f[1];
          continue;
        }
        Sense s = Sense::kEqual;
        if (f[0] == "L") s = Sense::kLessEqual;
        else if (f[0] == "G") s = Sense::kGreaterEqual;
        else if (f[0] != "E") throw fail(line_no, "bad row type " + f[0]);
        row_ids.emplace(f[1], static_cast<int>(row_names.size()));
        row_names.push_back(f[1]);
        senses.push_back(s);
        row_terms.emplace_back();
        rhs.push_back(0.0);
        break;
      }
      case Section::kColumns: {
        if (f.size() < 3 || f.size() % 2 == 0) {
          throw fail(line_no, "malformed COLUMNS entry");
        }
        const int j = col_id(f[0]);
        for (std::size_t k = 1; k + 1 < f.size(); k += 2) {
          const double v = std::stod(f[k + 1]);
          if (f[k] == objective_row) {
            cost[j] = v;
          } else {
            auto it = row_ids.find(f[k]);
            if (it == row_ids.end()) throw fail(line_no, "unknown row " + f[k]);
            row_terms[it->second].push_back(Term{j, v});
          }
        }
        break;
      }
      case Section::kRhs: {
        if (f.size() < 3) throw fail(line_no, "malformed RHS entry");
        for (std::size_t k = 1; k + 1 < f.size(); k += 2) {
          auto it = row_ids.find(f[k]);
          if (it == row_ids.end()) throw fail(line_no, "unknown row " + f[k]);
          rhs[it->second] = std::stod(f[k + 1]);
        }
        break;
      }
      case Section::kBounds: {
        if (f.size() < 3) throw fail(line_no, "malformed BOUNDS entry");
        auto it = col_ids.find(f[2]);
        if (it == col_ids.end()) throw fail(line_no, "unknown column " + f[2]);
        const int j = it->second;
        const std::string& t = f[0];
        if (t == "FR") {
          lo[j] = -kInf;
          up[j] = kInf;
        } else if (t == "MI") {
          lo[j] = -kInf;
        } else if (t == "PL") {
          up[j] = kInf;
        } else {
          if (f.size() != 4) throw fail(line_no, "bound needs a value");
          const double v = std::stod(f[3]);
          if (t == "LO") lo[j] = v;
          else if (t == "UP") up[j] = v;
          else if (t == "FX") lo[j] = up[j] = v;
          else throw fail(line_no, "unknown bound type " + t);
        }
        break;
      }
      default:
        throw fail(line_no, "data outside a section");
    }
  }

  LpProblem p;
  for (std::size_t j = 0; j < col_names.size(); ++j) {
    p.add_column(col_names[j], cost[j], lo[j], up[j]);
  }
  for (std::size_t i = 0; i < row_names.size(); ++i) {
    p.add_row(row_names[i], row_terms[i], senses[i], rhs[i]);
  }
  return p;
}

}  // namespace usc::lp
