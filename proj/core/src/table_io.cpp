#include "gnls/table_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

#include "gnls/errors.hpp"

namespace gnls::io {

namespace {

const std::vector<std::string> kSweepHeader = {"k", "re_eps", "im_eps", "re_A", "im_A", "re_B", "im_B"};
const std::vector<std::string> kSeriesHeader = {"n",    "re_k", "im_k", "re_A",
                                                "im_A", "re_B", "im_B", "residual"};

struct Table {
  std::map<std::string, std::string> meta;
  std::vector<std::pair<std::size_t, std::vector<double>>> rows;  // (line number, values)
};

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string::npos) return out;
    start = comma + 1;
  }
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw ContractError("line " + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& field, std::size_t line) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) fail(line, "cannot parse number '" + field + "'");
  return v;
}

Table read_table(std::istream& is, const std::vector<std::string>& header, const char* what) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      const auto body = trim(s.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos) t.meta[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
      continue;
    }
    const auto fields = split(s);
    if (!have_header) {
      if (fields != header) fail(lineno, std::string("unexpected header for a ") + what + " table");
      have_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      fail(lineno, "expected " + std::to_string(header.size()) + " columns, found " + std::to_string(fields.size()));
    }
    std::vector<double> values;
    values.reserve(fields.size());
    for (const auto& f : fields) values.push_back(parse_number(f, lineno));
    t.rows.emplace_back(lineno, std::move(values));
  }
  if (!have_header) fail(lineno, std::string("missing header row for a ") + what + " table");
  return t;
}

void write_header(std::ostream& os, const std::vector<std::string>& header) {
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
}

void write_row(std::ostream& os, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    os << (first ? "" : ",") << format_double(v);
    first = false;
  }
  os << '\n';
}

template <typename T>
std::size_t index_of(std::vector<T>& list, const T& value) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (list[i] == value) return i;
  }
  list.push_back(value);
  return list.size() - 1;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_sweep(std::ostream& os, const ScatteringSweep& sweep) {
  os << "# table=sweep\n";
  os << "# b=" << format_double(sweep.b) << '\n';
  os << "# degree=" << sweep.degree << '\n';
  os << "# delta=" << format_double(sweep.delta) << '\n';
  write_header(os, kSweepHeader);
  for (const auto& e : sweep.table) {
    write_row(os, {e.k, e.epsilon.real(), e.epsilon.imag(), e.A.real(), e.A.imag(), e.B.real(), e.B.imag()});
  }
}

ScatteringSweep read_sweep(std::istream& is) {
  const Table t = read_table(is, kSweepHeader, "sweep");
  ScatteringSweep s;
  if (auto it = t.meta.find("b"); it != t.meta.end()) s.b = parse_number(it->second, 0);
  if (auto it = t.meta.find("degree"); it != t.meta.end()) s.degree = std::stoul(it->second);
  if (auto it = t.meta.find("delta"); it != t.meta.end()) s.delta = parse_number(it->second, 0);

  std::vector<std::pair<std::size_t, std::size_t>> where;
  for (const auto& [line, v] : t.rows) {
    const cplx eps(v[1], v[2]);
    if (v[0] == 0.0) fail(line, "k = 0 is not allowed");
    if (eps == cplx{}) fail(line, "eps = 0 is not allowed");
    where.emplace_back(index_of(s.k_grid, v[0]), index_of(s.eps_list, eps));
  }
  const std::size_t ne = s.eps_list.size();
  if (t.rows.size() != s.k_grid.size() * ne) {
    throw ContractError("sweep table incomplete: " + std::to_string(t.rows.size()) + " rows for " +
                        std::to_string(s.k_grid.size()) + " k values x " + std::to_string(ne) + " eps values");
  }
  s.table.resize(t.rows.size());
  std::vector<bool> seen(t.rows.size(), false);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& [line, v] = t.rows[r];
    const std::size_t idx = where[r].first * ne + where[r].second;
    if (seen[idx]) fail(line, "duplicate (k, eps) entry");
    seen[idx] = true;
    s.table[idx] = {v[0], cplx(v[1], v[2]), cplx(v[3], v[4]), cplx(v[5], v[6])};
  }
  return s;
}

void write_series(std::ostream& os, const SeriesCoefficients& series) {
  os << "# table=series\n";
  os << "# source=" << (series.source == SeriesSource::cascade ? "cascade" : "extracted") << '\n';
  os << "# order=" << series.order << '\n';
  if (series.source == SeriesSource::extracted) os << "# condition=" << format_double(series.condition) << '\n';
  write_header(os, kSeriesHeader);
  for (std::size_t n = 0; n < series.order; ++n) {
    for (std::size_t ik = 0; ik < series.k_grid.size(); ++ik) {
      const cplx k = series.k_grid[ik];
      write_row(os, {static_cast<double>(n + 1), k.real(), k.imag(), series.A[n][ik].real(), series.A[n][ik].imag(),
                     series.B[n][ik].real(), series.B[n][ik].imag(), series.residual[ik]});
    }
  }
}

SeriesCoefficients read_series(std::istream& is) {
  const Table t = read_table(is, kSeriesHeader, "series");
  SeriesCoefficients s;
  auto src = t.meta.find("source");
  s.source = (src != t.meta.end() && src->second == "cascade") ? SeriesSource::cascade : SeriesSource::extracted;
  if (auto it = t.meta.find("condition"); it != t.meta.end()) s.condition = parse_number(it->second, 0);

  for (const auto& [line, v] : t.rows) {
    if (v[0] < 1.0 || v[0] != std::floor(v[0])) fail(line, "order n must be a positive integer");
    index_of(s.k_grid, cplx(v[1], v[2]));
    s.order = std::max<std::size_t>(s.order, static_cast<std::size_t>(v[0]));
  }
  const std::size_t nk = s.k_grid.size();
  if (t.rows.size() != s.order * nk) {
    throw ContractError("series table incomplete: expected " + std::to_string(s.order * nk) + " rows, found " +
                        std::to_string(t.rows.size()));
  }
  s.A.assign(s.order, std::vector<cplx>(nk));
  s.B.assign(s.order, std::vector<cplx>(nk));
  s.residual.assign(nk, 0.0);
  for (const auto& [line, v] : t.rows) {
    const auto n = static_cast<std::size_t>(v[0]) - 1;
    const std::size_t ik = index_of(s.k_grid, cplx(v[1], v[2]));
    s.A[n][ik] = cplx(v[3], v[4]);
    s.B[n][ik] = cplx(v[5], v[6]);
    s.residual[ik] = v[7];
  }
  return s;
}

void write_reconstruction(std::ostream& os, const ReconstructionResult& r, const Metadata& extra) {
  Metadata meta = {{"table", "reconstruction"},
                   {"n", std::to_string(r.n)},
                   {"recovered", "q" + std::to_string(r.n - 1)},
                   {"method", to_string(r.method)},
                   {"route", to_string(r.route)},
                   {"xi", format_double(r.xi_used)},
                   {"xi0", format_double(r.xi0)},
                   {"M", std::to_string(r.M_used)},
                   {"s_xi", format_double(r.s)},
                   {"linear_residual", format_double(r.linear_residual)},
                   {"relative_residual", format_double(r.relative_residual)},
                   {"imag_residual", format_double(r.imag_residual)},
                   {"neumann_terms", std::to_string(r.neumann_terms)}};
  meta.insert(meta.end(), extra.begin(), extra.end());
  for (const auto& w : r.warnings) meta.emplace_back("warning", w);
  write_columns(os, {"x", "q_recovered", "imag_residual_local"}, {r.grid.nodes(), r.q, r.imag_local}, meta);
}

void write_columns(std::ostream& os, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns, const Metadata& meta) {
  if (header.size() != columns.size()) throw ContractError("column count does not match header");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != rows) throw ContractError("columns must have equal length");
  }
  for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
  write_header(os, header);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << format_double(columns[c][r]);
    os << '\n';
  }
}

}  // namespace gnls::io
