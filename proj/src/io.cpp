#include "brokenpde/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "brokenpde/errors.hpp"

namespace brokenpde::io {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_cell(const std::string& text, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw InvalidArgument(fmt::format("{}:{}: not a number: '{}'", path.string(), line, text));
  }
  return v;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument(path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw InvalidArgument(fmt::format("{}:{}: expected {} columns", path.string(), lineno,
                                        t.header.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_cell(c, path, lineno));
    t.rows.push_back(std::move(row));
  }
  return t;
}

/// Sorted distinct coordinates, merging values closer than a relative 1e-9.
std::vector<double> distinct(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (out.empty() || std::abs(x - out.back()) > 1e-9 * std::max(1.0, std::abs(x))) {
      out.push_back(x);
    }
  }
  return out;
}

GridSpec infer_grid(const Table& t, int dim, const std::filesystem::path& path) {
  std::vector<double> xs, ys;
  for (const auto& row : t.rows) {
    xs.push_back(row[0]);
    if (dim == 2) ys.push_back(row[1]);
  }
  GridSpec g;
  g.dim = dim;
  const auto ux = distinct(std::move(xs));
  if (ux.size() < 3) throw InvalidArgument(path.string() + ": too few distinct x coordinates");
  g.lo[0] = ux.front();
  g.hi[0] = ux.back();
  g.n[0] = static_cast<int>(ux.size());
  if (dim == 2) {
    const auto uy = distinct(std::move(ys));
    if (uy.size() < 3) throw InvalidArgument(path.string() + ": too few distinct y coordinates");
    g.lo[1] = uy.front();
    g.hi[1] = uy.back();
    g.n[1] = static_cast<int>(uy.size());
  } else {
    g.lo[1] = g.hi[1] = 0.0;
    g.n[1] = 1;
  }
  g.validate();
  if (t.rows.size() != g.node_count()) {
    throw InvalidArgument(fmt::format("{}: {} rows do not form a {}x{} grid", path.string(),
                                      t.rows.size(), g.n[0], g.n[1]));
  }
  return g;
}

std::size_t locate_row(const GridSpec& g, const std::vector<double>& row,
                       const std::filesystem::path& path) {
  const double si = (row[0] - g.lo[0]) / g.h(0);
  const long i = std::lround(si);
  long j = 0;
  bool ok = std::abs(si - i) < 1e-6;
  if (g.dim == 2) {
    const double sj = (row[1] - g.lo[1]) / g.h(1);
    j = std::lround(sj);
    ok = ok && std::abs(sj - j) < 1e-6;
  }
  if (!ok) throw InvalidArgument(path.string() + ": coordinates are not uniformly spaced");
  return g.index(static_cast<int>(i), static_cast<int>(j));
}

void require_header(const Table& t, const std::vector<std::string>& expected,
                    const std::filesystem::path& path) {
  if (t.header != expected) {
    std::string joined;
    for (const auto& h : expected) joined += (joined.empty() ? "" : ",") + h;
    throw InvalidArgument(path.string() + ": expected header " + joined);
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

std::string csv_row(const std::vector<double>& cells) {
  std::string s;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) s += ',';
    s += format_double(cells[k]);
  }
  return s;
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& f) {
  auto out = open_out(path);
  const GridSpec& g = f.grid();
  out << (g.dim == 2 ? "x,y,value\n" : "x,value\n");
  for (std::size_t k = 0; k < f.size(); ++k) {
    const Point p = g.node(k);
    out << (g.dim == 2 ? csv_row({p.x, p.y, f[k]}) : csv_row({p.x, f[k]})) << '\n';
  }
}

ScalarField read_field_csv(const std::filesystem::path& path) {
  const Table t = read_table(path);
  int dim = 0;
  if (t.header == std::vector<std::string>{"x", "y", "value"}) {
    dim = 2;
  } else {
    require_header(t, {"x", "value"}, path);
    dim = 1;
  }
  const GridSpec g = infer_grid(t, dim, path);
  std::vector<double> values(g.node_count(), 0.0);
  std::vector<bool> seen(g.node_count(), false);
  for (const auto& row : t.rows) {
    const std::size_t k = locate_row(g, row, path);
    if (seen[k]) throw InvalidArgument(path.string() + ": duplicate node");
    seen[k] = true;
    values[k] = row.back();
  }
  return ScalarField(g, std::move(values));
}

void write_vector_csv(const std::filesystem::path& path, const VectorField& f) {
  auto out = open_out(path);
  out << "x,y,bx,by\n";
  for (std::size_t k = 0; k < f.x.size(); ++k) {
    const Point p = f.grid.node(k);
    out << csv_row({p.x, p.y, f.x[k], f.y[k]}) << '\n';
  }
}

VectorField read_vector_csv(const std::filesystem::path& path) {
  const Table t = read_table(path);
  require_header(t, {"x", "y", "bx", "by"}, path);
  bool flat = true;
  for (const auto& row : t.rows) flat = flat && row[1] == 0.0;
  const GridSpec g = infer_grid(t, flat ? 1 : 2, path);
  VectorField f(g);
  for (const auto& row : t.rows) {
    const std::size_t k = locate_row(g, row, path);
    f.x[k] = row[2];
    f.y[k] = row[3];
  }
  return f;
}

void write_segments_csv(const std::filesystem::path& path, const std::vector<Segment>& segments) {
  auto out = open_out(path);
  out << "x1,y1,x2,y2\n";
  for (const auto& s : segments) out << csv_row({s.a.x, s.a.y, s.b.x, s.b.y}) << '\n';
}

void write_normals_csv(const std::filesystem::path& path,
                       const std::vector<NormalSample>& normals) {
  auto out = open_out(path);
  out << "x,y,nx,ny,delta\n";
  for (const auto& n : normals) out << csv_row({n.z.x, n.z.y, n.nu.x, n.nu.y, n.delta}) << '\n';
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace brokenpde::io
