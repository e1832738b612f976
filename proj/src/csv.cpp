#include "geomq/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace geomq::csv {

std::string number(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> coordinate_columns(int dim)
{
  static const char * names[] = {"x", "y", "z"};
  return {names, names + dim};
}

Table::Table(std::vector<std::string> header) : header_(std::move(header)) {}

void Table::add_row(std::vector<std::string> cells)
{
  if (cells.size() != header_.size()) { throw std::invalid_argument("row width does not match header"); }
  rows_.push_back(std::move(cells));
}

void Table::add_row(const std::vector<double> & cells)
{
  std::vector<std::string> text;
  text.reserve(cells.size());
  for (double v : cells) { text.push_back(number(v)); }
  add_row(std::move(text));
}

namespace {

void write_line(std::ostream & out, const std::vector<std::string> & cells)
{
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) { out << ','; }
    out << cells[i];
  }
  out << '\n';
}

std::vector<std::string> split(const std::string & line)
{
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) { cells.push_back(cell); }
  return cells;
}

void write_coordinates(std::ostream & out, const GridSpec & grid, Index i)
{
  const Point x = grid.point(i);
  for (int k = 0; k < grid.dim(); ++k) {
    if (k) { out << ','; }
    out << number(x[k]);
  }
}

// Reads rows of (coords..., values...) and checks coordinates against the grid.
std::vector<Eigen::ArrayXd> read_columns(std::istream & in, const GridSpec & grid, std::size_t value_columns)
{
  std::string line;
  if (!std::getline(in, line)) { throw std::runtime_error("csv: missing header"); }
  const std::size_t width = grid.dim() + value_columns;
  if (split(line).size() != width) { throw std::runtime_error("csv: header has wrong number of columns"); }

  std::vector<Eigen::ArrayXd> cols(value_columns, Eigen::ArrayXd(grid.size()));
  Index row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) { continue; }
    if (row >= grid.size()) { throw std::runtime_error("csv: more rows than grid points"); }
    const auto cells = split(line);
    if (cells.size() != width) { throw std::runtime_error("csv: row " + std::to_string(row + 2) + " has wrong width"); }
    const Point x = grid.point(row);
    for (int k = 0; k < grid.dim(); ++k) {
      const double c = std::stod(cells[k]);
      if (std::abs(c - x[k]) > 1e-9 * std::max(1.0, grid.extent(k))) {
        throw std::runtime_error("csv: row " + std::to_string(row + 2) + " coordinates do not match the grid");
      }
    }
    for (std::size_t v = 0; v < value_columns; ++v) { cols[v](row) = std::stod(cells[grid.dim() + v]); }
    ++row;
  }
  if (row != grid.size()) { throw std::runtime_error("csv: fewer rows than grid points"); }
  return cols;
}

}  // namespace

void Table::write(std::ostream & out) const
{
  write_line(out, header_);
  for (const auto & r : rows_) { write_line(out, r); }
}

void Table::save(const std::filesystem::path & path) const
{
  csv::save(path, [this](std::ostream & out) { write(out); });
}

void write_field(std::ostream & out, const ScalarField & f, const std::string & name)
{
  auto header = coordinate_columns(f.grid().dim());
  header.push_back(name);
  write_line(out, header);
  for (Index i = 0; i < f.size(); ++i) {
    write_coordinates(out, f.grid(), i);
    out << ',' << number(f[i]) << '\n';
  }
}

void write_field(std::ostream & out, const ComplexField & f)
{
  auto header = coordinate_columns(f.grid().dim());
  header.push_back("re");
  header.push_back("im");
  write_line(out, header);
  for (Index i = 0; i < f.size(); ++i) {
    write_coordinates(out, f.grid(), i);
    out << ',' << number(f[i].real()) << ',' << number(f[i].imag()) << '\n';
  }
}

void write_state(std::ostream & out, const EnsembleState & state)
{
  auto header = coordinate_columns(state.grid().dim());
  header.push_back("P");
  header.push_back("S");
  write_line(out, header);
  for (Index i = 0; i < state.grid().size(); ++i) {
    write_coordinates(out, state.grid(), i);
    out << ',' << number(state.P()[i]) << ',' << number(state.S()[i]) << '\n';
  }
}

ScalarField read_field(std::istream & in, const GridSpec & grid)
{
  auto cols = read_columns(in, grid, 1);
  return ScalarField(grid, std::move(cols[0]));
}

EnsembleState read_state(std::istream & in, const GridSpec & grid, double alpha)
{
  auto cols = read_columns(in, grid, 2);
  return EnsembleState::make(ScalarField(grid, std::move(cols[0])), ScalarField(grid, std::move(cols[1])), alpha);
}

void save(const std::filesystem::path & path, const std::function<void(std::ostream &)> & body)
{
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) { throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message()); }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) { throw std::runtime_error("cannot open " + path.string() + " for writing"); }
  body(out);
  out.flush();
  if (!out) { throw std::runtime_error("write failed for " + path.string()); }
}

}  // namespace geomq::csv
