#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "geomq/fields.hpp"

namespace geomq::csv {

/// Shortest round-trip text for a double ("%.17g"); locale independent.
std::string number(double v);

/// Coordinate column names for a grid: x, y, z.
std::vector<std::string> coordinate_columns(int dim);

/// Accumulates rows and renders them with a header. Row order is insertion order.
class Table
{
public:
  explicit Table(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  void add_row(const std::vector<double> & cells);

  const std::vector<std::string> & header() const noexcept { return header_; }
  std::size_t rows() const noexcept { return rows_.size(); }

  void write(std::ostream & out) const;
  void save(const std::filesystem::path & path) const;

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// One row per grid point: coordinates, then the value column.
void write_field(std::ostream & out, const ScalarField & f, const std::string & name = "value");
/// Coordinates, then real and imaginary part.
void write_field(std::ostream & out, const ComplexField & f);
/// Coordinates, then P and S.
void write_state(std::ostream & out, const EnsembleState & state);

ScalarField read_field(std::istream & in, const GridSpec & grid);
/// Reads the layout produced by write_state; coordinates must match the grid.
EnsembleState read_state(std::istream & in, const GridSpec & grid, double alpha);

/// Opens `path` for writing and hands the stream to `body`; failures name the path.
void save(const std::filesystem::path & path, const std::function<void(std::ostream &)> & body);

}  // namespace geomq::csv
