// Copyright 2026 The geoctl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GEOCTL_GRID_H_
#define GEOCTL_GRID_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "geoctl/common.h"

namespace geoctl {

// Uniform cell decomposition of a box. Cells are numbered row-major: the
// first axis varies slowest.
class GridGeometry {
 public:
  GridGeometry() = default;
  GridGeometry(Box box, std::vector<int> resolution);
  static GridGeometry Uniform(Box box, int resolution);

  int dim() const { return box_.dim(); }
  const Box& box() const { return box_; }
  const std::vector<int>& resolution() const { return resolution_; }
  std::int64_t cell_count() const { return cell_count_; }
  const Vec& cell_width() const { return cell_width_; }
  double cell_volume() const { return cell_width_.prod(); }
  double cell_diagonal() const { return cell_width_.norm(); }

  // Cell containing x; the upper faces belong to the last cell. nullopt
  // outside the box.
  std::optional<std::int64_t> CellOf(const Vec& x) const;
  Vec CellCenter(std::int64_t index) const;
  std::vector<int> Unravel(std::int64_t index) const;
  std::int64_t Ravel(const std::vector<int>& cell) const;

  bool operator==(const GridGeometry& other) const;

 private:
  Box box_;
  std::vector<int> resolution_;
  Vec cell_width_;
  std::int64_t cell_count_ = 0;
};

// Bit-per-cell occupancy; the discrete stand-in for an indicator 1_E.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  explicit OccupancyGrid(GridGeometry geometry);

  const GridGeometry& geometry() const { return geometry_; }

  void Mark(std::int64_t cell) { bits_[cell >> 6] |= 1ULL << (cell & 63); }
  bool Test(std::int64_t cell) const { return (bits_[cell >> 6] >> (cell & 63)) & 1ULL; }
  // Marks the cell holding x; returns false when x lies outside the box.
  bool MarkPoint(const Vec& x);
  // 1_E(x); points outside the box are not in E.
  bool Contains(const Vec& x) const;
  void MarkAll();

  std::int64_t count() const;
  double occupied_fraction() const;
  double occupied_volume() const { return count() * geometry_.cell_volume(); }

  // Bitwise union; geometries must match.
  void UnionWith(const OccupancyGrid& other);
  // Cells of size factor x the current size; a coarse cell is occupied when
  // any of its fine cells is. Every resolution must be divisible by factor.
  OccupancyGrid Coarsen(int factor) const;

  bool operator==(const OccupancyGrid& other) const;

  // "RGRID v1 dim res... min... max..." header line, then the cell bits as
  // one base64 line: byte k, bit b (LSB first) holds cell 8k + b.
  void WriteRgrid(std::ostream& out) const;
  static OccupancyGrid ReadRgrid(std::istream& in);
  // Header "x1,...,xd", one row per occupied cell center.
  void WriteCsv(std::ostream& out) const;

 private:
  GridGeometry geometry_;
  std::vector<std::uint64_t> bits_;
};

// Fraction of cells whose membership differs between a and b.
double FlipFraction(const OccupancyGrid& a, const OccupancyGrid& b);

// Piecewise-constant scalar function on a grid, zero outside the box.
class ScalarGrid {
 public:
  ScalarGrid() = default;
  explicit ScalarGrid(GridGeometry geometry, double fill = 0.0);
  static ScalarGrid FromOccupancy(const OccupancyGrid& grid);

  const GridGeometry& geometry() const { return geometry_; }
  double& operator[](std::int64_t cell) { return values_[cell]; }
  double operator[](std::int64_t cell) const { return values_[cell]; }
  double ValueAt(const Vec& x) const;

 private:
  GridGeometry geometry_;
  std::vector<double> values_;
};

std::string Base64Encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> Base64Decode(const std::string& text);

}  // namespace geoctl

#endif  // GEOCTL_GRID_H_
