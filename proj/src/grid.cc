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

#include "geoctl/grid.h"

#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace geoctl {
namespace {

constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string Base64Encode(const std::vector<std::uint8_t>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i < bytes.size()) {
    std::uint32_t v = bytes[i] << 16;
    if (i + 1 < bytes.size()) v |= bytes[i + 1] << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += i + 1 < bytes.size() ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> Base64Decode(const std::string& text) {
  int table[256];
  std::fill(std::begin(table), std::end(table), -1);
  for (int k = 0; k < 64; ++k) table[static_cast<unsigned char>(kAlphabet[k])] = k;
  std::vector<std::uint8_t> out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=') break;
    const int v = table[static_cast<unsigned char>(c)];
    if (v < 0) throw InvalidArgument("invalid base64 character");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
    }
  }
  return out;
}

GridGeometry::GridGeometry(Box box, std::vector<int> resolution)
    : box_(std::move(box)), resolution_(std::move(resolution)) {
  if (static_cast<int>(resolution_.size()) != box_.dim()) {
    throw DimensionError("grid resolution must list one count per axis");
  }
  cell_count_ = 1;
  cell_width_.resize(box_.dim());
  for (int k = 0; k < box_.dim(); ++k) {
    if (resolution_[k] < 1) throw InvalidArgument("grid resolution must be positive");
    cell_count_ *= resolution_[k];
    cell_width_[k] = (box_.hi[k] - box_.lo[k]) / resolution_[k];
  }
  if (!(cell_width_.prod() > 0.0)) throw InvalidArgument("cell volume must be positive");
}

GridGeometry GridGeometry::Uniform(Box box, int resolution) {
  const int d = box.dim();
  return GridGeometry(std::move(box), std::vector<int>(d, resolution));
}

std::optional<std::int64_t> GridGeometry::CellOf(const Vec& x) const {
  std::int64_t index = 0;
  for (int k = 0; k < dim(); ++k) {
    if (!(x[k] >= box_.lo[k] && x[k] <= box_.hi[k])) return std::nullopt;
    int c = static_cast<int>((x[k] - box_.lo[k]) / cell_width_[k]);
    c = std::min(std::max(c, 0), resolution_[k] - 1);
    index = index * resolution_[k] + c;
  }
  return index;
}

std::vector<int> GridGeometry::Unravel(std::int64_t index) const {
  std::vector<int> cell(dim());
  for (int k = dim() - 1; k >= 0; --k) {
    cell[k] = static_cast<int>(index % resolution_[k]);
    index /= resolution_[k];
  }
  return cell;
}

std::int64_t GridGeometry::Ravel(const std::vector<int>& cell) const {
  std::int64_t index = 0;
  for (int k = 0; k < dim(); ++k) index = index * resolution_[k] + cell[k];
  return index;
}

Vec GridGeometry::CellCenter(std::int64_t index) const {
  const std::vector<int> cell = Unravel(index);
  Vec c(dim());
  for (int k = 0; k < dim(); ++k) {
    c[k] = box_.lo[k] + (cell[k] + 0.5) * cell_width_[k];
  }
  return c;
}

bool GridGeometry::operator==(const GridGeometry& other) const {
  return resolution_ == other.resolution_ && box_.lo == other.box_.lo &&
         box_.hi == other.box_.hi;
}

OccupancyGrid::OccupancyGrid(GridGeometry geometry)
    : geometry_(std::move(geometry)),
      bits_(static_cast<std::size_t>((geometry_.cell_count() + 63) / 64), 0) {}

bool OccupancyGrid::MarkPoint(const Vec& x) {
  const auto cell = geometry_.CellOf(x);
  if (!cell) return false;
  Mark(*cell);
  return true;
}

bool OccupancyGrid::Contains(const Vec& x) const {
  const auto cell = geometry_.CellOf(x);
  return cell && Test(*cell);
}

void OccupancyGrid::MarkAll() {
  for (std::int64_t c = 0; c < geometry_.cell_count(); ++c) Mark(c);
}

std::int64_t OccupancyGrid::count() const {
  std::int64_t n = 0;
  for (std::uint64_t w : bits_) n += std::popcount(w);
  return n;
}

double OccupancyGrid::occupied_fraction() const {
  return static_cast<double>(count()) / static_cast<double>(geometry_.cell_count());
}

void OccupancyGrid::UnionWith(const OccupancyGrid& other) {
  if (!(geometry_ == other.geometry_)) throw DimensionError("grid geometries differ");
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= other.bits_[i];
}

OccupancyGrid OccupancyGrid::Coarsen(int factor) const {
  if (factor < 1) throw InvalidArgument("coarsening factor must be positive");
  std::vector<int> res = geometry_.resolution();
  for (int& r : res) {
    if (r % factor != 0) throw InvalidArgument("resolution not divisible by factor");
    r /= factor;
  }
  OccupancyGrid coarse(GridGeometry(geometry_.box(), res));
  for (std::int64_t c = 0; c < geometry_.cell_count(); ++c) {
    if (!Test(c)) continue;
    std::vector<int> cell = geometry_.Unravel(c);
    for (int& i : cell) i /= factor;
    coarse.Mark(coarse.geometry().Ravel(cell));
  }
  return coarse;
}

bool OccupancyGrid::operator==(const OccupancyGrid& other) const {
  return geometry_ == other.geometry_ && bits_ == other.bits_;
}

void OccupancyGrid::WriteRgrid(std::ostream& out) const {
  out << "RGRID v1 " << geometry_.dim();
  for (int r : geometry_.resolution()) out << ' ' << r;
  for (int k = 0; k < geometry_.dim(); ++k) out << ' ' << FormatDouble(geometry_.box().lo[k]);
  for (int k = 0; k < geometry_.dim(); ++k) out << ' ' << FormatDouble(geometry_.box().hi[k]);
  out << '\n';
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>((geometry_.cell_count() + 7) / 8), 0);
  for (std::int64_t c = 0; c < geometry_.cell_count(); ++c) {
    if (Test(c)) bytes[c >> 3] |= static_cast<std::uint8_t>(1u << (c & 7));
  }
  out << Base64Encode(bytes) << '\n';
}

OccupancyGrid OccupancyGrid::ReadRgrid(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw InvalidArgument("missing RGRID header");
  std::istringstream hs(header);
  std::string magic, version;
  int dim = 0;
  hs >> magic >> version >> dim;
  if (magic != "RGRID" || version != "v1" || dim < 1) {
    throw InvalidArgument("not an RGRID v1 file");
  }
  std::vector<int> res(dim);
  Vec lo(dim), hi(dim);
  for (int& r : res) hs >> r;
  for (int k = 0; k < dim; ++k) hs >> lo[k];
  for (int k = 0; k < dim; ++k) hs >> hi[k];
  if (!hs) throw InvalidArgument("truncated RGRID header");
  OccupancyGrid grid(GridGeometry(Box(lo, hi), res));
  std::string payload;
  std::getline(in, payload);
  const std::vector<std::uint8_t> bytes = Base64Decode(payload);
  if (static_cast<std::int64_t>(bytes.size()) != (grid.geometry().cell_count() + 7) / 8) {
    throw InvalidArgument("RGRID payload length does not match the header");
  }
  for (std::int64_t c = 0; c < grid.geometry().cell_count(); ++c) {
    if ((bytes[c >> 3] >> (c & 7)) & 1u) grid.Mark(c);
  }
  return grid;
}

void OccupancyGrid::WriteCsv(std::ostream& out) const {
  for (int k = 0; k < geometry_.dim(); ++k) out << (k ? ",x" : "x") << k + 1;
  out << '\n';
  for (std::int64_t c = 0; c < geometry_.cell_count(); ++c) {
    if (!Test(c)) continue;
    const Vec p = geometry_.CellCenter(c);
    for (int k = 0; k < geometry_.dim(); ++k) out << (k ? "," : "") << FormatDouble(p[k]);
    out << '\n';
  }
}

double FlipFraction(const OccupancyGrid& a, const OccupancyGrid& b) {
  if (!(a.geometry() == b.geometry())) throw DimensionError("grid geometries differ");
  std::int64_t flips = 0;
  for (std::int64_t c = 0; c < a.geometry().cell_count(); ++c) {
    flips += a.Test(c) != b.Test(c);
  }
  return static_cast<double>(flips) / static_cast<double>(a.geometry().cell_count());
}

ScalarGrid::ScalarGrid(GridGeometry geometry, double fill)
    : geometry_(std::move(geometry)),
      values_(static_cast<std::size_t>(geometry_.cell_count()), fill) {}

ScalarGrid ScalarGrid::FromOccupancy(const OccupancyGrid& grid) {
  ScalarGrid out(grid.geometry());
  for (std::int64_t c = 0; c < grid.geometry().cell_count(); ++c) {
    out.values_[c] = grid.Test(c) ? 1.0 : 0.0;
  }
  return out;
}

double ScalarGrid::ValueAt(const Vec& x) const {
  const auto cell = geometry_.CellOf(x);
  return cell ? values_[*cell] : 0.0;
}

}  // namespace geoctl
