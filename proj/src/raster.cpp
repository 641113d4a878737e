#include "sarsoil/raster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sarsoil/detail/num_io.hpp"
#include "sarsoil/errors.hpp"

namespace sarsoil {

Raster::Raster(int ncols, int nrows, double xll, double yll, double cellsize,
               double nodata)
    : xll_(xll), yll_(yll), cellsize_(cellsize), nodata_(nodata) {
  if (ncols < 1 || nrows < 1) throw ConfigError("raster needs at least one cell");
  if (!(cellsize > 0.0)) throw ConfigError("cell size must be positive");
  grid_ = Grid::Constant(nrows, ncols, nodata);
}

bool Raster::same_grid(const Raster& other) const {
  return ncols() == other.ncols() && nrows() == other.nrows() &&
         xll_ == other.xll_ && yll_ == other.yll_ && cellsize_ == other.cellsize_;
}

bool Raster::contains(double x, double y) const {
  return x >= xll_ && x < xll_ + ncols() * cellsize_ &&
         y >= yll_ && y < yll_ + nrows() * cellsize_;
}

int Raster::col_at(double x) const {
  return static_cast<int>(std::floor((x - xll_) / cellsize_));
}

int Raster::row_at(double y) const {
  return nrows() - 1 - static_cast<int>(std::floor((y - yll_) / cellsize_));
}

double Raster::cell_center_x(int col) const { return xll_ + (col + 0.5) * cellsize_; }

double Raster::cell_center_y(int row) const {
  return yll_ + (nrows() - row - 0.5) * cellsize_;
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double require_header_value(const std::filesystem::path& path,
                            const std::vector<std::pair<std::string, double>>& header,
                            const std::string& key) {
  for (const auto& [name, value] : header) {
    if (name == key) return value;
  }
  throw FormatError(path.string() + ": missing header key '" + key + "'");
}

}  // namespace

Raster read_asc(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());

  // Six "key value" header lines, case-insensitive keys.
  std::vector<std::pair<std::string, double>> header;
  int line_no = 0;
  std::string line;
  for (int i = 0; i < 6; ++i) {
    if (!std::getline(in, line)) {
      throw FormatError(path.string() + ": truncated header", line_no + 1);
    }
    ++line_no;
    std::istringstream ss(line);
    std::string key, value_token, extra;
    if (!(ss >> key >> value_token) || (ss >> extra)) {
      throw FormatError(path.string() + ": malformed header line", line_no);
    }
    double value;
    if (!detail::parse_double(value_token, value)) {
      throw FormatError(path.string() + ": bad header value '" + value_token + "'",
                        line_no);
    }
    header.emplace_back(lower(key), value);
  }

  const auto ncols = static_cast<int>(require_header_value(path, header, "ncols"));
  const auto nrows = static_cast<int>(require_header_value(path, header, "nrows"));
  const double xll = require_header_value(path, header, "xllcorner");
  const double yll = require_header_value(path, header, "yllcorner");
  const double cellsize = require_header_value(path, header, "cellsize");
  const double nodata = require_header_value(path, header, "nodata_value");

  Raster raster(ncols, nrows, xll, yll, cellsize, nodata);
  for (int row = 0; row < nrows; ++row) {
    if (!std::getline(in, line)) {
      throw FormatError(path.string() + ": expected " + std::to_string(nrows) +
                            " data rows, found " + std::to_string(row),
                        line_no + 1);
    }
    ++line_no;
    std::istringstream ss(line);
    std::string token;
    for (int col = 0; col < ncols; ++col) {
      if (!(ss >> token)) {
        throw FormatError(path.string() + ": row has " + std::to_string(col) +
                              " of " + std::to_string(ncols) + " values",
                          line_no);
      }
      double value;
      if (!detail::parse_double(token, value)) {
        throw FormatError(path.string() + ": bad value '" + token + "' in column " +
                              std::to_string(col + 1),
                          line_no);
      }
      raster.at(row, col) = value;
    }
    if (ss >> token) {
      throw FormatError(path.string() + ": extra value '" + token + "' beyond column " +
                            std::to_string(ncols),
                        line_no);
    }
  }
  return raster;
}

void write_asc(const Raster& raster, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "ncols " << raster.ncols() << "\n";
  out << "nrows " << raster.nrows() << "\n";
  out << "xllcorner " << detail::format_double(raster.xll()) << "\n";
  out << "yllcorner " << detail::format_double(raster.yll()) << "\n";
  out << "cellsize " << detail::format_double(raster.cellsize()) << "\n";
  out << "nodata_value " << detail::format_double(raster.nodata()) << "\n";
  for (int row = 0; row < raster.nrows(); ++row) {
    for (int col = 0; col < raster.ncols(); ++col) {
      out << (col ? " " : "") << detail::format_double(raster.at(row, col));
    }
    out << "\n";
  }
  if (!out) throw Error("write failed: " + path.string());
}

int window_cells(double window_m, double cellsize) {
  if (!(window_m > 0.0)) throw DomainError("window size must be positive");
  int cells = static_cast<int>(std::ceil(window_m / cellsize));
  if (cells % 2 == 0) ++cells;
  return std::max(cells, 1);
}

namespace {

double window_mean_at(const Raster& raster, int row, int col, int half) {
  const int r0 = std::max(row - half, 0);
  const int r1 = std::min(row + half, raster.nrows() - 1);
  const int c0 = std::max(col - half, 0);
  const int c1 = std::min(col + half, raster.ncols() - 1);
  double sum = 0.0;
  int count = 0;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (!raster.is_nodata(r, c)) {
        sum += raster.at(r, c);
        ++count;
      }
    }
  }
  return count > 0 ? sum / count : raster.nodata();
}

}  // namespace

Raster moving_average(const Raster& raster, double window_m) {
  const int half = window_cells(window_m, raster.cellsize()) / 2;
  Raster out = raster;
  for (int row = 0; row < raster.nrows(); ++row) {
    for (int col = 0; col < raster.ncols(); ++col) {
      if (raster.is_nodata(row, col)) continue;  // stays nodata
      out.at(row, col) = window_mean_at(raster, row, col, half);
    }
  }
  return out;
}

double window_mean(const Raster& raster, double x, double y, double window_m) {
  if (!raster.contains(x, y)) {
    throw BoundsError("point (" + detail::format_double(x) + ", " +
                      detail::format_double(y) + ") is outside the raster extent");
  }
  const int half = window_cells(window_m, raster.cellsize()) / 2;
  return window_mean_at(raster, raster.row_at(y), raster.col_at(x), half);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

SampleTable read_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file", 1);
  const auto header = split_csv(line);
  const std::vector<std::string> base{"id", "x", "y", "mv", "height"};
  const std::vector<std::string> sigma{"sigma_p_db", "sigma_l_db", "sigma_c_db"};
  const bool with_sigma = header.size() == base.size() + sigma.size();
  if (!with_sigma && header.size() != base.size()) {
    throw FormatError(path.string() + ": expected 5 or 8 columns", 1);
  }
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (header[i] != base[i]) {
      throw FormatError(path.string() + ": expected column '" + base[i] + "'", 1);
    }
  }
  if (with_sigma) {
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      if (header[base.size() + i] != sigma[i]) {
        throw FormatError(path.string() + ": expected column '" + sigma[i] + "'", 1);
      }
    }
  }

  SampleTable table;
  std::set<std::string> seen;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw FormatError(path.string() + ": expected " + std::to_string(header.size()) +
                            " fields, found " + std::to_string(fields.size()),
                        line_no);
    }
    const auto parse = [&](std::size_t idx) {
      double v;
      if (!detail::parse_double(fields[idx], v)) {
        throw FormatError(path.string() + ": bad number '" + fields[idx] + "'", line_no);
      }
      return v;
    };
    SamplePoint point;
    point.id = fields[0];
    if (!seen.insert(point.id).second) {
      throw FormatError(path.string() + ": duplicate id '" + point.id + "'", line_no);
    }
    point.x = parse(1);
    point.y = parse(2);
    point.mv = parse(3);
    point.height_m = parse(4);
    if (with_sigma) {
      if (fields[5] != "NA") point.sigma_p_db = parse(5);
      if (fields[6] != "NA") point.sigma_l_db = parse(6);
      if (fields[7] != "NA") point.sigma_c_db = parse(7);
    }
    table.rows.push_back(std::move(point));
  }
  return table;
}

void write_samples(const SampleTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  const bool with_sigma = std::any_of(table.rows.begin(), table.rows.end(),
                                      [](const SamplePoint& p) {
                                        return p.sigma_p_db || p.sigma_l_db || p.sigma_c_db;
                                      });
  out << "id,x,y,mv,height";
  if (with_sigma) out << ",sigma_p_db,sigma_l_db,sigma_c_db";
  out << "\n";
  const auto opt = [](const std::optional<double>& v) {
    return v ? detail::format_double(*v) : std::string("NA");
  };
  for (const SamplePoint& p : table.rows) {
    out << p.id << ',' << detail::format_double(p.x) << ',' << detail::format_double(p.y)
        << ',' << detail::format_double(p.mv) << ',' << detail::format_double(p.height_m);
    if (with_sigma) {
      out << ',' << opt(p.sigma_p_db) << ',' << opt(p.sigma_l_db) << ','
          << opt(p.sigma_c_db);
    }
    out << "\n";
  }
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace sarsoil
