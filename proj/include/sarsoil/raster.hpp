#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sarsoil {

/// Georeferenced grid of doubles, row 0 at the northern edge.
/// Cells equal to the `nodata` sentinel are invalid and propagate through
/// every operation.
class Raster {
 public:
  using Grid = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Raster(int ncols, int nrows, double xll, double yll, double cellsize,
         double nodata = -9999.0);

  int ncols() const { return static_cast<int>(grid_.cols()); }
  int nrows() const { return static_cast<int>(grid_.rows()); }
  double xll() const { return xll_; }
  double yll() const { return yll_; }
  double cellsize() const { return cellsize_; }
  double nodata() const { return nodata_; }

  double at(int row, int col) const { return grid_(row, col); }
  double& at(int row, int col) { return grid_(row, col); }
  bool is_nodata(int row, int col) const { return grid_(row, col) == nodata_; }
  void set_nodata_at(int row, int col) { grid_(row, col) = nodata_; }
  void fill(double value) { grid_.setConstant(value); }

  Grid& values() { return grid_; }
  const Grid& values() const { return grid_; }

  bool same_grid(const Raster& other) const;

  /// Extent tests and point-to-cell mapping (cell centers at half-cell offsets).
  bool contains(double x, double y) const;
  int col_at(double x) const;
  int row_at(double y) const;
  double cell_center_x(int col) const;
  double cell_center_y(int row) const;

 private:
  Grid grid_;
  double xll_, yll_, cellsize_, nodata_;
};

/// ESRI ASCII grid I/O. The header keys ncols, nrows, xllcorner, yllcorner,
/// cellsize and NODATA_value are required (case-insensitive), followed by
/// nrows lines of ncols values, northern row first. Writing uses canonical
/// formatting: lower-case keys, single spaces, shortest round-trip decimals.
Raster read_asc(const std::filesystem::path& path);
void write_asc(const Raster& raster, const std::filesystem::path& path);

/// Smallest odd cell count covering `window_m` meters; at least 1.
int window_cells(double window_m, double cellsize);

/// Moving-average filter over a centered square window of `window_m` meters.
/// Means are taken over valid in-bounds cells only (windows shrink at edges);
/// nodata cells stay nodata.
Raster moving_average(const Raster& raster, double window_m);

/// Mean of valid cells in the window centered on the cell containing (x, y).
/// Returns the nodata sentinel when the window holds no valid cell; throws
/// BoundsError when the point is outside the extent.
double window_mean(const Raster& raster, double x, double y, double window_m);

struct SamplePoint {
  std::string id;
  double x = 0.0;
  double y = 0.0;
  double mv = 0.0;
  double height_m = 0.0;
  std::optional<double> sigma_p_db, sigma_l_db, sigma_c_db;
};

struct SampleTable {
  std::vector<SamplePoint> rows;
};

/// Ground-point CSV: id,x,y,mv,height[,sigma_p_db,sigma_l_db,sigma_c_db].
/// Ids must be unique.
SampleTable read_samples(const std::filesystem::path& path);
void write_samples(const SampleTable& table, const std::filesystem::path& path);

}  // namespace sarsoil
