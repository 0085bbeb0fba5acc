#pragma once

#include <string>
#include <vector>

#include "cip/grid.hpp"

namespace cip {

// CSV formats:
//   GridFn1D: "# start_x,step_x,count_x" then one value per line.
//   GridFn2D: "# start_x,step_x,count_x,start_t,step_t,count_t" then one
//             x-row of t-values per line.

void write_gridfn1d(const std::string& path, const GridFn1D& f);
GridFn1D read_gridfn1d(const std::string& path);

void write_gridfn2d(const std::string& path, const GridFn2D& f);
GridFn2D read_gridfn2d(const std::string& path);

/// Writes equal-length columns under a "# name1,name2,..." header line.
void write_columns(const std::string& path, const std::vector<std::string>& names,
                   const std::vector<const std::vector<double>*>& cols);

struct Table {
    std::vector<std::string> comments;  // leading '#' lines, '#' stripped
    std::vector<std::vector<double>> cols;
};

/// Reads a numeric CSV, collecting leading comment lines.
Table read_table(const std::string& path);

}  // namespace cip
