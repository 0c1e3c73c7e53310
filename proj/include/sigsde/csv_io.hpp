#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sigsde/signature.hpp"

namespace sigsde {

/// Paths whose coordinate 0 is time, as rows "sample,t,y0,y1,...,ym".
/// Values are written with 17 significant digits so reading back is exact.
void write_paths_csv(std::ostream& os, const std::vector<PiecewiseLinearPath>& paths);
void write_paths_csv(const std::string& file, const std::vector<PiecewiseLinearPath>& paths);

/// Reads "[sample,]t,y0,...,ym" files, where y0 is already the time
/// coordinate, or plain "[sample,]t,x1,...,xd" files, which get time
/// prepended. Returns time-augmented paths.
std::vector<PiecewiseLinearPath> read_paths_csv(std::istream& is);
std::vector<PiecewiseLinearPath> read_paths_csv(const std::string& file);

std::string format_double(double v);

}  // namespace sigsde
