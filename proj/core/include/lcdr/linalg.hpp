#pragma once

#include <Eigen/Dense>

namespace lcdr {

// Row-major so that per-position rows are contiguous; double keeps the
// gradient checks and the incremental-vs-batch comparisons tight.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1>;

}  // namespace lcdr
