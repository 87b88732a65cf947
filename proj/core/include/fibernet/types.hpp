#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fibernet {

using Vec2 = Eigen::Vector2d;
using SparseMat = Eigen::SparseMatrix<double>;
using SparseMatRM = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

// File format versions (bumped on any schema change).
inline constexpr int kNetworkFormatVersion = 1;
inline constexpr int kSolutionFormatVersion = 1;
inline constexpr int kSystemFormatVersion = 1;
inline constexpr int kStudyFormatVersion = 1;

/// Degree-of-freedom layout: interleaved (x0, y0, x1, y1, ...).
inline int dof_of(int node, int axis) { return 2 * node + axis; }
inline int node_of(int dof) { return dof / 2; }
inline int axis_of(int dof) { return dof % 2; }

/// Configuration / validation problem (CLI exit code 2).
class config_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// File I/O or format problem (CLI exit code 2).
class io_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: singular system, violated invariant (CLI exit code 1).
class numerical_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Matrix scale used by the relative tolerances in this project:
/// the largest absolute entry.
double matrix_scale(const SparseMat& A);

/// Formats a double with 17 significant digits (lossless round-trip).
std::string format_full(double v);

} // namespace fibernet
