#pragma once

#include <memory>
#include <span>
#include <vector>

namespace usc::lp::detail {

struct SparseColumn {
  std::vector<int> index;
  std::vector<double> value;
};

/// Sparse LU of an m x m matrix, solving with it and with its transpose.
/// Implemented on KLU when available, otherwise on Eigen's SparseLU.
class SparseLuSolver {
 public:
  virtual ~SparseLuSolver() = default;
  /// Column-compressed input. Returns false if numerically singular.
  virtual bool factorize(int m, const std::vector<int>& col_start,
                         const std::vector<int>& row_index,
                         const std::vector<double>& value) = 0;
  virtual void solve(double* rhs) = 0;
  virtual void solve_transposed(double* rhs) = 0;
};

std::unique_ptr<SparseLuSolver> make_sparse_lu();

/// LU factorization of the simplex basis plus a product-form eta file for the
/// pivots since the last refactorization.
class BasisFactor {
 public:
  explicit BasisFactor(int m);

  /// Factorizes the m x m matrix whose k-th column is `columns[k]`. Returns
  /// false if the matrix is numerically singular.
  bool factorize(std::span<const SparseColumn> columns);

  /// Solves B w = rhs in place.
  void ftran(std::vector<double>& rhs) const;
  /// Solves B' w = rhs in place.
  void btran(std::vector<double>& rhs) const;

  /// Replaces basis column `pivot_row` by the column whose FTRAN image is
  /// `alpha`.
  void update(int pivot_row, std::span<const double> alpha);

  int num_updates() const { return static_cast<int>(etas_.size()); }

 private:
  struct Eta {
    int pivot_row = 0;
    double pivot = 1.0;
    std::vector<int> index;
    std::vector<double> value;
  };

  int m_ = 0;
  std::unique_ptr<SparseLuSolver> lu_;
  std::vector<Eta> etas_;
};

}  // namespace usc::lp::detail
