#include "basis_factor.hpp"

#include <cmath>

#ifdef USC_HAVE_KLU
#include <klu.h>
#else
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#endif

namespace usc::lp::detail {

namespace {

#ifdef USC_HAVE_KLU

// Pivots this far below the largest diagonal entry of U are treated as zero.
constexpr double kMinRcond = 1e-13;

class KluSolver final : public SparseLuSolver {
 public:
  KluSolver() { klu_defaults(&common_); }
  ~KluSolver() override { release(); }
  KluSolver(const KluSolver&) = delete;
  KluSolver& operator=(const KluSolver&) = delete;

  bool factorize(int m, const std::vector<int>& col_start,
                 const std::vector<int>& row_index,
                 const std::vector<double>& value) override {
    release();
    m_ = m;
    col_start_ = col_start;
    row_index_ = row_index;
    value_ = value;
    symbolic_ = klu_analyze(m, col_start_.data(), row_index_.data(), &common_);
    if (symbolic_ == nullptr) return false;
    numeric_ = klu_factor(col_start_.data(), row_index_.data(), value_.data(),
                          symbolic_, &common_);
    if (numeric_ == nullptr || common_.status != KLU_OK) return false;
    if (!klu_rcond(symbolic_, numeric_, &common_)) return false;
    return common_.rcond > kMinRcond;
  }

  void solve(double* rhs) override {
    klu_solve(symbolic_, numeric_, m_, 1, rhs, &common_);
  }
  void solve_transposed(double* rhs) override {
    klu_tsolve(symbolic_, numeric_, m_, 1, rhs, &common_);
  }

 private:
  void release() {
    if (numeric_ != nullptr) klu_free_numeric(&numeric_, &common_);
    if (symbolic_ != nullptr) klu_free_symbolic(&symbolic_, &common_);
  }

  klu_common common_{};
  klu_symbolic* symbolic_ = nullptr;
  klu_numeric* numeric_ = nullptr;
  int m_ = 0;
  std::vector<int> col_start_;
  std::vector<int> row_index_;
  std::vector<double> value_;
};

#else

class EigenSolver final : public SparseLuSolver {
 public:
  bool factorize(int m, const std::vector<int>& col_start,
                 const std::vector<int>& row_index,
                 const std::vector<double>& value) override {
    m_ = m;
    Eigen::Map<const Eigen::SparseMatrix<double>> view(
        m, m, static_cast<int>(value.size()), col_start.data(), row_index.data(),
        value.data());
    Eigen::SparseMatrix<double> basis = view;
    lu_.analyzePattern(basis);
    lu_.factorize(basis);
    if (lu_.info() != Eigen::Success) return false;
    // SparseLU reports structural singularity only; an exactly zero pivot
    // shows up as a non-finite log-determinant.
    return std::isfinite(lu_.logAbsDeterminant());
  }

  void solve(double* rhs) override {
    Eigen::Map<Eigen::VectorXd> v(rhs, m_);
    work_ = lu_.solve(v);
    v = work_;
  }
  void solve_transposed(double* rhs) override {
    Eigen::Map<Eigen::VectorXd> v(rhs, m_);
    work_ = lu_.transpose().solve(v);
    v = work_;
  }

 private:
  int m_ = 0;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  Eigen::VectorXd work_;
};

#endif

}  // namespace

std::unique_ptr<SparseLuSolver> make_sparse_lu() {
#ifdef USC_HAVE_KLU
  return std::make_unique<KluSolver>();
#else
  return std::make_unique<EigenSolver>();
#endif
}

BasisFactor::BasisFactor(int m) : m_(m), lu_(make_sparse_lu()) {}

bool BasisFactor::factorize(std::span<const SparseColumn> columns) {
  etas_.clear();
  if (m_ == 0) return true;
  std::vector<int> start(m_ + 1, 0);
  std::vector<int> index;
  std::vector<double> value;
  for (int k = 0; k < m_; ++k) {
    const SparseColumn& c = columns[k];
    index.insert(index.end(), c.index.begin(), c.index.end());
    value.insert(value.end(), c.value.begin(), c.value.end());
    start[k + 1] = static_cast<int>(index.size());
  }
  return lu_->factorize(m_, start, index, value);
}

void BasisFactor::ftran(std::vector<double>& rhs) const {
  if (m_ == 0) return;
  lu_->solve(rhs.data());
  for (const Eta& eta : etas_) {
    const double t = rhs[eta.pivot_row] / eta.pivot;
    rhs[eta.pivot_row] = t;
    if (t == 0.0) continue;
    for (std::size_t e = 0; e < eta.index.size(); ++e) {
      rhs[eta.index[e]] -= eta.value[e] * t;
    }
  }
}

void BasisFactor::btran(std::vector<double>& rhs) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = rhs[it->pivot_row];
    for (std::size_t e = 0; e < it->index.size(); ++e) {
      s -= it->value[e] * rhs[it->index[e]];
    }
    rhs[it->pivot_row] = s / it->pivot;
  }
  lu_->solve_transposed(rhs.data());
}

void BasisFactor::update(int pivot_row, std::span<const double> alpha) {
  Eta eta;
  eta.pivot_row = pivot_row;
  eta.pivot = alpha[pivot_row];
  for (int i = 0; i < m_; ++i) {
    if (i != pivot_row && std::abs(alpha[i]) > 1e-14) {
      eta.index.push_back(i);
      eta.value.push_back(alpha[i]);
    }
  }
  etas_.push_back(std::move(eta));
}

}  // namespace usc::lp::detail
