#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <vector>

namespace hema::linalg {

/**
 * @brief Symmetric block tridiagonal matrix with B x B blocks and its Cholesky factor.
 *
 * Only the diagonal blocks and the blocks below the diagonal are stored:
 * lower(k) is the block at block-row k, block-column k-1 (k >= 1).
 * factor() overwrites the storage with L such that A = L L^T, block bidiagonal.
 */
template <int B>
class BlockTridiagonal {
 public:
  using Block = Eigen::Matrix<double, B, B>;
  using Segment = Eigen::Matrix<double, B, 1>;

  explicit BlockTridiagonal(int blocks = 0) { resize(blocks); }

  void resize(int blocks) {
    diag_.assign(static_cast<std::size_t>(blocks), Block::Zero());
    lower_.assign(static_cast<std::size_t>(blocks), Block::Zero());
  }

  void set_zero() {
    for (auto& d : diag_) d.setZero();
    for (auto& l : lower_) l.setZero();
  }

  int blocks() const { return static_cast<int>(diag_.size()); }
  int size() const { return B * blocks(); }

  Block& diag(int k) { return diag_[static_cast<std::size_t>(k)]; }
  const Block& diag(int k) const { return diag_[static_cast<std::size_t>(k)]; }
  Block& lower(int k) { return lower_[static_cast<std::size_t>(k)]; }
  const Block& lower(int k) const { return lower_[static_cast<std::size_t>(k)]; }

  /// Adds v to the symmetric entry (i, j), i and j in at most adjacent blocks.
  void add(int i, int j, double v) {
    int bi = i / B, bj = j / B;
    if (bi == bj) {
      diag(bi)(i % B, j % B) += v;
      if (i != j) diag(bi)(j % B, i % B) += v;
    } else if (bi == bj + 1) {
      lower(bi)(i % B, j % B) += v;
    } else if (bj == bi + 1) {
      lower(bj)(j % B, i % B) += v;
    }
  }

  void add_diagonal(double v) {
    for (auto& d : diag_) d.diagonal().array() += v;
  }

  /// Adds reg * max(1, |A_ii|) to every diagonal entry.
  void add_relative_diagonal(double reg) {
    for (auto& d : diag_)
      for (int r = 0; r < B; ++r) d(r, r) += reg * std::max(1.0, std::abs(d(r, r)));
  }

  /// In-place block Cholesky. Returns false if a pivot block is not positive definite.
  bool factor() {
    for (int k = 0; k < blocks(); ++k) {
      if (k > 0) {
        // lower(k) <- lower(k) * L_{k-1}^{-T}
        Block t = lower(k).transpose();
        diag(k - 1).template triangularView<Eigen::Lower>().solveInPlace(t);
        lower(k) = t.transpose();
        diag(k).noalias() -= lower(k) * lower(k).transpose();
      }
      Eigen::LLT<Block> llt(diag(k));
      if (llt.info() != Eigen::Success) return false;
      diag(k) = llt.matrixL();
    }
    return true;
  }

  /// Solves (L L^T) x = rhs in place after factor().
  void solve_in_place(Eigen::VectorXd& x) const {
    const int n = blocks();
    for (int k = 0; k < n; ++k) {
      auto seg = x.segment<B>(k * B);
      if (k > 0) seg.noalias() -= lower(k) * x.segment<B>((k - 1) * B);
      diag(k).template triangularView<Eigen::Lower>().solveInPlace(seg);
    }
    for (int k = n - 1; k >= 0; --k) {
      auto seg = x.segment<B>(k * B);
      if (k + 1 < n) seg.noalias() -= lower(k + 1).transpose() * x.segment<B>((k + 1) * B);
      diag(k).transpose().template triangularView<Eigen::Upper>().solveInPlace(seg);
    }
  }

  /// y = A x on the unfactored matrix.
  void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    const int n = blocks();
    y.resize(x.size());
    for (int k = 0; k < n; ++k) {
      auto out = y.segment<B>(k * B);
      out.noalias() = diag(k) * x.segment<B>(k * B);
      if (k > 0) out.noalias() += lower(k) * x.segment<B>((k - 1) * B);
      if (k + 1 < n) out.noalias() += lower(k + 1).transpose() * x.segment<B>((k + 1) * B);
    }
  }

  /// Dense copy (tests only).
  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size(), size());
    for (int k = 0; k < blocks(); ++k) {
      m.block<B, B>(k * B, k * B) = diag(k);
      if (k > 0) {
        m.block<B, B>(k * B, (k - 1) * B) = lower(k);
        m.block<B, B>((k - 1) * B, k * B) = lower(k).transpose();
      }
    }
    return m;
  }

 private:
  std::vector<Block> diag_;
  std::vector<Block> lower_;
};

}  // namespace hema::linalg
