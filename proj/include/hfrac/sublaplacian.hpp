#pragma once

#include "hfrac/grid.hpp"

#include <Eigen/Sparse>

#include <memory>
#include <optional>

namespace hfrac {

struct SubLaplacianOptions {
  std::size_t max_unknowns = 64000;
  int dense_cap = 5000;
  /// Weight factor for the central (pure-t) walk generator; the induced
  /// operator perturbation is -kappa (h_x h_y / 4) d_t^2, which vanishes at
  /// the same O(h^2) rate as the stencil's truncation error.
  double vertical_coupling = 2.0;
  int lanczos_max_iters = 400;
  double lanczos_tol = 1e-8;
};

/// Compatibility of a grid with the exact group-translation stencil:
/// odd counts, axes symmetric about 0, integer shear ratios
/// q_i = h_{x_i} h_{y_i} / (2 h_t), and group-compatible wrap
/// (L_{x_i} h_{y_i} and L_{y_i} h_{x_i} integer multiples of L_t,
/// L_{x_i} L_{y_i} an integer multiple of L_t).
bool is_group_aligned(const GridSpec& spec);

/// Kernel-grade aligned grid: 2n horizontal axes [-Lz, Lz] with Nz cells
/// (odd), vertical axis [-Lt, Lt] with Nt = Nz cells and height fixed by the
/// shear-alignment condition h_t = h_z^2 / 2 (so 2 Lt = Nz h_z^2 / 2).
GridSpec aligned_kernel_spec(int n, double Lz, int Nz,
                             BoundaryMode mode = BoundaryMode::Periodic);

/// Symmetric positive-semidefinite discretization of -Delta = -sum X_j^2 as
/// a left-invariant walk: Gram sum of forward group-translation differences
/// along the horizontal frame flows, plus a weak central coupling. On
/// group-aligned periodic grids the translations are exact lattice
/// permutations, which makes e^{-sA} entrywise nonnegative and the kernels
/// exactly symmetric under inversion. On other grids the sheared neighbor is
/// split linearly between the two enclosing cells (still symmetric, still a
/// Z-matrix, O(h^2) consistent).
class SubLaplacianOperator {
 public:
  explicit SubLaplacianOperator(const GridSpec& spec, SubLaplacianOptions opts = {});

  const GridSpec& grid() const { return spec_; }
  const SubLaplacianOptions& options() const { return opts_; }
  const Eigen::SparseMatrix<double>& matrix() const { return A_; }
  bool aligned() const { return aligned_; }
  std::size_t dim() const { return static_cast<std::size_t>(A_.rows()); }
  double lambda_max_bound() const { return lambda_max_; }
  bool uses_dense_path() const { return dim() <= static_cast<std::size_t>(opts_.dense_cap); }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return A_ * v; }

  /// g(A) v via the cached dense eigendecomposition (dim <= dense_cap) or
  /// Lanczos with full reorthogonalization.
  Eigen::VectorXd apply_function(const std::function<double(double)>& g,
                                 const Eigen::VectorXd& v) const;

  /// Eigenvalues of the dense factorization (dense path only).
  const Eigen::VectorXd& dense_eigenvalues() const;

  /// Flat index of the cell whose center is the group identity; throws if the
  /// origin is not a cell center.
  std::size_t identity_cell() const;

  /// Grid stencil derivative X_j f (j in 1..2n: X_1..X_n then Y_1..Y_n) by the
  /// centered group-translation difference.
  GridField frame_derivative(const GridField& f, int j) const;

 private:
  struct DenseEig {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
  };
  void ensure_dense() const;
  Eigen::VectorXd lanczos_apply(const std::function<double(double)>& g,
                                const Eigen::VectorXd& v) const;

  GridSpec spec_;
  SubLaplacianOptions opts_;
  bool aligned_ = false;
  Eigen::SparseMatrix<double> A_;
  double lambda_max_ = 0.0;
  mutable std::shared_ptr<DenseEig> dense_;
};

/// g(A) applied to a grid field (real and imaginary parts independently).
GridField operator_function(const SubLaplacianOperator& L, const std::function<double(double)>& g,
                            const GridField& f);

/// Reusable Lanczos factorization for applying several spectral functions to
/// the same field (the Krylov basis does not depend on g).
class SpectralApplicator {
 public:
  SpectralApplicator(const SubLaplacianOperator& L, const GridField& f);
  GridField apply(const std::function<double(double)>& g) const;

 private:
  const SubLaplacianOperator& L_;
  GridSpec spec_;
  struct Factorization;
  std::shared_ptr<Factorization> re_, im_;
  std::shared_ptr<const GridField> field_;  // dense path keeps the field itself
};

// Common spectral functions.
std::function<double(double)> power_spectral(double alpha);           // lambda^alpha
std::function<double(double)> one_plus_power_spectral(double alpha);  // (1+lambda)^alpha
std::function<double(double)> heat_spectral(double s);                // e^{-s lambda}

}  // namespace hfrac
