#include "hfrac/sublaplacian.hpp"

#include <lapacke.h>

#include <cmath>
#include <vector>

namespace hfrac {

namespace {

bool is_integer(double v, double tol = 1e-9) { return std::abs(v - std::round(v)) <= tol; }

bool axis_symmetric(const AxisSpec& ax) {
  return std::abs(ax.a + ax.b) <= 1e-12 * std::max(1.0, std::abs(ax.b));
}

}  // namespace

bool is_group_aligned(const GridSpec& spec) {
  if (spec.mode != BoundaryMode::Periodic) return false;
  const int n = spec.n;
  const auto& tax = spec.axes[2 * n];
  if (tax.count % 2 == 0 || !axis_symmetric(tax)) return false;
  const double ht = tax.spacing();
  const double Lt = tax.length();
  for (int m = 0; m < n; ++m) {
    const auto& xa = spec.axes[m];
    const auto& ya = spec.axes[n + m];
    if (xa.count % 2 == 0 || ya.count % 2 == 0) return false;
    if (!axis_symmetric(xa) || !axis_symmetric(ya)) return false;
    const double q2 = xa.spacing() * ya.spacing() / (2.0 * ht);
    if (!is_integer(q2) || std::round(q2) < 1.0) return false;
    // group-compatible wrap and inversion symmetry of the quotient
    if (!is_integer(xa.length() * ya.spacing() / Lt)) return false;
    if (!is_integer(ya.length() * xa.spacing() / Lt)) return false;
    if (!is_integer(xa.length() * ya.length() / Lt)) return false;
  }
  return true;
}

GridSpec aligned_kernel_spec(int n, double Lz, int Nz, BoundaryMode mode) {
  if (Nz % 2 == 0) throw std::invalid_argument("aligned_kernel_spec: Nz must be odd");
  const double h = 2.0 * Lz / Nz;
  const double ht = 0.5 * h * h;
  const double Lt = 0.5 * Nz * ht;
  GridSpec spec = GridSpec::box(n, Lz, Lt, Nz, Nz, mode);
  if (mode == BoundaryMode::Periodic && !is_group_aligned(spec)) {
    throw std::logic_error("aligned_kernel_spec: produced grid failed the alignment check");
  }
  return spec;
}

namespace {

// Stencil neighbor resolution. Generators: 0..n-1 = a_{x_i}, n..2n-1 = a_{y_i},
// 2n = a_t. On aligned grids the sheared neighbor is an exact lattice cell;
// otherwise it is split linearly between the two enclosing t-cells.
struct StencilGeometry {
  const GridSpec& spec;
  bool aligned;
  std::vector<long> q2;
  std::vector<int> half;

  StencilGeometry(const GridSpec& s, bool al) : spec(s), aligned(al) {
    const int n = spec.n;
    if (aligned) {
      q2.resize(n);
      half.resize(spec.num_axes());
      const double ht = spec.axes[2 * n].spacing();
      for (int m = 0; m < n; ++m) {
        q2[m] = std::lround(spec.axes[m].spacing() * spec.axes[n + m].spacing() / (2.0 * ht));
      }
      for (int k = 0; k < spec.num_axes(); ++k) half[k] = (spec.axes[k].count - 1) / 2;
    }
  }

  struct Target {
    std::size_t flat;
    double weight;
  };

  void resolve(std::vector<int>& idx, int gen, int dir, std::vector<Target>& out) const {
    out.clear();
    const int n = spec.n;
    const int tax = 2 * n;
    const int Nt = spec.axes[tax].count;

    if (gen == tax) {  // central generator, exact on every grid
      int k = idx[tax] + dir;
      if (spec.mode == BoundaryMode::Periodic) {
        k = ((k % Nt) + Nt) % Nt;
      } else if (k < 0 || k >= Nt) {
        return;
      }
      const int saved = idx[tax];
      idx[tax] = k;
      out.push_back({spec.flatten(idx), 1.0});
      idx[tax] = saved;
      return;
    }

    const bool is_x = gen < n;
    const int pair = is_x ? gen : gen - n;
    const int step_axis = gen;
    const int coeff_axis = is_x ? n + pair : pair;  // y_i for X_i, x_i for Y_i
    const int N_step = spec.axes[step_axis].count;
    const double shear_sign = is_x ? -1.0 : 1.0;

    if (aligned) {
      const long c_coeff = idx[coeff_axis] - half[coeff_axis];
      long dk = dir * static_cast<long>(shear_sign) * c_coeff * q2[pair];
      int s = idx[step_axis] + dir;
      if (s >= N_step) {
        s -= N_step;
        dk += static_cast<long>(shear_sign) * N_step * c_coeff * q2[pair];
      } else if (s < 0) {
        s += N_step;
        dk -= static_cast<long>(shear_sign) * N_step * c_coeff * q2[pair];
      }
      long k = idx[tax] + dk;
      k = ((k % Nt) + Nt) % Nt;
      const int s_saved = idx[step_axis], k_saved = idx[tax];
      idx[step_axis] = s;
      idx[tax] = static_cast<int>(k);
      out.push_back({spec.flatten(idx), 1.0});
      idx[step_axis] = s_saved;
      idx[tax] = k_saved;
      return;
    }

    // generic: continuous shear, linear split in t, plain coordinate wrap
    const double h_step = spec.axes[step_axis].spacing();
    const double coeff = spec.axes[coeff_axis].center(idx[coeff_axis]);
    const double ht = spec.axes[tax].spacing();
    const double shear = shear_sign * dir * coeff * h_step / (2.0 * ht);

    int s = idx[step_axis] + dir;
    if (spec.mode == BoundaryMode::Periodic) {
      s = ((s % N_step) + N_step) % N_step;
    } else if (s < 0 || s >= N_step) {
      return;
    }

    const double u = idx[tax] + shear;
    const double fl = std::floor(u);
    const int k0 = static_cast<int>(fl);
    const double w1 = u - fl;
    const int s_saved = idx[step_axis], k_saved = idx[tax];
    idx[step_axis] = s;
    for (int which = 0; which < 2; ++which) {
      int k = k0 + which;
      const double w = which == 0 ? 1.0 - w1 : w1;
      if (w == 0.0) continue;
      if (spec.mode == BoundaryMode::Periodic) {
        k = ((k % Nt) + Nt) % Nt;
      } else if (k < 0 || k >= Nt) {
        continue;
      }
      idx[tax] = k;
      out.push_back({spec.flatten(idx), w});
      idx[tax] = k_saved;
    }
    idx[step_axis] = s_saved;
  }
};

// g(T) e1 * scale for the tridiagonal with diagonal a and off-diagonal b.
Eigen::VectorXd tridiag_function_e1(const std::vector<double>& a, const std::vector<double>& b,
                                    int k, const std::function<double(double)>& g, double scale) {
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    T(i, i) = a[i];
    if (i + 1 < k) {
      T(i, i + 1) = b[i];
      T(i + 1, i) = b[i];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  Eigen::VectorXd w = es.eigenvectors().row(0).transpose();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(k);
  for (int i = 0; i < k; ++i) {
    y += es.eigenvectors().col(i) * (g(es.eigenvalues()(i)) * w(i) * scale);
  }
  return y;
}

struct Lanczos {
  Eigen::MatrixXd V;
  std::vector<double> a, b;
  double vnorm = 0.0;
  int k = 0;
  double last_diff = 0.0;
  bool converged = false;
};

// Lanczos with full (two-pass) reorthogonalization. Convergence is measured
// on `probe`, evaluated periodically in coefficient space.
Lanczos lanczos_factorize(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& v, int kmax,
                          double tol, double lambda_scale,
                          const std::function<double(double)>& probe) {
  Lanczos F;
  F.vnorm = v.norm();
  if (F.vnorm == 0.0) {
    F.converged = true;
    return F;
  }
  const int dim = static_cast<int>(v.size());
  const int block = 64;
  Eigen::MatrixXd V(dim, std::min(block, kmax));
  V.col(0) = v / F.vnorm;
  Eigen::VectorXd y_prev;
  int k = 0;
  bool done = false;
  while (k < kmax && !done) {
    Eigen::VectorXd w = A * V.col(k);
    F.a.push_back(V.col(k).dot(w));
    w -= F.a[k] * V.col(k);
    if (k > 0) w -= F.b[k - 1] * V.col(k - 1);
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXd proj = V.leftCols(k + 1).transpose() * w;
      w -= V.leftCols(k + 1) * proj;
    }
    const double beta = w.norm();
    ++k;
    const bool breakdown = beta < 1e-13 * std::max(1.0, lambda_scale);
    if (breakdown || k == kmax || (k % 16 == 0 && k >= 32)) {
      Eigen::VectorXd y = tridiag_function_e1(F.a, F.b, k, probe, F.vnorm);
      if (y_prev.size() > 0) {
        Eigen::VectorXd diff = y;
        diff.head(y_prev.size()) -= y_prev;
        F.last_diff = diff.norm();
        if (F.last_diff <= tol * F.vnorm) done = true;
      }
      y_prev = std::move(y);
      if (breakdown) {
        F.converged = true;
        done = true;
      }
      if (done) F.converged = true;
    }
    if (!done && k < kmax) {
      if (k + 1 > V.cols()) {
        V.conservativeResize(Eigen::NoChange,
                             std::min(V.cols() + block, static_cast<Eigen::Index>(kmax)));
      }
      V.col(k) = w / beta;
      F.b.push_back(beta);
    }
  }
  F.k = k;
  F.V = V.leftCols(k);
  return F;
}

Eigen::VectorXd lanczos_evaluate(const Lanczos& F, const std::function<double(double)>& g,
                                 int dim) {
  if (F.vnorm == 0.0) return Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd y = tridiag_function_e1(F.a, F.b, F.k, g, F.vnorm);
  return F.V * y;
}

}  // namespace

SubLaplacianOperator::SubLaplacianOperator(const GridSpec& spec, SubLaplacianOptions opts)
    : spec_(spec), opts_(opts) {
  const std::size_t dim = spec.total_cells();
  if (dim > opts_.max_unknowns) {
    throw std::invalid_argument("SubLaplacianOperator: grid exceeds the unknown cap (" +
                                std::to_string(dim) + " > " + std::to_string(opts_.max_unknowns) +
                                ")");
  }
  aligned_ = is_group_aligned(spec);
  StencilGeometry geo(spec_, aligned_);

  const int n = spec.n;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(dim * (8 * n + 8));
  std::vector<int> idx(spec.num_axes(), 0);
  std::vector<StencilGeometry::Target> targets;

  std::vector<double> weight(2 * n + 1);
  for (int g = 0; g < 2 * n; ++g) {
    weight[g] = 1.0 / (spec.axes[g].spacing() * spec.axes[g].spacing());
  }
  double hxy_min = std::numeric_limits<double>::infinity();
  for (int m = 0; m < n; ++m) {
    hxy_min = std::min(hxy_min, spec.axes[m].spacing() * spec.axes[n + m].spacing());
  }
  const double ht = spec.axes[2 * n].spacing();
  weight[2 * n] = opts_.vertical_coupling * hxy_min / (4.0 * ht * ht);

  for (std::size_t flat = 0; flat < dim; ++flat) {
    for (int gen = 0; gen <= 2 * n; ++gen) {
      if (weight[gen] == 0.0) continue;
      geo.resolve(idx, gen, +1, targets);
      double covered = 0.0;
      for (const auto& tg : targets) {
        const double w = weight[gen] * tg.weight;
        covered += tg.weight;
        trips.emplace_back(static_cast<int>(flat), static_cast<int>(flat), w);
        trips.emplace_back(static_cast<int>(tg.flat), static_cast<int>(tg.flat), w);
        trips.emplace_back(static_cast<int>(flat), static_cast<int>(tg.flat), -w);
        trips.emplace_back(static_cast<int>(tg.flat), static_cast<int>(flat), -w);
      }
      const double outside = 1.0 - covered;
      if (outside > 1e-14) {  // Dirichlet mass (zero-extended mode)
        trips.emplace_back(static_cast<int>(flat), static_cast<int>(flat), weight[gen] * outside);
      }
    }
    for (int k = spec.num_axes() - 1; k >= 0; --k) {
      if (++idx[k] < spec.axes[k].count) break;
      idx[k] = 0;
    }
  }

  A_.resize(static_cast<int>(dim), static_cast<int>(dim));
  A_.setFromTriplets(trips.begin(), trips.end());
  A_.makeCompressed();

  Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(A_.rows());
  for (int c = 0; c < A_.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A_, c); it; ++it) {
      rowsum(it.row()) += std::abs(it.value());
    }
  }
  lambda_max_ = rowsum.maxCoeff();
}

void SubLaplacianOperator::ensure_dense() const {
  if (dense_) return;
  const int nn = static_cast<int>(dim());
  Eigen::MatrixXd M(A_);
  Eigen::VectorXd w(nn);
  const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', nn, M.data(), nn, w.data());
  if (info != 0) throw std::runtime_error("SubLaplacianOperator: dsyevd failed");
  auto d = std::make_shared<DenseEig>();
  d->values = std::move(w);
  d->vectors = std::move(M);
  dense_ = std::move(d);
}

const Eigen::VectorXd& SubLaplacianOperator::dense_eigenvalues() const {
  if (!uses_dense_path()) {
    throw std::logic_error("dense_eigenvalues: operator uses the Lanczos path");
  }
  ensure_dense();
  return dense_->values;
}

Eigen::VectorXd SubLaplacianOperator::apply_function(const std::function<double(double)>& g,
                                                     const Eigen::VectorXd& v) const {
  if (uses_dense_path()) {
    ensure_dense();
    Eigen::VectorXd c = dense_->vectors.transpose() * v;
    for (int i = 0; i < c.size(); ++i) c(i) *= g(dense_->values(i));
    return dense_->vectors * c;
  }
  Lanczos F = lanczos_factorize(A_, v, opts_.lanczos_max_iters, opts_.lanczos_tol, lambda_max_, g);
  if (!F.converged) {
    throw std::runtime_error("SubLaplacianOperator: Lanczos non-convergence (last diff " +
                             std::to_string(F.last_diff / std::max(F.vnorm, 1e-300)) + " rel)");
  }
  return lanczos_evaluate(F, g, static_cast<int>(dim()));
}

std::size_t SubLaplacianOperator::identity_cell() const {
  std::vector<int> idx(spec_.num_axes());
  for (int kaxis = 0; kaxis < spec_.num_axes(); ++kaxis) {
    const auto& ax = spec_.axes[kaxis];
    int best = 0;
    double bestd = std::numeric_limits<double>::infinity();
    for (int j = 0; j < ax.count; ++j) {
      const double d = std::abs(ax.center(j));
      if (d < bestd) {
        bestd = d;
        best = j;
      }
    }
    if (bestd > 1e-9 * ax.spacing()) {
      throw std::invalid_argument("identity_cell: the group identity is not a cell center");
    }
    idx[kaxis] = best;
  }
  return spec_.flatten(idx);
}

GridField SubLaplacianOperator::frame_derivative(const GridField& f, int j) const {
  const int n = spec_.n;
  if (j < 1 || j > 2 * n) throw std::invalid_argument("frame_derivative: j out of range");
  if (!spec_.same_shape(f.spec)) throw std::invalid_argument("frame_derivative: grid mismatch");
  StencilGeometry geo(spec_, aligned_);
  const int gen = j - 1;
  const double h = spec_.axes[gen].spacing();
  GridField out(f.spec);
  std::vector<int> idx(spec_.num_axes(), 0);
  std::vector<StencilGeometry::Target> targets;
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    Complex acc(0.0, 0.0);
    geo.resolve(idx, gen, +1, targets);
    for (const auto& tg : targets) acc += tg.weight * f.values[tg.flat];
    geo.resolve(idx, gen, -1, targets);
    for (const auto& tg : targets) acc -= tg.weight * f.values[tg.flat];
    out.values[flat] = acc / (2.0 * h);
    for (int kaxis = spec_.num_axes() - 1; kaxis >= 0; --kaxis) {
      if (++idx[kaxis] < spec_.axes[kaxis].count) break;
      idx[kaxis] = 0;
    }
  }
  return out;
}

GridField operator_function(const SubLaplacianOperator& L, const std::function<double(double)>& g,
                            const GridField& f) {
  if (!L.grid().same_shape(f.spec)) {
    throw std::invalid_argument("operator_function: grid mismatch");
  }
  const std::size_t m = f.size();
  Eigen::VectorXd re(m), im(m);
  bool has_im = false;
  for (std::size_t i = 0; i < m; ++i) {
    re(static_cast<int>(i)) = f.values[i].real();
    im(static_cast<int>(i)) = f.values[i].imag();
    if (f.values[i].imag() != 0.0) has_im = true;
  }
  Eigen::VectorXd re2 = L.apply_function(g, re);
  Eigen::VectorXd im2 = has_im ? L.apply_function(g, im) : Eigen::VectorXd::Zero(re.size());
  GridField out(f.spec);
  for (std::size_t i = 0; i < m; ++i) {
    out.values[i] = Complex(re2(static_cast<int>(i)), im2(static_cast<int>(i)));
  }
  return out;
}

struct SpectralApplicator::Factorization : Lanczos {};

SpectralApplicator::SpectralApplicator(const SubLaplacianOperator& L, const GridField& f)
    : L_(L), spec_(f.spec) {
  if (!L.grid().same_shape(f.spec)) {
    throw std::invalid_argument("SpectralApplicator: grid mismatch");
  }
  if (L.uses_dense_path()) {
    field_ = std::make_shared<GridField>(f);
    return;
  }
  const std::size_t m = f.size();
  Eigen::VectorXd re(m), im(m);
  bool has_im = false;
  for (std::size_t i = 0; i < m; ++i) {
    re(static_cast<int>(i)) = f.values[i].real();
    im(static_cast<int>(i)) = f.values[i].imag();
    if (f.values[i].imag() != 0.0) has_im = true;
  }
  auto probe = power_spectral(0.25);  // hardest of the spectral functions in use
  auto fre = std::make_shared<Factorization>();
  static_cast<Lanczos&>(*fre) = lanczos_factorize(L.matrix(), re, L.options().lanczos_max_iters,
                                                  L.options().lanczos_tol, L.lambda_max_bound(),
                                                  probe);
  re_ = std::move(fre);
  if (has_im) {
    auto fim = std::make_shared<Factorization>();
    static_cast<Lanczos&>(*fim) = lanczos_factorize(L.matrix(), im, L.options().lanczos_max_iters,
                                                    L.options().lanczos_tol, L.lambda_max_bound(),
                                                    probe);
    im_ = std::move(fim);
  }
}

GridField SpectralApplicator::apply(const std::function<double(double)>& g) const {
  if (L_.uses_dense_path()) return operator_function(L_, g, *field_);
  GridField out(spec_);
  Eigen::VectorXd re2 = lanczos_evaluate(*re_, g, static_cast<int>(out.size()));
  Eigen::VectorXd im2 = im_ ? lanczos_evaluate(*im_, g, static_cast<int>(out.size()))
                            : Eigen::VectorXd::Zero(re2.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values[i] = Complex(re2(static_cast<int>(i)), im2(static_cast<int>(i)));
  }
  return out;
}

std::function<double(double)> power_spectral(double alpha) {
  return [alpha](double lam) { return std::pow(std::max(lam, 0.0), alpha); };
}

std::function<double(double)> one_plus_power_spectral(double alpha) {
  return [alpha](double lam) { return std::pow(1.0 + std::max(lam, 0.0), alpha); };
}

std::function<double(double)> heat_spectral(double s) {
  return [s](double lam) { return std::exp(-s * std::max(lam, 0.0)); };
}

}  // namespace hfrac
