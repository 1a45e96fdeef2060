#ifndef MSGFEM_TESTS_HELPERS_HPP
#define MSGFEM_TESTS_HELPERS_HPP

#include <random>

#include "msgfem/mesh.hpp"

namespace msgfem::testing {

/// Deterministic RNG for property tests; fixed seeds keep failures
/// reproducible.
inline std::mt19937_64 rng(uint64_t seed) { return std::mt19937_64(seed); }

inline int rand_int(std::mt19937_64& g, int lo, int hi) {
  return lo + static_cast<int>(g() % static_cast<uint64_t>(hi - lo + 1));
}

inline double rand_real(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(g() >> 11) * 0x1.0p-53);
}

inline CellRegion random_rectangle(std::mt19937_64& g, const Mesh& mesh) {
  int w = rand_int(g, 1, mesh.nx());
  int h = rand_int(g, 1, mesh.ny());
  int i0 = rand_int(g, 0, mesh.nx() - w);
  int j0 = rand_int(g, 0, mesh.ny() - h);
  return CellRegion::rectangle(mesh, i0, j0, w, h);
}

inline Eigen::VectorXd random_vector(std::mt19937_64& g, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rand_real(g, -1.0, 1.0);
  return v;
}

/// Independent dense route for small saddle systems: full KKT matrix with
/// constrained velocity rows replaced by identity rows, solved by full-pivot
/// LU; with `mean_zero` a Lagrange row enforces the weighted pressure mean.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> dense_saddle_oracle(
    const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
    const Eigen::VectorXd& areas, const Eigen::VectorXd& rhs_u,
    const Eigen::VectorXd& rhs_p, const std::vector<int>& cons,
    const Eigen::VectorXd& vals, bool mean_zero) {
  int nu = static_cast<int>(A.rows()), np = static_cast<int>(B.rows());
  int n = nu + np + (mean_zero ? 1 : 0);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  T.topLeftCorner(nu, nu) = A;
  T.block(nu, 0, np, nu) = B;
  T.block(0, nu, nu, np) = B.transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs.head(nu) = rhs_u;
  rhs.segment(nu, np) = rhs_p;
  if (mean_zero) {
    for (int c = 0; c < np; ++c) {
      T(nu + c, n - 1) = areas[c];
      T(n - 1, nu + c) = areas[c];
    }
  }
  for (size_t k = 0; k < cons.size(); ++k) {
    int e = cons[k];
    T.row(e).setZero();
    T(e, e) = 1.0;
    rhs[e] = vals[k];
  }
  Eigen::VectorXd x = T.fullPivLu().solve(rhs);
  Eigen::VectorXd u = x.head(nu);
  Eigen::VectorXd p = x.segment(nu, np);
  if (mean_zero) p.array() -= areas.dot(p) / areas.sum();
  return {u, p};
}

}  // namespace msgfem::testing

#endif  // MSGFEM_TESTS_HELPERS_HPP
