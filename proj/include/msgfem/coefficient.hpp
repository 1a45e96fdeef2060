#ifndef MSGFEM_COEFFICIENT_HPP
#define MSGFEM_COEFFICIENT_HPP

#include <limits>

#include "msgfem/core.hpp"
#include "msgfem/mesh.hpp"

namespace msgfem {

/// Cell-wise constant permeability A with cached bounds. Sampling A as a
/// constant per cell makes every element integral exact and matches the
/// raster-file input path.
class CoefficientField {
 public:
  CoefficientField(const Mesh& mesh, Eigen::VectorXd values)
      : values_(std::move(values)) {
    require(values_.size() == mesh.n_cells(),
            "coefficient: one value per mesh cell required");
    alpha0_ = std::numeric_limits<double>::infinity();
    alpha1_ = 0.0;
    for (int c = 0; c < values_.size(); ++c) {
      require(values_[c] > 0.0, "coefficient: nonpositive value at cell " +
                                    std::to_string(c));
      alpha0_ = std::min(alpha0_, values_[c]);
      alpha1_ = std::max(alpha1_, values_[c]);
    }
  }

  static CoefficientField uniform(const Mesh& mesh, double value = 1.0) {
    return CoefficientField(
        mesh, Eigen::VectorXd::Constant(mesh.n_cells(), value));
  }

  double value(int cell) const { return values_[cell]; }
  double inverse(int cell) const { return 1.0 / values_[cell]; }
  const Eigen::VectorXd& values() const { return values_; }
  double alpha0() const { return alpha0_; }
  double alpha1() const { return alpha1_; }
  double contrast() const { return alpha1_ / alpha0_; }

 private:
  Eigen::VectorXd values_;
  double alpha0_, alpha1_;
};

}  // namespace msgfem

#endif  // MSGFEM_COEFFICIENT_HPP
