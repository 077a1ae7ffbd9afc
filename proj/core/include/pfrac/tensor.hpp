#pragma once

#include <Eigen/Dense>
#include <array>

namespace pfrac {

/// Symmetric 2x2 second-order tensor (small-strain / stress), single shear
/// component stored. Shear is tensorial here; the engineering factor of two
/// enters only in assembled Voigt vectors.
struct Tensor2s {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;

  double trace() const { return xx + yy; }

  /// Double contraction a : b (accounts for both off-diagonal entries).
  double ddot(const Tensor2s& o) const { return xx * o.xx + yy * o.yy + 2.0 * xy * o.xy; }

  double norm() const { return std::sqrt(ddot(*this)); }

  Tensor2s operator+(const Tensor2s& o) const { return {xx + o.xx, yy + o.yy, xy + o.xy}; }
  Tensor2s operator-(const Tensor2s& o) const { return {xx - o.xx, yy - o.yy, xy - o.xy}; }
  Tensor2s operator*(double s) const { return {xx * s, yy * s, xy * s}; }

  static Tensor2s identity() { return {1.0, 1.0, 0.0}; }

  /// Voigt vector with tensorial shear (xx, yy, xy).
  Eigen::Vector3d voigt() const { return {xx, yy, xy}; }
};

inline Tensor2s operator*(double s, const Tensor2s& t) { return t * s; }

/// Lame constants, N/mm^2. For plane stress use the effective first constant
/// from plane_stress_effective().
struct LameParams {
  double lambda1 = 0.0;
  double mu = 0.0;

  bool valid() const { return mu > 0.0 && lambda1 + 2.0 * mu / 3.0 > 0.0; }
};

/// Replaces lambda by its plane-stress effective value 2*lambda*mu/(lambda+2mu).
LameParams plane_stress_effective(const LameParams& lame);

enum class Branch { Plus, Minus };

/// Macaulay bracket <x>_pm = (x +- |x|) / 2.
double macaulay(double x, Branch branch);

/// Spectral decomposition of a symmetric 2x2 tensor and the tensile /
/// compressive projections built from its eigenpairs.
struct SpectralSplit {
  double eig1 = 0.0; ///< larger eigenvalue
  double eig2 = 0.0;
  std::array<double, 2> p1{1.0, 0.0}; ///< unit eigenvector of eig1
  std::array<double, 2> p2{0.0, 1.0};
  Tensor2s eps_plus;
  Tensor2s eps_minus;
};

SpectralSplit spectral_split(const Tensor2s& eps);

struct PsiSplit {
  double plus = 0.0;  ///< fracture-driving strain energy density
  double minus = 0.0; ///< residual strain energy density
};

PsiSplit psi_split(const Tensor2s& eps, const LameParams& lame);

struct StressSplit {
  Tensor2s plus;
  Tensor2s minus;
};

StressSplit stress_split(const Tensor2s& eps, const LameParams& lame);

/// Consistent tangents d(sigma_pm)/d(eps) as 3x3 matrices in engineering
/// Voigt ordering: (d_exx, d_eyy, d_gxy) -> (d_sxx, d_syy, d_sxy) with
/// gxy = 2 exy. At eigenvalue coalescence the larger eigenvalue is nudged
/// up by the degeneracy threshold (tangent only; stresses and energies are
/// continuous and stay unperturbed), which makes the zero-strain plus
/// tangent the full isotropic elasticity matrix.
struct TangentSplit {
  Eigen::Matrix3d plus;
  Eigen::Matrix3d minus;
  bool degenerate = false; ///< regularized branch was active
};

TangentSplit material_tangent(const Tensor2s& eps, const LameParams& lame);

/// Threshold below which |eig1 - eig2| counts as coalescent.
double degeneracy_threshold(double eig1, double eig2);

} // namespace pfrac
