#include "pfrac/tensor.hpp"

#include <cmath>

namespace pfrac {

LameParams plane_stress_effective(const LameParams& lame) {
  return {2.0 * lame.lambda1 * lame.mu / (lame.lambda1 + 2.0 * lame.mu), lame.mu};
}

double macaulay(double x, Branch branch) {
  return branch == Branch::Plus ? 0.5 * (x + std::abs(x)) : 0.5 * (x - std::abs(x));
}

double degeneracy_threshold(double eig1, double eig2) {
  return 1e-9 * std::max(1.0, std::abs(eig1) + std::abs(eig2));
}

SpectralSplit spectral_split(const Tensor2s& eps) {
  SpectralSplit s;
  const double m = 0.5 * (eps.xx + eps.yy);
  const double r = std::hypot(0.5 * (eps.xx - eps.yy), eps.xy);
  s.eig1 = m + r;
  s.eig2 = m - r;

  // eigenvector of eig1: (eig1 - yy, xy) or (xy, eig1 - xx); pick the
  // better-conditioned one. For a (near-)isotropic tensor any orthonormal
  // pair works; fall back to the coordinate axes.
  const double v1x = s.eig1 - eps.yy, v1y = eps.xy;
  const double w1x = eps.xy, w1y = s.eig1 - eps.xx;
  double px, py;
  if (v1x * v1x + v1y * v1y >= w1x * w1x + w1y * w1y) {
    px = v1x;
    py = v1y;
  } else {
    px = w1x;
    py = w1y;
  }
  const double n = std::hypot(px, py);
  if (n > 0.0) {
    s.p1 = {px / n, py / n};
  } else {
    s.p1 = {1.0, 0.0};
  }
  s.p2 = {-s.p1[1], s.p1[0]};

  const double ep1 = macaulay(s.eig1, Branch::Plus);
  const double ep2 = macaulay(s.eig2, Branch::Plus);
  const double em1 = macaulay(s.eig1, Branch::Minus);
  const double em2 = macaulay(s.eig2, Branch::Minus);

  auto proj = [](const std::array<double, 2>& p) -> Tensor2s {
    return {p[0] * p[0], p[1] * p[1], p[0] * p[1]};
  };
  const Tensor2s m1 = proj(s.p1);
  const Tensor2s m2 = proj(s.p2);
  s.eps_plus = ep1 * m1 + ep2 * m2;
  s.eps_minus = em1 * m1 + em2 * m2;
  return s;
}

PsiSplit psi_split(const Tensor2s& eps, const LameParams& lame) {
  const SpectralSplit s = spectral_split(eps);
  const double trp = macaulay(eps.trace(), Branch::Plus);
  const double trm = macaulay(eps.trace(), Branch::Minus);
  PsiSplit psi;
  psi.plus = 0.5 * lame.lambda1 * trp * trp + lame.mu * s.eps_plus.ddot(s.eps_plus);
  psi.minus = 0.5 * lame.lambda1 * trm * trm + lame.mu * s.eps_minus.ddot(s.eps_minus);
  return psi;
}

StressSplit stress_split(const Tensor2s& eps, const LameParams& lame) {
  const SpectralSplit s = spectral_split(eps);
  const double trp = macaulay(eps.trace(), Branch::Plus);
  const double trm = macaulay(eps.trace(), Branch::Minus);
  StressSplit sig;
  sig.plus = lame.lambda1 * trp * Tensor2s::identity() + 2.0 * lame.mu * s.eps_plus;
  sig.minus = lame.lambda1 * trm * Tensor2s::identity() + 2.0 * lame.mu * s.eps_minus;
  return sig;
}

TangentSplit material_tangent(const Tensor2s& eps, const LameParams& lame) {
  const SpectralSplit s = spectral_split(eps);
  double e1 = s.eig1, e2 = s.eig2;

  TangentSplit t;
  const double thr = degeneracy_threshold(e1, e2);
  if (e1 - e2 < thr) {
    // removable singularity of the eigenprojection derivative; the tie rule
    // assigns the coalescent pair to the plus branch
    e1 += thr;
    t.degenerate = true;
  }

  const double tr = eps.trace();
  auto heaviside = [](double x, Branch b) {
    return b == Branch::Plus ? (x >= 0.0 ? 1.0 : 0.0) : (x < 0.0 ? 1.0 : 0.0);
  };

  auto vec = [](double axx, double ayy, double axy) { return Eigen::Vector3d(axx, ayy, axy); };
  const Eigen::Vector3d m1 = vec(s.p1[0] * s.p1[0], s.p1[1] * s.p1[1], s.p1[0] * s.p1[1]);
  const Eigen::Vector3d m2 = vec(s.p2[0] * s.p2[0], s.p2[1] * s.p2[1], s.p2[0] * s.p2[1]);
  const Eigen::Vector3d sv = vec(s.p1[0] * s.p2[0], s.p1[1] * s.p2[1],
                                 0.5 * (s.p1[0] * s.p2[1] + s.p1[1] * s.p2[0]));
  const Eigen::Vector3d iv(1.0, 1.0, 0.0);

  for (Branch b : {Branch::Plus, Branch::Minus}) {
    const double beta = (macaulay(e1, b) - macaulay(e2, b)) / (e1 - e2);
    Eigen::Matrix3d proj = heaviside(e1, b) * (m1 * m1.transpose()) +
                           heaviside(e2, b) * (m2 * m2.transpose()) +
                           2.0 * beta * (sv * sv.transpose());
    Eigen::Matrix3d d =
        lame.lambda1 * heaviside(tr, b) * (iv * iv.transpose()) + 2.0 * lame.mu * proj;
    (b == Branch::Plus ? t.plus : t.minus) = d;
  }
  return t;
}

} // namespace pfrac
