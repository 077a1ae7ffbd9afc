#include "pfrac/tensor.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace pfrac;

namespace {

std::mt19937& rng() {
  static std::mt19937 gen(987654321);
  return gen;
}

Tensor2s random_strain(double scale = 1e-3) {
  std::normal_distribution<double> d(0.0, scale);
  return {d(rng()), d(rng()), d(rng())};
}

Tensor2s rotate(const Tensor2s& t, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  // R t R^T with R = [[c,-s],[s,c]]
  const double xx = c * c * t.xx - 2 * c * s * t.xy + s * s * t.yy;
  const double yy = s * s * t.xx + 2 * c * s * t.xy + c * c * t.yy;
  const double xy = c * s * (t.xx - t.yy) + (c * c - s * s) * t.xy;
  return {xx, yy, xy};
}

} // namespace

TEST_CASE("macaulay brackets") {
  CHECK(macaulay(3.0, Branch::Plus) == 3.0);
  CHECK(macaulay(-3.0, Branch::Plus) == 0.0);
  CHECK(macaulay(-3.0, Branch::Minus) == -3.0);
  CHECK(macaulay(3.0, Branch::Minus) == 0.0);
  CHECK(macaulay(0.0, Branch::Plus) == 0.0);
}

TEST_CASE("spectral split of diagonal and shear states") {
  SUBCASE("already diagonal") {
    const SpectralSplit s = spectral_split({2.0, -1.0, 0.0});
    CHECK(s.eps_plus.xx == doctest::Approx(2.0));
    CHECK(s.eps_plus.yy == doctest::Approx(0.0));
    CHECK(s.eps_minus.xx == doctest::Approx(0.0));
    CHECK(s.eps_minus.yy == doctest::Approx(-1.0));
  }
  SUBCASE("pure shear, eigenvalues +-1") {
    const SpectralSplit s = spectral_split({0.0, 0.0, 1.0});
    CHECK(s.eig1 == doctest::Approx(1.0));
    CHECK(s.eig2 == doctest::Approx(-1.0));
    CHECK(s.eps_plus.xx == doctest::Approx(0.5));
    CHECK(s.eps_plus.yy == doctest::Approx(0.5));
    CHECK(s.eps_plus.xy == doctest::Approx(0.5));
    CHECK(s.eps_minus.xx == doctest::Approx(-0.5));
    CHECK(s.eps_minus.yy == doctest::Approx(-0.5));
    CHECK(s.eps_minus.xy == doctest::Approx(0.5));
  }
  SUBCASE("zero tensor") {
    const SpectralSplit s = spectral_split({0.0, 0.0, 0.0});
    CHECK(s.eps_plus.norm() == 0.0);
    CHECK(s.eps_minus.norm() == 0.0);
  }
}

TEST_CASE("split consistency, orthogonality and reconstruction over random strains") {
  for (int i = 0; i < 10000; ++i) {
    const Tensor2s eps = random_strain();
    const SpectralSplit s = spectral_split(eps);
    const double scale = std::max(eps.norm(), 1e-30);

    const Tensor2s sum = s.eps_plus + s.eps_minus - eps;
    REQUIRE(sum.norm() / scale < 1e-12);

    REQUIRE(std::abs(s.eps_plus.ddot(s.eps_minus)) / (scale * scale) < 1e-12);

    auto proj = [](const std::array<double, 2>& p) -> Tensor2s {
      return {p[0] * p[0], p[1] * p[1], p[0] * p[1]};
    };
    const Tensor2s rec = s.eig1 * proj(s.p1) + s.eig2 * proj(s.p2) - eps;
    REQUIRE(rec.norm() / scale < 1e-12);

    REQUIRE(macaulay(s.eig1, Branch::Plus) >= 0.0);
    REQUIRE(macaulay(s.eig2, Branch::Minus) <= 0.0);
  }
}

TEST_CASE("frame behavior: rotation commutes with the split") {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  for (int i = 0; i < 1000; ++i) {
    const Tensor2s eps = random_strain();
    const double a = ang(rng());
    const SpectralSplit s0 = spectral_split(eps);
    const SpectralSplit s1 = spectral_split(rotate(eps, a));
    const Tensor2s d = rotate(s0.eps_plus, a) - s1.eps_plus;
    REQUIRE(d.norm() <= 1e-10 * std::max(1.0, eps.norm()));
  }
}

TEST_CASE("psi split hand values") {
  const LameParams lame{1.0, 1.0};
  SUBCASE("zero strain") {
    const PsiSplit p = psi_split({0, 0, 0}, lame);
    CHECK(p.plus == 0.0);
    CHECK(p.minus == 0.0);
  }
  SUBCASE("diag(2,-1)") {
    // tr = 1, eps+ = diag(2,0): psi+ = 0.5*1*1 + 1*4 = 4.5
    const PsiSplit p = psi_split({2.0, -1.0, 0.0}, lame);
    CHECK(p.plus == doctest::Approx(4.5));
    CHECK(p.minus == doctest::Approx(1.0));
  }
  SUBCASE("fully compressive drives nothing") {
    const PsiSplit p = psi_split({-0.3, -0.3, 0.0}, lame);
    CHECK(p.plus == 0.0);
    CHECK(p.minus > 0.0);
  }
  SUBCASE("both parts non-negative on random strains") {
    for (int i = 0; i < 1000; ++i) {
      const PsiSplit p = psi_split(random_strain(), lame);
      REQUIRE(p.plus >= 0.0);
      REQUIRE(p.minus >= 0.0);
    }
  }
}

TEST_CASE("stress split hand values and energy consistency") {
  const LameParams lame{1.0, 1.0};
  SUBCASE("diag(2,-1)") {
    const StressSplit s = stress_split({2.0, -1.0, 0.0}, lame);
    CHECK(s.plus.xx == doctest::Approx(5.0));
    CHECK(s.plus.yy == doctest::Approx(1.0));
    CHECK(s.minus.xx == doctest::Approx(0.0));
    CHECK(s.minus.yy == doctest::Approx(-2.0));
  }
  SUBCASE("sigma = dPsi/deps by central differences") {
    const LameParams hard{121.154e3, 80.769e3};
    int tested = 0;
    while (tested < 300) {
      const Tensor2s eps = random_strain();
      const SpectralSplit sp = spectral_split(eps);
      // exclude removable kinks of the Macaulay brackets
      if (std::abs(sp.eig1 - sp.eig2) < 1e-6 || std::abs(sp.eig1) < 1e-6 ||
          std::abs(sp.eig2) < 1e-6 || std::abs(eps.trace()) < 1e-6)
        continue;
      ++tested;
      const StressSplit sig = stress_split(eps, hard);
      const double h = 1e-8;
      for (Branch b : {Branch::Plus, Branch::Minus}) {
        auto psi_of = [&](const Tensor2s& e) {
          const PsiSplit p = psi_split(e, hard);
          return b == Branch::Plus ? p.plus : p.minus;
        };
        const Tensor2s& sg = b == Branch::Plus ? sig.plus : sig.minus;
        const double scale =
            std::max({std::abs(sg.xx), std::abs(sg.yy), std::abs(sg.xy), 1.0});
        Tensor2s ep = eps, em = eps;
        ep.xx += h;
        em.xx -= h;
        REQUIRE(std::abs((psi_of(ep) - psi_of(em)) / (2 * h) - sg.xx) / scale < 1e-6);
        ep = em = eps;
        ep.yy += h;
        em.yy -= h;
        REQUIRE(std::abs((psi_of(ep) - psi_of(em)) / (2 * h) - sg.yy) / scale < 1e-6);
        ep = em = eps;
        ep.xy += h;
        em.xy -= h;
        REQUIRE(std::abs(0.5 * (psi_of(ep) - psi_of(em)) / (2 * h) - sg.xy) / scale < 1e-6);
      }
    }
  }
  SUBCASE("sigma+ + sigma- is the isotropic elastic stress") {
    const LameParams hard{121.154e3, 80.769e3};
    for (int i = 0; i < 1000; ++i) {
      const Tensor2s eps = random_strain();
      const StressSplit s = stress_split(eps, hard);
      const double tr = eps.trace();
      const Tensor2s ref = hard.lambda1 * tr * Tensor2s::identity() + 2.0 * hard.mu * eps;
      const Tensor2s d = s.plus + s.minus - ref;
      REQUIRE(d.norm() <= 1e-10 * std::max(1.0, ref.norm()));
    }
  }
}

TEST_CASE("material tangent") {
  const LameParams lame{121.154e3, 80.769e3};
  SUBCASE("zero strain tie rule: plus branch gets the full elasticity tensor") {
    const TangentSplit t = material_tangent({0, 0, 0}, lame);
    Eigen::Matrix3d ref;
    ref << lame.lambda1 + 2 * lame.mu, lame.lambda1, 0, lame.lambda1,
        lame.lambda1 + 2 * lame.mu, 0, 0, 0, lame.mu;
    CHECK((t.plus - ref).cwiseAbs().maxCoeff() < 1e-9 * ref.maxCoeff());
    CHECK(t.minus.cwiseAbs().maxCoeff() == 0.0);
    CHECK(t.degenerate);
  }
  SUBCASE("near-coalescent eigenvalues stay finite and flag the regularized branch") {
    const TangentSplit t = material_tangent({1.0, 1.0 - 1e-14, 0.0}, lame);
    CHECK(t.degenerate);
    CHECK(t.plus.allFinite());
    CHECK(t.minus.allFinite());
  }
  SUBCASE("matches finite differences of the stress split away from coalescence") {
    int tested = 0;
    while (tested < 300) {
      const Tensor2s eps = random_strain();
      const SpectralSplit sp = spectral_split(eps);
      if (std::abs(sp.eig1 - sp.eig2) < 1e-6 || std::abs(sp.eig1) < 1e-6 ||
          std::abs(sp.eig2) < 1e-6 || std::abs(eps.trace()) < 1e-6)
        continue;
      ++tested;
      const TangentSplit t = material_tangent(eps, lame);
      const double h = 1e-9;
      for (Branch b : {Branch::Plus, Branch::Minus}) {
        const Eigen::Matrix3d& d = b == Branch::Plus ? t.plus : t.minus;
        auto sig_of = [&](const Tensor2s& e) {
          const StressSplit s = stress_split(e, lame);
          return (b == Branch::Plus ? s.plus : s.minus).voigt();
        };
        Eigen::Matrix3d fd;
        for (int k = 0; k < 3; ++k) {
          Tensor2s ep = eps, em = eps;
          (k == 0 ? ep.xx : k == 1 ? ep.yy : ep.xy) += h;
          (k == 0 ? em.xx : k == 1 ? em.yy : em.xy) -= h;
          fd.col(k) = (sig_of(ep) - sig_of(em)) / (2 * h);
        }
        fd.col(2) *= 0.5; // tensor perturbation of both shear entries vs d/d(gamma)
        REQUIRE((d - fd).cwiseAbs().maxCoeff() <
                1e-6 * std::max(1.0, d.cwiseAbs().maxCoeff()));
      }
    }
  }
}

TEST_CASE("plane stress effective Lame constant") {
  const LameParams l{100.0, 50.0};
  const LameParams ps = plane_stress_effective(l);
  CHECK(ps.mu == 50.0);
  CHECK(ps.lambda1 == doctest::Approx(2.0 * 100.0 * 50.0 / 200.0));
}
