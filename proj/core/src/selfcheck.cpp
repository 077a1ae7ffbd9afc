#include "pfrac/selfcheck.hpp"

#include "pfrac/catalog.hpp"
#include "pfrac/material.hpp"
#include "pfrac/mesh.hpp"
#include "pfrac/solver.hpp"
#include "pfrac/tensor.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <random>

namespace pfrac {

namespace {

struct Checker {
  std::ostream& os;
  int failures = 0;

  void check(const std::string& name, bool ok, const std::string& detail = "") {
    os << (ok ? "[PASS] " : "[FAIL] ") << name;
    if (!ok && !detail.empty())
      os << " (" << detail << ")";
    os << "\n";
    if (!ok)
      ++failures;
  }
};

} // namespace

int run_self_check(std::ostream& os) {
  Checker c{os};
  std::mt19937 rng(20240515);
  std::normal_distribution<double> dist(0.0, 1e-3);

  // macaulay bracket
  c.check("macaulay brackets",
          macaulay(3.0, Branch::Plus) == 3.0 && macaulay(-3.0, Branch::Plus) == 0.0 &&
              macaulay(-3.0, Branch::Minus) == -3.0 && macaulay(3.0, Branch::Minus) == 0.0);

  // split identities over random strains
  {
    double worst_sum = 0.0, worst_orth = 0.0, worst_rec = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const Tensor2s eps{dist(rng), dist(rng), dist(rng)};
      const SpectralSplit s = spectral_split(eps);
      const Tensor2s sum = s.eps_plus + s.eps_minus - eps;
      const double scale = std::max(eps.norm(), 1e-30);
      worst_sum = std::max(worst_sum, sum.norm() / scale);
      worst_orth = std::max(worst_orth,
                            std::abs(s.eps_plus.ddot(s.eps_minus)) / (scale * scale));
      auto proj = [&](const std::array<double, 2>& p) -> Tensor2s {
        return {p[0] * p[0], p[1] * p[1], p[0] * p[1]};
      };
      const Tensor2s rec = s.eig1 * proj(s.p1) + s.eig2 * proj(s.p2) - eps;
      worst_rec = std::max(worst_rec, rec.norm() / scale);
    }
    c.check("spectral split: eps+ + eps- = eps (1e-12)", worst_sum < 1e-12);
    c.check("spectral split: eps+ : eps- = 0 (1e-12)", worst_orth < 1e-12);
    c.check("spectral split: eigen reconstruction (1e-12)", worst_rec < 1e-12);
  }

  // stress from finite differences of the energy
  {
    const LameParams lame{121.154e3, 80.769e3};
    double worst = 0.0;
    int tested = 0;
    while (tested < 200) {
      const Tensor2s eps{dist(rng), dist(rng), dist(rng)};
      const SpectralSplit s = spectral_split(eps);
      if (std::abs(s.eig1 - s.eig2) < 1e-6 || std::abs(s.eig1) < 1e-6 ||
          std::abs(s.eig2) < 1e-6 || std::abs(eps.trace()) < 1e-6)
        continue;
      ++tested;
      const StressSplit sig = stress_split(eps, lame);
      const double h = 1e-8;
      auto fd = [&](auto get, int comp, Branch b) {
        Tensor2s ep = eps, em = eps;
        (comp == 0 ? ep.xx : comp == 1 ? ep.yy : ep.xy) += h;
        (comp == 0 ? em.xx : comp == 1 ? em.yy : em.xy) -= h;
        const double dpsi =
            (get(psi_split(ep, lame), b) - get(psi_split(em, lame), b)) / (2.0 * h);
        return comp == 2 ? 0.5 * dpsi : dpsi;
      };
      auto get = [](const PsiSplit& p, Branch b) { return b == Branch::Plus ? p.plus : p.minus; };
      for (Branch b : {Branch::Plus, Branch::Minus}) {
        const Tensor2s& sg = b == Branch::Plus ? sig.plus : sig.minus;
        const double scale = std::max({std::abs(sg.xx), std::abs(sg.yy), std::abs(sg.xy), 1.0});
        worst = std::max(worst, std::abs(fd(get, 0, b) - sg.xx) / scale);
        worst = std::max(worst, std::abs(fd(get, 1, b) - sg.yy) / scale);
        worst = std::max(worst, std::abs(fd(get, 2, b) - sg.xy) / scale);
      }
    }
    c.check("sigma = dPsi/deps by finite differences (1e-6)", worst < 1e-6);
  }

  // degradation functions
  {
    const auto at2 = degradation(PhaseFieldModel::at2(), 0.5);
    c.check("AT2 g(0.5) = 0.25, g' = -1",
            std::abs(at2.value - 0.25) < 1e-15 && std::abs(at2.d1 + 1.0) < 1e-15);
    PhaseFieldModel qb;
    qb.kind = ModelKind::QuasiBrittle;
    qb.cw = M_PI;
    qb.p = 2.0;
    qb.a1 = 199.83;
    qb.a2 = 1.3868;
    qb.a3 = 0.6567;
    const auto g = degradation(qb, 0.1);
    c.check("quasi-brittle g(0.1) ~ 0.03411", std::abs(g.value - 0.03411) < 5e-5);
  }

  // quasi-brittle parameter pipeline
  {
    FractureParams tpb{0.113, 2.5, 2.0e4, 2.4, 0.2};
    FractureParams lp{0.130, 5.0, 2.0e4, 2.5, 0.18};
    c.check("a1(TPB) ~ 199.83", std::abs(compute_a1(tpb) - 199.83) < 0.05);
    c.check("a1(L-panel) ~ 105.93", std::abs(compute_a1(lp) - 105.93) < 0.05);
    const auto lin = softening_constants(Softening::Linear);
    const auto cor = softening_constants(Softening::Cornelissen);
    c.check("softening constants",
            lin.p == 2.0 && lin.a2 == -0.5 && lin.a3 == 0.0 && cor.a2 == 1.3868 &&
                cor.a3 == 0.6567);
  }

  // convergence norm hand case
  {
    std::vector<Eigen::VectorXd> upd(1), sol(1);
    upd[0] = Eigen::VectorXd::Constant(1, 1e-5);
    sol[0] = Eigen::VectorXd::Constant(1, 0.5);
    const double err = error_norm(upd, sol, {1.0});
    c.check("error norm single-dof case = 1e-5", std::abs(err - 1e-5) < 1e-20);
  }

  // mesh round trip
  {
    Mesh m = generate_rect_mesh(1.0, 1.0, 0.25, {});
    m.node_sets["corner"] = {0};
    const auto tmp = std::filesystem::temp_directory_path() / "pfrac_selfcheck_mesh.txt";
    save_mesh(m, tmp.string());
    const Mesh m2 = load_mesh(tmp.string());
    bool same = m.num_nodes() == m2.num_nodes() && m.num_cells() == m2.num_cells() &&
                m2.node_sets.count("corner") == 1;
    std::filesystem::remove(tmp);
    c.check("mesh save/load round trip", same);
  }

  os << (c.failures == 0 ? "all checks passed\n" : "SOME CHECKS FAILED\n");
  return c.failures;
}

} // namespace pfrac
