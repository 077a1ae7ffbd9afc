#include "pfrac/errors.hpp"
#include "pfrac/material.hpp"

#include <doctest.h>

#include <cmath>

using namespace pfrac;

namespace {

PhaseFieldModel tpb_model() {
  FractureParams p{0.113, 2.5, 2.0e4, 2.4, 0.2};
  return PhaseFieldModel::quasi_brittle(Softening::Cornelissen, p);
}

} // namespace

TEST_CASE("degradation hand values") {
  const PhaseFieldModel at2 = PhaseFieldModel::at2();
  SUBCASE("intact material") {
    const ScalarDiff g = degradation(at2, 0.0);
    CHECK(g.value == 1.0);
    CHECK(g.d1 == -2.0);
  }
  SUBCASE("half broken") {
    const ScalarDiff g = degradation(at2, 0.5);
    CHECK(g.value == doctest::Approx(0.25));
    CHECK(g.d1 == doctest::Approx(-1.0));
  }
  SUBCASE("quasi-brittle Cornelissen at phi = 0.1") {
    // independent scalar evaluation of the rational function with the TPB a1
    PhaseFieldModel qb;
    qb.kind = ModelKind::QuasiBrittle;
    qb.cw = M_PI;
    qb.p = 2.0;
    qb.a1 = 199.83;
    qb.a2 = 1.3868;
    qb.a3 = 0.6567;
    const double f = 0.9 * 0.9;
    const double q = 199.83 * 0.1 + 199.83 * 1.3868 * 0.01 + 199.83 * 1.3868 * 0.6567 * 1e-3;
    const ScalarDiff g = degradation(qb, 0.1);
    CHECK(g.value == doctest::Approx(f / (f + q)).epsilon(1e-12));
    CHECK(g.value == doctest::Approx(0.03411).epsilon(2e-4));
  }
  SUBCASE("NaN rejected") {
    CHECK_THROWS_AS(degradation(at2, std::nan("")), Error);
  }
}

TEST_CASE("local fracture energy table rows") {
  CHECK(local_fracture_energy(PhaseFieldModel::at1(), 0.3).value == doctest::Approx(0.3));
  CHECK(local_fracture_energy(PhaseFieldModel::at1(), 0.3).d1 == 1.0);
  CHECK(local_fracture_energy(PhaseFieldModel::at2(), 0.5).value == doctest::Approx(0.25));
  CHECK(local_fracture_energy(PhaseFieldModel::at2(), 0.5).d1 == doctest::Approx(1.0));
  const ScalarDiff w = local_fracture_energy(tpb_model(), 1.0);
  CHECK(w.value == doctest::Approx(1.0));
  CHECK(w.d1 == doctest::Approx(0.0));
}

TEST_CASE("normalization constants and boundary values") {
  CHECK(PhaseFieldModel::at1().cw == doctest::Approx(8.0 / 3.0));
  CHECK(PhaseFieldModel::at2().cw == 2.0);
  CHECK(tpb_model().cw == doctest::Approx(M_PI));
  for (const PhaseFieldModel& m : {PhaseFieldModel::at1(), PhaseFieldModel::at2(), tpb_model()}) {
    CHECK(degradation(m, 0.0).value == 1.0);
    CHECK(std::abs(degradation(m, 1.0).value) < 1e-14);
    CHECK(local_fracture_energy(m, 0.0).value == 0.0);
    CHECK(local_fracture_energy(m, 1.0).value == doctest::Approx(1.0));
  }
}

TEST_CASE("g monotone non-increasing, derivatives match finite differences") {
  FractureParams lp{0.130, 5.0, 2.0e4, 2.5, 0.18};
  const PhaseFieldModel models[] = {
      PhaseFieldModel::at1(), PhaseFieldModel::at2(), tpb_model(),
      PhaseFieldModel::quasi_brittle(Softening::Linear, lp),
      PhaseFieldModel::quasi_brittle(Softening::Cornelissen, lp)};
  for (const auto& m : models) {
    double prev = 2.0;
    for (int i = 0; i <= 1000; ++i) {
      const double phi = i / 1000.0;
      const double g = degradation(m, phi).value;
      REQUIRE(g <= prev + 1e-14);
      prev = g;
    }
    // central differences on interior grid points
    const double h = 1e-6;
    for (int i = 1; i < 100; ++i) {
      const double phi = i / 100.0 * 0.98 + 0.005;
      const ScalarDiff g = degradation(m, phi);
      const double fd1 =
          (degradation(m, phi + h).value - degradation(m, phi - h).value) / (2 * h);
      REQUIRE(std::abs(g.d1 - fd1) <= 1e-7 * std::max(1.0, std::abs(g.d1)));
      const double fd2 = (degradation(m, phi + h).d1 - degradation(m, phi - h).d1) / (2 * h);
      REQUIRE(std::abs(g.d2 - fd2) <= 1e-5 * std::max(1.0, std::abs(g.d2)));
      const ScalarDiff w = local_fracture_energy(m, phi);
      const double fw1 = (local_fracture_energy(m, phi + h).value -
                          local_fracture_energy(m, phi - h).value) /
                         (2 * h);
      REQUIRE(std::abs(w.d1 - fw1) <= 1e-7 * std::max(1.0, std::abs(w.d1)));
    }
  }
}

TEST_CASE("a1 from the quasi-brittle parameter pipeline") {
  FractureParams tpb{0.113, 2.5, 2.0e4, 2.4, 0.2};
  FractureParams lp{0.130, 5.0, 2.0e4, 2.5, 0.18};
  CHECK(compute_a1(tpb) == doctest::Approx(199.83).epsilon(2.5e-4));
  CHECK(compute_a1(lp) == doctest::Approx(105.93).epsilon(4.7e-4));

  SUBCASE("positive homogeneity in Gc") {
    FractureParams scaled = tpb;
    scaled.gc *= 2.0;
    CHECK(compute_a1(scaled) == doctest::Approx(2.0 * compute_a1(tpb)));
  }
  SUBCASE("invalid parameters rejected") {
    FractureParams bad = tpb;
    bad.length_scale = 0.0;
    CHECK_THROWS_AS(compute_a1(bad), Error);
    bad = tpb;
    bad.ft = -1.0;
    CHECK_THROWS_AS(compute_a1(bad), Error);
  }
}

TEST_CASE("softening constants") {
  const SofteningConstants lin = softening_constants(Softening::Linear);
  CHECK(lin.p == 2.0);
  CHECK(lin.a2 == -0.5);
  CHECK(lin.a3 == 0.0);
  const SofteningConstants exp = softening_constants(Softening::Exponential);
  CHECK(exp.p == 2.5);
  CHECK(exp.a2 == doctest::Approx(std::pow(2.0, 5.0 / 3.0) - 3.0));
  CHECK(exp.a3 == 0.0);
  const SofteningConstants cor = softening_constants(Softening::Cornelissen);
  CHECK(cor.p == 2.0);
  CHECK(cor.a2 == 1.3868);
  CHECK(cor.a3 == 0.6567);
}

TEST_CASE("lame constants from engineering parameters") {
  SUBCASE("plane strain") {
    const LameParams l = lame_from_engineering(2.0e4, 0.2);
    CHECK(l.lambda1 == doctest::Approx(5555.5555555555556));
    CHECK(l.mu == doctest::Approx(8333.3333333333333));
    // E = 2e4, nu = 0.18: lambda = E nu / ((1+nu)(1-2nu)) = 3600 / 0.7552
    const LameParams l2 = lame_from_engineering(2.0e4, 0.18);
    CHECK(l2.lambda1 == doctest::Approx(4766.9491525423728));
    CHECK(l2.mu == doctest::Approx(8474.5762711864407));
  }
  SUBCASE("nu = 0") {
    const LameParams l = lame_from_engineering(2.0e4, 0.0);
    CHECK(l.lambda1 == 0.0);
    CHECK(l.mu == doctest::Approx(1.0e4));
  }
  SUBCASE("plane stress variant") {
    const LameParams l = lame_from_engineering(2.0e4, 0.2, Kinematics::PlaneStress);
    CHECK(l.lambda1 == doctest::Approx(2.0e4 * 0.2 / (1.2 * 0.8)));
  }
  SUBCASE("incompressible limit rejected") {
    CHECK_THROWS_AS(lame_from_engineering(1.0, 0.5), Error);
  }
}
