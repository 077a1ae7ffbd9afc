#include "pfrac/material.hpp"

#include "pfrac/errors.hpp"

#include <cmath>

namespace pfrac {

SofteningConstants softening_constants(Softening s) {
  switch (s) {
  case Softening::Linear:
    return {2.0, -0.5, 0.0};
  case Softening::Exponential:
    return {2.5, std::pow(2.0, 5.0 / 3.0) - 3.0, 0.0};
  case Softening::Cornelissen:
    return {2.0, 1.3868, 0.6567};
  }
  throw Error("unknown softening law");
}

double compute_a1(const FractureParams& params) {
  if (!(params.length_scale > 0.0))
    throw Error("compute_a1: length_scale must be positive");
  if (!(params.ft > 0.0))
    throw Error("compute_a1: ft must be positive");
  return 4.0 * params.e0 * params.gc / (M_PI * params.length_scale * params.ft * params.ft);
}

PhaseFieldModel PhaseFieldModel::at1() {
  PhaseFieldModel m;
  m.kind = ModelKind::BrittleAT1;
  m.cw = 8.0 / 3.0;
  return m;
}

PhaseFieldModel PhaseFieldModel::at2() {
  PhaseFieldModel m;
  m.kind = ModelKind::BrittleAT2;
  m.cw = 2.0;
  return m;
}

PhaseFieldModel PhaseFieldModel::quasi_brittle(Softening s, const FractureParams& params) {
  PhaseFieldModel m;
  m.kind = ModelKind::QuasiBrittle;
  m.cw = M_PI;
  m.softening = s;
  const SofteningConstants c = softening_constants(s);
  m.p = c.p;
  m.a2 = c.a2;
  m.a3 = c.a3;
  m.a1 = compute_a1(params);
  return m;
}

namespace {

// Evaluation clamps phi to [0,1]; outside, the clamped function is constant,
// so its derivatives vanish (keeps residual and tangent consistent).
bool clamp01(double& phi) {
  if (std::isnan(phi))
    throw Error("degradation/local_fracture_energy: NaN phase-field value");
  if (phi < 0.0) {
    phi = 0.0;
    return true;
  }
  if (phi > 1.0) {
    phi = 1.0;
    return true;
  }
  return false;
}

} // namespace

ScalarDiff degradation(const PhaseFieldModel& model, double phi) {
  const bool clamped = clamp01(phi);
  if (model.kind != ModelKind::QuasiBrittle) {
    const double om = 1.0 - phi;
    return {om * om, -2.0 * om, clamped ? 0.0 : 2.0, clamped};
  }
  // g = f / (f + q): quotient rule, exact derivatives. Needed because the
  // rational function is stiff near phi -> 1.
  const double p = model.p, a1 = model.a1, a2 = model.a2, a3 = model.a3;
  const double om = 1.0 - phi;
  const double f = std::pow(om, p);
  const double f1 = -p * std::pow(om, p - 1.0);
  const double f2 = p * (p - 1.0) * std::pow(om, p - 2.0);
  const double q = a1 * phi + a1 * a2 * phi * phi + a1 * a2 * a3 * phi * phi * phi;
  const double q1 = a1 + 2.0 * a1 * a2 * phi + 3.0 * a1 * a2 * a3 * phi * phi;
  const double q2 = 2.0 * a1 * a2 + 6.0 * a1 * a2 * a3 * phi;
  const double d = f + q;
  const double d1 = f1 + q1;
  const double d2 = f2 + q2;
  const double g = f / d;
  const double g1 = (f1 * d - f * d1) / (d * d);
  const double g2 = (f2 * d - f * d2) / (d * d) - 2.0 * d1 * (f1 * d - f * d1) / (d * d * d);
  return {g, g1, clamped ? 0.0 : g2, clamped};
}

ScalarDiff local_fracture_energy(const PhaseFieldModel& model, double phi) {
  const bool clamped = clamp01(phi);
  ScalarDiff w;
  switch (model.kind) {
  case ModelKind::BrittleAT1:
    w = {phi, 1.0, 0.0, clamped};
    break;
  case ModelKind::BrittleAT2:
    w = {phi * phi, 2.0 * phi, clamped ? 0.0 : 2.0, clamped};
    break;
  case ModelKind::QuasiBrittle:
    w = {2.0 * phi - phi * phi, 2.0 - 2.0 * phi, clamped ? 0.0 : -2.0, clamped};
    break;
  default:
    throw Error("unknown model kind");
  }
  return w;
}

LameParams lame_from_engineering(double e0, double nu, Kinematics kin) {
  if (!(nu > -1.0 && nu < 0.5))
    throw Error("lame_from_engineering: nu must lie in (-1, 0.5)");
  const double mu = e0 / (2.0 * (1.0 + nu));
  if (kin == Kinematics::PlaneStress)
    return {e0 * nu / ((1.0 + nu) * (1.0 - nu)), mu};
  return {e0 * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), mu};
}

std::string to_string(ModelKind k) {
  switch (k) {
  case ModelKind::BrittleAT1:
    return "at1";
  case ModelKind::BrittleAT2:
    return "at2";
  case ModelKind::QuasiBrittle:
    return "quasi_brittle";
  }
  return "?";
}

std::string to_string(Softening s) {
  switch (s) {
  case Softening::Linear:
    return "linear";
  case Softening::Exponential:
    return "exponential";
  case Softening::Cornelissen:
    return "cornelissen";
  }
  return "?";
}

std::string to_string(Kinematics k) {
  return k == Kinematics::PlaneStrain ? "plane_strain" : "plane_stress";
}

} // namespace pfrac
