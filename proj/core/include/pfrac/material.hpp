#pragma once

#include "pfrac/tensor.hpp"

#include <string>

namespace pfrac {

enum class ModelKind { BrittleAT1, BrittleAT2, QuasiBrittle };
enum class Softening { Linear, Exponential, Cornelissen };
enum class Kinematics { PlaneStrain, PlaneStress };

/// Cohesive softening constants (p, a2, a3). The exponential a2 follows the
/// Wu (2017) convention for 2^{5/3} - 3.
struct SofteningConstants {
  double p;
  double a2;
  double a3;
};

SofteningConstants softening_constants(Softening s);

/// Fracture parameters in N, mm units. e0/ft/nu are used by the quasi-brittle
/// model only.
struct FractureParams {
  double gc = 0.0;           ///< Griffith fracture energy, N/mm
  double length_scale = 0.0; ///< regularization length l, mm
  double e0 = 0.0;           ///< Young's modulus, N/mm^2 (quasi-brittle)
  double ft = 0.0;           ///< tensile strength, N/mm^2 (quasi-brittle)
  double nu = 0.0;
};

/// a1 = 4 E0 Gc / (pi l ft^2).
double compute_a1(const FractureParams& params);

/// Degradation function g, local fracture energy w, and the normalization
/// constant c_w for one phase-field fracture model.
struct PhaseFieldModel {
  ModelKind kind = ModelKind::BrittleAT2;
  double cw = 2.0;
  Softening softening = Softening::Cornelissen; // quasi-brittle only
  double p = 2.0, a1 = 0.0, a2 = 0.0, a3 = 0.0; // quasi-brittle only

  static PhaseFieldModel at1();
  static PhaseFieldModel at2();
  static PhaseFieldModel quasi_brittle(Softening s, const FractureParams& params);
};

/// Value and first two derivatives of a scalar model function, evaluated at
/// the clamped argument. When the input fell outside [0,1], d1 saturates at
/// the boundary value (the evaluated function stays continuous) and d2 is
/// zero -- the consistent linearization of the saturated evaluation.
struct ScalarDiff {
  double value;
  double d1;
  double d2;
  bool clamped = false;
};

/// g(phi) with analytic derivatives. phi is clamped to [0,1]; NaN is rejected.
ScalarDiff degradation(const PhaseFieldModel& model, double phi);

/// w(phi) with analytic derivatives. Same clamping and NaN policy as g.
ScalarDiff local_fracture_energy(const PhaseFieldModel& model, double phi);

/// Lame constants from (E, nu). Plane strain by default; plane stress uses
/// the effective first constant E nu / (1 - nu^2).
LameParams lame_from_engineering(double e0, double nu,
                                 Kinematics kin = Kinematics::PlaneStrain);

std::string to_string(ModelKind k);
std::string to_string(Softening s);
std::string to_string(Kinematics k);

} // namespace pfrac
