#include "pfrac/config.hpp"

#include "pfrac/errors.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pfrac {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
    ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
    --b;
  return s.substr(a, b - a);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

[[noreturn]] void fail(const std::string& src, int line, const std::string& msg) {
  std::ostringstream os;
  os << src << ":" << line << ": " << msg;
  throw ParseError(os.str());
}

double parse_num(const std::string& src, int line, const std::string& key,
                 const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size())
      fail(src, line, "invalid number '" + v + "' for " + key);
    return x;
  } catch (const ParseError&) {
    throw;
  } catch (...) {
    fail(src, line, "invalid number '" + v + "' for " + key);
  }
}

int parse_int(const std::string& src, int line, const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size())
      fail(src, line, "invalid integer '" + v + "' for " + key);
    return x;
  } catch (const ParseError&) {
    throw;
  } catch (...) {
    fail(src, line, "invalid integer '" + v + "' for " + key);
  }
}

} // namespace

StepSchedule parse_schedule(const std::string& text) {
  StepSchedule s;
  std::istringstream is(text);
  std::string phase;
  while (std::getline(is, phase, ',')) {
    phase = trim(phase);
    const size_t x = phase.find('x');
    if (x == std::string::npos)
      throw ParseError("schedule phase '" + phase + "' is not COUNTxDU");
    StepPhase p;
    p.count = std::stoi(phase.substr(0, x));
    p.du = std::stod(phase.substr(x + 1));
    if (p.count <= 0)
      throw ParseError("schedule phase count must be positive");
    if (p.du == 0.0)
      throw ParseError("schedule phase increment must be nonzero");
    s.phases.push_back(p);
  }
  if (s.phases.empty())
    throw ParseError("empty schedule");
  return s;
}

std::string format_schedule(const StepSchedule& schedule) {
  std::ostringstream os;
  for (size_t i = 0; i < schedule.phases.size(); ++i) {
    if (i)
      os << ",";
    os << schedule.phases[i].count << "x" << fmt(schedule.phases[i].du);
  }
  return os.str();
}

RunConfig parse_config_text(const std::string& text, const std::string& src) {
  RunConfig c;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    if (line.front() == '[' && line.back() == ']')
      continue; // section headers are cosmetic
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(src, line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      fail(src, line_no, "expected key = value");

    auto num = [&] { return parse_num(src, line_no, key, val); };
    auto integer = [&] { return parse_int(src, line_no, key, val); };

    if (key == "benchmark") {
      bool known = false;
      for (const auto& n : benchmark_names())
        known = known || n == val;
      if (!known)
        fail(src, line_no, "unknown benchmark '" + val + "'");
      c.benchmark = val;
    } else if (key == "mesh") {
      c.mesh_path = val;
    } else if (key == "formulation") {
      if (val == "lmm")
        c.solver.formulation = Formulation::LMM;
      else if (val == "penalty")
        c.solver.formulation = Formulation::Penalty;
      else
        fail(src, line_no, "formulation must be lmm or penalty");
    } else if (key == "out") {
      c.out_dir = val;
    } else if (key == "snapshot_every") {
      c.snapshot_every = integer();
    } else if (key == "resume") {
      c.resume = val;
    } else if (key == "overlay") {
      std::istringstream os(val);
      std::string p;
      while (std::getline(os, p, ','))
        if (!trim(p).empty())
          c.overlay.push_back(trim(p));
    } else if (key == "tol") {
      c.solver.tol = num();
      if (c.solver.tol <= 0.0)
        fail(src, line_no, "tol must be positive");
    } else if (key == "max_iters") {
      c.solver.max_iters = integer();
    } else if (key == "max_steps") {
      c.solver.max_steps = integer();
    } else if (key == "max_substeps") {
      c.solver.max_substeps = integer();
    } else if (key == "eta") {
      c.solver.eta = num();
      if (c.solver.eta <= 0.0)
        fail(src, line_no, "eta must be positive");
    } else if (key == "theta_floor") {
      c.solver.theta_floor = num();
    } else if (key == "dual_retry_factor") {
      c.solver.dual_retry_factor = num();
    } else if (key == "scale_u") {
      c.solver.scaling.u = num();
    } else if (key == "scale_phi") {
      c.solver.scaling.phi = num();
    } else if (key == "scale_theta") {
      c.solver.scaling.theta = num();
    } else if (key == "scale_lambda") {
      c.solver.scaling.lambda = num();
    } else if (key == "end_displacement") {
      c.solver.end_displacement = num();
      c.overrides.end_displacement = c.solver.end_displacement;
    } else if (key == "model") {
      if (val == "at1")
        c.overrides.model = ModelKind::BrittleAT1;
      else if (val == "at2")
        c.overrides.model = ModelKind::BrittleAT2;
      else if (val == "quasi_brittle")
        c.overrides.model = ModelKind::QuasiBrittle;
      else
        fail(src, line_no, "model must be at1, at2 or quasi_brittle");
    } else if (key == "softening") {
      if (val == "linear")
        c.overrides.softening = Softening::Linear;
      else if (val == "exponential")
        c.overrides.softening = Softening::Exponential;
      else if (val == "cornelissen")
        c.overrides.softening = Softening::Cornelissen;
      else
        fail(src, line_no, "softening must be linear, exponential or cornelissen");
    } else if (key == "kinematics") {
      if (val == "plane_strain")
        c.overrides.kinematics = Kinematics::PlaneStrain;
      else if (val == "plane_stress")
        c.overrides.kinematics = Kinematics::PlaneStress;
      else
        fail(src, line_no, "kinematics must be plane_strain or plane_stress");
    } else if (key == "gc") {
      c.overrides.gc = num();
      if (*c.overrides.gc <= 0.0)
        fail(src, line_no, "gc must be positive");
    } else if (key == "length_scale") {
      c.overrides.length_scale = num();
      if (*c.overrides.length_scale <= 0.0)
        fail(src, line_no, "length_scale must be positive");
    } else if (key == "e0") {
      c.overrides.e0 = num();
    } else if (key == "nu") {
      c.overrides.nu = num();
    } else if (key == "ft") {
      c.overrides.ft = num();
      if (*c.overrides.ft <= 0.0)
        fail(src, line_no, "ft must be positive");
    } else if (key == "lambda") {
      c.overrides.lambda1 = num();
    } else if (key == "mu") {
      c.overrides.mu = num();
    } else if (key == "band_h") {
      c.overrides.band_h = num();
      if (*c.overrides.band_h <= 0.0)
        fail(src, line_no, "band_h must be positive");
    } else if (key == "band_scale") {
      c.overrides.band_scale = num();
    } else if (key == "coarse_mult") {
      c.overrides.coarse_mult = num();
    } else if (key == "schedule") {
      try {
        c.overrides.schedule = parse_schedule(val);
      } catch (const ParseError& e) {
        fail(src, line_no, e.what());
      }
    } else {
      fail(src, line_no, "unknown key '" + key + "'");
    }
  }
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw IoError("cannot open config '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return parse_config_text(os.str(), path);
}

std::string write_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[run]\n";
  os << "benchmark = " << c.benchmark << "\n";
  if (!c.mesh_path.empty())
    os << "mesh = " << c.mesh_path << "\n";
  os << "formulation = " << to_string(c.solver.formulation) << "\n";
  os << "out = " << c.out_dir << "\n";
  os << "snapshot_every = " << c.snapshot_every << "\n";
  if (!c.resume.empty())
    os << "resume = " << c.resume << "\n";
  if (!c.overlay.empty()) {
    os << "overlay = ";
    for (size_t i = 0; i < c.overlay.size(); ++i)
      os << (i ? "," : "") << c.overlay[i];
    os << "\n";
  }
  os << "\n[solver]\n";
  os << "tol = " << fmt(c.solver.tol) << "\n";
  os << "max_iters = " << c.solver.max_iters << "\n";
  os << "max_steps = " << c.solver.max_steps << "\n";
  os << "max_substeps = " << c.solver.max_substeps << "\n";
  os << "eta = " << fmt(c.solver.eta) << "\n";
  os << "theta_floor = " << fmt(c.solver.theta_floor) << "\n";
  os << "dual_retry_factor = " << fmt(c.solver.dual_retry_factor) << "\n";
  os << "scale_u = " << fmt(c.solver.scaling.u) << "\n";
  os << "scale_phi = " << fmt(c.solver.scaling.phi) << "\n";
  os << "scale_theta = " << fmt(c.solver.scaling.theta) << "\n";
  if (c.solver.scaling.lambda > 0.0)
    os << "scale_lambda = " << fmt(c.solver.scaling.lambda) << "\n";

  os << "\n[model]\n";
  const auto& ov = c.overrides;
  if (ov.model)
    os << "model = " << to_string(*ov.model) << "\n";
  if (ov.softening)
    os << "softening = " << to_string(*ov.softening) << "\n";
  if (ov.kinematics)
    os << "kinematics = " << to_string(*ov.kinematics) << "\n";
  if (ov.gc)
    os << "gc = " << fmt(*ov.gc) << "\n";
  if (ov.length_scale)
    os << "length_scale = " << fmt(*ov.length_scale) << "\n";
  if (ov.e0)
    os << "e0 = " << fmt(*ov.e0) << "\n";
  if (ov.nu)
    os << "nu = " << fmt(*ov.nu) << "\n";
  if (ov.ft)
    os << "ft = " << fmt(*ov.ft) << "\n";
  if (ov.lambda1)
    os << "lambda = " << fmt(*ov.lambda1) << "\n";
  if (ov.mu)
    os << "mu = " << fmt(*ov.mu) << "\n";

  os << "\n[mesh]\n";
  if (ov.band_h)
    os << "band_h = " << fmt(*ov.band_h) << "\n";
  os << "band_scale = " << fmt(ov.band_scale) << "\n";
  os << "coarse_mult = " << fmt(ov.coarse_mult) << "\n";
  if (ov.schedule)
    os << "schedule = " << format_schedule(*ov.schedule) << "\n";
  if (c.solver.end_displacement > 0.0)
    os << "end_displacement = " << fmt(c.solver.end_displacement) << "\n";
  return os.str();
}

} // namespace pfrac
