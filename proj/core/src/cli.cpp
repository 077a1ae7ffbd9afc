#include "pfrac/cli.hpp"

#include "pfrac/catalog.hpp"
#include "pfrac/config.hpp"
#include "pfrac/errors.hpp"
#include "pfrac/output.hpp"
#include "pfrac/selfcheck.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace pfrac {

namespace {

namespace fs = std::filesystem;

int do_run(const std::string& config_path, const std::vector<std::string>& overrides) {
  RunConfig cfg = parse_config(config_path);

  // command-line flags win over the config file
  for (size_t i = 0; i < overrides.size(); i += 2) {
    const std::string line = overrides[i] + " = " + overrides[i + 1];
    const RunConfig patch = parse_config_text(line, "<cli>");
    if (overrides[i] == "formulation")
      cfg.solver.formulation = patch.solver.formulation;
    else if (overrides[i] == "eta")
      cfg.solver.eta = patch.solver.eta;
    else if (overrides[i] == "tol")
      cfg.solver.tol = patch.solver.tol;
    else if (overrides[i] == "out")
      cfg.out_dir = patch.out_dir;
    else if (overrides[i] == "snapshot_every")
      cfg.snapshot_every = patch.snapshot_every;
    else if (overrides[i] == "max_steps")
      cfg.solver.max_steps = patch.solver.max_steps;
    else if (overrides[i] == "resume")
      cfg.resume = patch.resume;
  }

  BenchmarkProblem bench = build_benchmark(cfg.benchmark, cfg.overrides);
  if (!cfg.mesh_path.empty())
    bench.mesh = std::make_shared<Mesh>(load_mesh(cfg.mesh_path));

  Simulation sim = make_simulation(bench, cfg.solver);
  if (!cfg.resume.empty())
    sim.restore_checkpoint(cfg.resume);

  fs::create_directories(cfg.out_dir);
  for (const auto& overlay : cfg.overlay) {
    if (!fs::exists(overlay))
      throw IoError("overlay file '" + overlay + "' does not exist");
    fs::copy_file(overlay, fs::path(cfg.out_dir) / fs::path(overlay).filename(),
                  fs::copy_options::overwrite_existing);
  }

  RunHooks hooks;
  const DofMap& dofs = sim.problem().dofs;
  if (cfg.snapshot_every > 0) {
    hooks.on_step = [&](const SystemState& st, const StepRecord& rec) {
      if (rec.step % cfg.snapshot_every == 0) {
        char name[64];
        std::snprintf(name, sizeof(name), "fields_step%06d.vtk", rec.step);
        write_fields(st, dofs, *sim.problem().mesh, (fs::path(cfg.out_dir) / name).string());
      }
    };
  }

  const SimulationResult result = sim.run(hooks);

  write_ld_csv(result, (fs::path(cfg.out_dir) / "ld.csv").string());
  write_fields(sim.state(), dofs, *sim.problem().mesh,
               (fs::path(cfg.out_dir) / "fields_final.vtk").string());
  write_metadata(cfg, sim.problem(), bench, result,
                 (fs::path(cfg.out_dir) / "metadata.txt").string());
  sim.save_checkpoint((fs::path(cfg.out_dir) / "checkpoint.dat").string());

  if (!result.completed) {
    std::cerr << "pfrac: run aborted: " << result.abort_reason << "\n";
    std::cerr << "pfrac: partial results persisted in " << cfg.out_dir << "\n";
    return 2;
  }
  std::cout << "pfrac: " << result.records.size() << " steps, outputs in " << cfg.out_dir
            << "\n";
  return 0;
}

int do_mesh(const std::string& benchmark, const std::string& out,
            const CatalogOverrides& ov) {
  const BenchmarkProblem bench = build_benchmark(benchmark, ov);
  save_mesh(*bench.mesh, out);
  std::cout << "pfrac: wrote " << bench.mesh->num_nodes() << " nodes, "
            << bench.mesh->num_cells() << " cells to " << out << "\n";
  return 0;
}

} // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"phase-field fracture solver with slack-variable irreversibility"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a simulation from a config file");
  std::string config_path;
  run->add_option("config", config_path, "config file")->required();
  std::string formulation, out_dir;
  double eta = 0.0, tol = 0.0;
  int snapshot_every = -1, max_steps = -1;
  std::string resume;
  run->add_option("--formulation", formulation, "lmm|penalty");
  run->add_option("--eta", eta, "penalty parameter, N/mm^2");
  run->add_option("--tol", tol, "Newton tolerance");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--snapshot-every", snapshot_every, "field snapshot cadence, steps");
  run->add_option("--max-steps", max_steps, "stop after this many accepted steps");
  run->add_option("--resume", resume, "checkpoint file to continue from");

  auto* list = app.add_subcommand("list-benchmarks", "print the benchmark names");

  auto* check = app.add_subcommand("check", "run the invariant/oracle self-check suite");

  auto* mesh = app.add_subcommand("mesh", "generate a benchmark mesh only");
  std::string mesh_benchmark, mesh_out;
  double band_h = 0.0, coarse_mult = 0.0;
  mesh->add_option("benchmark", mesh_benchmark, "benchmark name")->required();
  mesh->add_option("--out", mesh_out, "output mesh file")->required();
  mesh->add_option("--band-h", band_h, "refined-band element size, mm");
  mesh->add_option("--coarse-mult", coarse_mult, "coarse size as multiple of band size");

  std::vector<const char*> argv;
  argv.push_back("pfrac");
  for (const auto& a : args)
    argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) {
      std::vector<std::string> overrides;
      auto add = [&](const std::string& k, const std::string& v) {
        overrides.push_back(k);
        overrides.push_back(v);
      };
      if (!formulation.empty())
        add("formulation", formulation);
      if (eta > 0.0)
        add("eta", format_sig(eta));
      if (tol > 0.0)
        add("tol", format_sig(tol));
      if (!out_dir.empty())
        add("out", out_dir);
      if (snapshot_every >= 0)
        add("snapshot_every", std::to_string(snapshot_every));
      if (max_steps >= 0)
        add("max_steps", std::to_string(max_steps));
      if (!resume.empty())
        add("resume", resume);
      return do_run(config_path, overrides);
    }
    if (list->parsed()) {
      for (const auto& n : benchmark_names())
        std::cout << n << "\n";
      return 0;
    }
    if (check->parsed())
      return run_self_check(std::cout) == 0 ? 0 : 1;
    if (mesh->parsed()) {
      CatalogOverrides ov;
      if (band_h > 0.0)
        ov.band_h = band_h;
      if (coarse_mult > 0.0)
        ov.coarse_mult = coarse_mult;
      return do_mesh(mesh_benchmark, mesh_out, ov);
    }
  } catch (const IoError& e) {
    std::cerr << "pfrac: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "pfrac: " << e.what() << "\n";
    return 3;
  } catch (const NonConvergence& e) {
    std::cerr << "pfrac: " << e.what() << "\n";
    return 2;
  } catch (const LinearSolveFailure& e) {
    std::cerr << "pfrac: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "pfrac: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

} // namespace pfrac
