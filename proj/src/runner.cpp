#include "graphsde/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "graphsde/analysis.hpp"
#include "graphsde/assembly.hpp"
#include "graphsde/text.hpp"

namespace graphsde {

namespace fs = std::filesystem;

namespace {

struct Context {
  const ExperimentConfig& cfg;
  const RunOptions& opts;
  std::string hash;
  ResultBundle bundle;

  void add(const std::string& key, const std::string& value) {
    bundle.summary.emplace_back(key, value);
  }
  void add(const std::string& key, double value) { add(key, fmt_g17(value)); }
  void add(const std::string& key, std::size_t value) {
    add(key, std::to_string(value));
  }

  std::string header() const {
    std::ostringstream os;
    os << "# graphsde " << kToolVersion << "\n";
    os << "# config_hash = " << hash << "\n";
    os << "# seed = " << cfg.solver.seed << "\n";
    os << "# rng = " << rng::kAlgorithm << "\n";
    return os.str();
  }

  void write_file(const std::string& name, const std::string& body) {
    fs::path path = fs::path(opts.out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << header() << body;
    bundle.files.push_back(path.string());
  }
};

std::vector<std::size_t> resolve_probes(const ExperimentConfig& cfg,
                                        const Mesh& mesh) {
  std::vector<std::size_t> dofs;
  for (const ProbeSpec& p : cfg.probes) {
    for (EdgeIndex e = 0; e < cfg.graph.num_edges(); ++e)
      if (cfg.graph.edges[e].id == p.edge_id) {
        dofs.push_back(mesh.nearest_dof(e, p.x));
        break;
      }
  }
  return dofs;
}

GridFunction initial_state(const ExperimentConfig& cfg, const Mesh& mesh) {
  return sample_on_mesh(mesh, [&](EdgeIndex e, double x) {
    return cfg.initial[e](x);
  });
}

void task_validate(Context& ctx) {
  ValidationReport report = validate_graph(ctx.cfg.graph, ctx.cfg.validation);
  ctx.add("valid", report.valid() ? "true" : "false");
  ctx.add("violations", report.violations.size());
  for (std::size_t i = 0; i < report.violations.size(); ++i)
    ctx.add("violation." + std::to_string(i),
            report.violations[i].code + ": " + report.violations[i].message);
  if (report.valid()) {
    ctx.add("neg_coupling_min_eigenvalue",
            min_eigenvalue_neg_coupling(ctx.cfg.graph.coupling));
    VertexConditionCount counts = vertex_condition_count(ctx.cfg.graph);
    ctx.add("conditions.continuity", counts.continuity);
    ctx.add("conditions.kirchhoff", counts.kirchhoff);
    ctx.add("conditions.total", counts.total);
  } else {
    ctx.bundle.exit_code = 2;
  }
}

void task_spectrum(Context& ctx) {
  Mesh mesh = build_mesh(ctx.cfg.graph, ctx.cfg.mesh_h);
  DiscreteOperator op = assemble(ctx.cfg.graph, mesh);
  std::vector<double> evs = spectrum(op, ctx.cfg.spectrum_count);
  // listed leading-first: row 0 is the eigenvalue closest to zero
  std::ostringstream body;
  body << "index,eigenvalue\n";
  for (std::size_t i = 0; i < evs.size(); ++i)
    body << i << "," << fmt_g17(evs[evs.size() - 1 - i]) << "\n";
  ctx.write_file("spectrum.csv", body.str());
  ctx.add("dofs", op.num_dofs());
  ctx.add("count", evs.size());
  ctx.add("leading_eigenvalue", evs.empty() ? 0.0 : evs.back());
}

void task_simulate(Context& ctx) {
  Mesh mesh = build_mesh(ctx.cfg.graph, ctx.cfg.mesh_h);
  DiscreteOperator op = assemble(ctx.cfg.graph, mesh);
  SolverConfig solver = ctx.cfg.solver;
  solver.probe_dofs = resolve_probes(ctx.cfg, mesh);
  solver.record_snapshots = true;
  GridFunction xi = initial_state(ctx.cfg, mesh);
  Integrator integrator(op, ctx.cfg.reaction, ctx.cfg.noise, solver);
  PathSample sample = integrator.simulate_path(0, xi);

  std::ostringstream traj;
  traj << "t,edge,x,value\n";
  for (std::size_t s = 0; s < sample.snapshot_times.size(); ++s) {
    const double t = sample.snapshot_times[s];
    for (EdgeIndex e = 0; e < ctx.cfg.graph.num_edges(); ++e)
      for (std::size_t j = 0; j <= mesh.num_cells(e); ++j)
        traj << fmt_g17(t) << "," << ctx.cfg.graph.edges[e].id << ","
             << fmt_g17(mesh.node_coord(e, j)) << ","
             << fmt_g17(sample.snapshots[s][static_cast<Eigen::Index>(
                    mesh.dof(e, j))])
             << "\n";
  }
  ctx.write_file("trajectory.csv", traj.str());

  if (!solver.probe_dofs.empty()) {
    std::ostringstream probes;
    probes << "t";
    for (const ProbeSpec& p : ctx.cfg.probes)
      probes << "," << p.edge_id << ":" << fmt_g17(p.x);
    probes << "\n";
    const std::size_t steps = sample.probe_series.front().size();
    for (std::size_t s = 0; s < steps; ++s) {
      probes << fmt_g17(solver.dt * static_cast<double>(s));
      for (const auto& series : sample.probe_series)
        probes << "," << fmt_g17(series[s]);
      probes << "\n";
    }
    ctx.write_file("probes.csv", probes.str());
  }

  ctx.add("blowup", sample.blew_up ? "true" : "false");
  ctx.add("sup_norm", sample.sup_norm);
  ctx.add("final_mass_norm", op.mass_norm(sample.final_state));
  ctx.add("steps", solver.num_steps());
  if (sample.blew_up && ctx.cfg.max_blowup_rate < 1.0)
    ctx.bundle.exit_code = 4;
}

void task_ensemble(Context& ctx) {
  Mesh mesh = build_mesh(ctx.cfg.graph, ctx.cfg.mesh_h);
  DiscreteOperator op = assemble(ctx.cfg.graph, mesh);
  SolverConfig solver = ctx.cfg.solver;
  solver.probe_dofs = resolve_probes(ctx.cfg, mesh);
  GridFunction xi = initial_state(ctx.cfg, mesh);
  EnsembleStats stats = run_ensemble(op, ctx.cfg.reaction, ctx.cfg.noise,
                                     solver, xi, ctx.opts.threads);

  std::ostringstream body;
  body << "probe,mean,variance\n";
  for (std::size_t p = 0; p < solver.probe_dofs.size(); ++p)
    body << ctx.cfg.probes[p].edge_id << ":" << fmt_g17(ctx.cfg.probes[p].x)
         << "," << fmt_g17(stats.probe_mean[p]) << ","
         << fmt_g17(stats.probe_variance[p]) << "\n";
  ctx.write_file("ensemble.csv", body.str());

  ctx.add("n_paths", stats.n_paths);
  ctx.add("blowups", stats.blowup_count);
  const double rate = static_cast<double>(stats.blowup_count) /
                      static_cast<double>(stats.n_paths);
  ctx.add("blowup_rate", rate);
  for (const auto& [q, est] : stats.sup_moments)
    ctx.add("sup_moment_q" + fmt_g17(q), est);
  for (std::size_t p = 0; p < stats.probe_mean.size(); ++p) {
    ctx.add("probe" + std::to_string(p) + ".mean", stats.probe_mean[p]);
    ctx.add("probe" + std::to_string(p) + ".variance",
            stats.probe_variance[p]);
  }
  if (rate > ctx.cfg.max_blowup_rate) ctx.bundle.exit_code = 4;
}

void task_convergence(Context& ctx) {
  Mesh mesh = build_mesh(ctx.cfg.graph, ctx.cfg.mesh_h);
  DiscreteOperator op = assemble(ctx.cfg.graph, mesh);
  GridFunction xi = initial_state(ctx.cfg, mesh);
  std::vector<double> dts;
  double dt = ctx.cfg.solver.dt;
  for (std::size_t l = 0; l < ctx.cfg.convergence_levels; ++l, dt /= 2.0)
    dts.push_back(dt);
  const bool deterministic =
      ctx.cfg.noise.trivial() || ctx.cfg.solver.scheme == Scheme::DeterministicCN;
  const std::size_t n_paths = deterministic ? 1 : ctx.cfg.solver.n_paths;
  ConvergenceTable table =
      strong_order_time(op, ctx.cfg.reaction, ctx.cfg.noise, ctx.cfg.solver,
                        xi, dts, n_paths, ctx.cfg.solver.seed,
                        ctx.opts.threads);

  std::ostringstream body;
  body << "dt,error,std_error\n";
  for (const ConvergenceRow& r : table.rows)
    body << fmt_g17(r.dt) << "," << fmt_g17(r.error) << ","
         << fmt_g17(r.std_error) << "\n";
  ctx.write_file("convergence.csv", body.str());

  ctx.add("levels", table.rows.size());
  ctx.add("n_paths", n_paths);
  ctx.add("slope", table.slope);
  ctx.add("slope_half_width", table.slope_half_width);
  ctx.add("usable", table.usable ? "true" : "false");
  if (!table.note.empty()) ctx.add("note", table.note);
}

void task_hoelder(Context& ctx) {
  if (ctx.cfg.probes.empty())
    throw ConfigError(1, 0, "hoelder task needs at least one probe");
  Mesh mesh = build_mesh(ctx.cfg.graph, ctx.cfg.mesh_h);
  DiscreteOperator op = assemble(ctx.cfg.graph, mesh);
  SolverConfig solver = ctx.cfg.solver;
  solver.probe_dofs = resolve_probes(ctx.cfg, mesh);
  GridFunction xi = initial_state(ctx.cfg, mesh);

  std::vector<std::vector<double>> series(solver.n_paths);
  EnsembleStats stats = run_ensemble(
      op, ctx.cfg.reaction, ctx.cfg.noise, solver, xi, ctx.opts.threads,
      [&](std::size_t p, const PathSample& sample) {
        if (!sample.blew_up) series[p] = sample.probe_series.front();
      });
  HoelderEstimate est =
      estimate_hoelder(series, solver.dt, ctx.cfg.hoelder_lags);
  ctx.add("blowups", stats.blowup_count);

  std::ostringstream body;
  body << "lag_steps,lag_time,msd\n";
  for (std::size_t i = 0; i < est.lags.size(); ++i)
    body << est.lags[i] << ","
         << fmt_g17(static_cast<double>(est.lags[i]) * solver.dt) << ","
         << fmt_g17(est.msd[i]) << "\n";
  ctx.write_file("hoelder.csv", body.str());

  ctx.add("lambda_hat", est.lambda_hat);
  ctx.add("r_squared", est.r_squared);
  ctx.add("sufficient_resolution", est.sufficient_resolution ? "true" : "false");
  if (!est.note.empty()) ctx.add("note", est.note);
}

}  // namespace

ResultBundle run(const ExperimentConfig& cfg, const RunOptions& opts) {
  fs::create_directories(opts.out_dir);
  Context ctx{cfg, opts, config_hash(cfg), {}};
  ctx.add("task", task_name(cfg.task));

  try {
    switch (cfg.task) {
      case Task::Validate: task_validate(ctx); break;
      case Task::Spectrum: task_spectrum(ctx); break;
      case Task::Simulate: task_simulate(ctx); break;
      case Task::Ensemble: task_ensemble(ctx); break;
      case Task::Convergence: task_convergence(ctx); break;
      case Task::Hoelder: task_hoelder(ctx); break;
    }
  } catch (const ConfigError& ex) {
    ctx.add("error", ex.what());
    ctx.add("error_code", std::size_t{2});
    ctx.bundle.exit_code = 2;
  } catch (const std::exception& ex) {
    ctx.add("error", std::string(ex.what()));
    ctx.add("error_code", std::size_t{3});
    ctx.bundle.exit_code = 3;
  }

  ctx.write_file("config_normalized.cfg", normalize_config(cfg));
  {
    std::ostringstream body;
    for (const auto& [k, v] : ctx.bundle.summary) body << k << " = " << v << "\n";
    body << "exit_code = " << ctx.bundle.exit_code << "\n";
    ctx.write_file("summary.txt", body.str());
  }
  return ctx.bundle;
}

ResultBundle run_config_text(const std::string& text, const RunOptions& opts) {
  auto apply_overrides = [&](ExperimentConfig& cfg) {
    if (!opts.task_override.empty()) {
      try {
        cfg.task = task_from_name(opts.task_override);
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(0, 0, ex.what());
      }
    }
    if (opts.seed_override >= 0)
      cfg.solver.seed = static_cast<std::uint64_t>(opts.seed_override);
  };
  ExperimentConfig lenient = parse_config(text, false);
  apply_overrides(lenient);
  if (lenient.task == Task::Validate) return run(lenient, opts);
  ExperimentConfig cfg = parse_config(text, true);
  apply_overrides(cfg);
  return run(cfg, opts);
}

bool verify_bundle(const std::string& dir, std::string* error) {
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".csv" || ext == ".txt" || ext == ".cfg")
      paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) {
    if (error) *error = "no result files in " + dir;
    return false;
  }
  std::string expected;
  for (const fs::path& p : paths) {
    std::ifstream in(p);
    std::string line, hash;
    while (std::getline(in, line) && !line.empty() && line.front() == '#') {
      const std::string tag = "# config_hash = ";
      if (line.rfind(tag, 0) == 0) hash = line.substr(tag.size());
    }
    if (hash.empty()) {
      if (error) *error = p.string() + ": missing config_hash header";
      return false;
    }
    if (expected.empty()) expected = hash;
    if (hash != expected) {
      if (error)
        *error = p.string() + ": config_hash " + hash +
                 " does not match bundle hash " + expected;
      return false;
    }
  }
  return true;
}

}  // namespace graphsde
