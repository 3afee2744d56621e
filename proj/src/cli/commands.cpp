#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "acrom/cli.hpp"
#include "acrom/config.hpp"
#include "acrom/diag.hpp"
#include "acrom/error.hpp"
#include "acrom/formats.hpp"
#include "acrom/kernels.hpp"
#include "acrom/linear_solver.hpp"

namespace acrom::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
  std::string command;
  fs::path config_path;
  fs::path out;
  bool quiet = false;
  PipelineConfig cfg;
  std::ostream* log = nullptr;
  json inputs = json::object();
  json outputs = json::object();
  json parameters = json::object();

  void info(const std::string& msg) const {
    if (!quiet) *log << "acrom " << command << ": " << msg << "\n";
  }
  fs::path path(const std::string& name) const { return out / name; }
  fs::path require(const std::string& name, const std::string& producer) {
    const fs::path p = path(name);
    if (!fs::exists(p))
      throw MissingArtifactError("missing upstream artifact " + p.string() + " (produced by `acrom " + producer + "`)");
    inputs[name] = io::file_sha256(p);
    return p;
  }
  void produced(const std::string& name) { outputs[name] = io::file_sha256(path(name)); }
};

void write_manifest(Context& c, double seconds) {
  json m;
  m["command"] = c.command;
  m["config_path"] = c.config_path.string();
  m["config_sha256"] = io::file_sha256(c.config_path);
  m["inputs"] = c.inputs;
  m["outputs"] = c.outputs;
  m["parameters"] = c.parameters;
  m["wall_clock_seconds"] = seconds;
  m["simd"] = std::string(kernels::isa_name(kernels::active_isa()));
  m["sparse_solver"] = fem::SparseLu::backend();
  m["threads"] = fem::resolve_threads(0);
  std::ofstream f(c.path("manifest_" + c.command + ".json"), std::ios::trunc);
  f << m.dump(2) << "\n";
  if (!f) throw IoError("cannot write manifest for " + c.command);
}

fem::Discretization load_discretization(Context& c) {
  return fem::Discretization::build(load_mesh(c.require("mesh.txt", "mesh")));
}

std::string modes_name(int R, int M) { return "R" + std::to_string(R) + "_M" + std::to_string(M); }

int resolve_modes(int requested, int available) { return requested == kAllModes ? available : requested; }

// Index of `t` in a sorted time list, or -1.
Eigen::Index find_time(const std::vector<double>& times, double t) {
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  auto it = std::lower_bound(times.begin(), times.end(), t - tol);
  if (it == times.end() || std::abs(*it - t) > tol) return -1;
  return it - times.begin();
}

// ---------------------------------------------------------------- mesh

void cmd_mesh(Context& c) {
  const auto& m = c.cfg.mesh;
  c.parameters = {{"r1", m.geometry.r1}, {"r2", m.geometry.r2}, {"c1", m.geometry.c1},
                  {"c2", m.geometry.c2}, {"h", m.h}};
  const Mesh mesh = generate_offset_cylinder_mesh(m.geometry, m.h);
  save_mesh(mesh, c.path("mesh.txt"));
  c.produced("mesh.txt");
  const auto dofs = fem::build_dofmap(mesh);
  std::ostringstream s;
  s << mesh.vertices.size() << " vertices, " << mesh.triangles.size() << " triangles, " << dofs.n_u
    << " velocity dofs, " << dofs.n_p << " pressure dofs";
  c.info(s.str());
}

// ---------------------------------------------------------------- offline

void cmd_offline(Context& c) {
  const auto disc = load_discretization(c);
  const OfflineConfig& oc = c.cfg.offline;
  c.parameters = io::config_to_json(oc);
  if (oc.initial_state == InitialState::FromFile) {
    if (!fs::exists(oc.initial_path))
      throw MissingArtifactError("missing initial state file " + oc.initial_path.string());
    c.inputs[oc.initial_path.string()] = io::file_sha256(oc.initial_path);
  }
  OfflineRunOptions opt;
  if (oc.checkpoint_every > 0) {
    opt.checkpoint_path = c.path("offline.ckpt");
    opt.resume = true;
    if (fs::exists(opt.checkpoint_path)) c.info("resuming from " + opt.checkpoint_path.string());
  }
  std::int64_t next_report = 0;
  opt.progress = [&](std::int64_t n, std::int64_t total, double t) {
    if (n >= next_report || n == total) {
      std::ostringstream s;
      s << "step " << n << "/" << total << " t=" << t;
      c.info(s.str());
      next_report = n + std::max<std::int64_t>(1, total / 10);
    }
  };
  const SnapshotSet snaps = run_offline(oc, disc, opt);
  io::save_snapshots(c.path("snapshots.bin"), snaps);
  c.produced("snapshots.bin");
  if (!opt.checkpoint_path.empty()) fs::remove(opt.checkpoint_path);

  {
    io::CsvWriter w(c.path("offline_energy.csv"), {"time", "energy", "energy_residual"});
    for (std::size_t i = 0; i < snaps.step_times.size(); ++i)
      w.row(std::vector<double>{snaps.step_times[i], snaps.step_energy[i], snaps.step_residual[i]});
  }
  c.produced("offline_energy.csv");
  {
    const auto forces = diag::force_functionals(disc, c.cfg.rom.stress_includes_nu, oc.nu);
    const Eigen::MatrixXd div = diag::divergence_fields(disc, snaps.U);
    io::CsvWriter w(c.path("offline_traces.csv"), {"time", "kinetic_energy", "drag", "lift", "divergence_norm"});
    for (int k = 0; k < snaps.count(); ++k) {
      const fem::Vector u = snaps.U.col(k), p = snaps.P.col(k);
      const fem::Vector dk = div.col(k);
      w.row(std::vector<double>{snaps.times[k], diag::kinetic_energy(disc, u), forces.drag(u, p), forces.lift(u, p),
                                std::sqrt(dk.dot(disc.pressure_mass * dk))});
    }
  }
  c.produced("offline_traces.csv");
  double worst = 0.0;
  for (double r : snaps.step_residual) worst = std::max(worst, r);
  std::ostringstream s;
  s << snaps.count() << " snapshots, max energy identity residual " << worst;
  c.info(s.str());
}

// ---------------------------------------------------------------- pod

void cmd_pod(Context& c) {
  const fs::path sp = c.require("snapshots.bin", "offline");
  const auto disc = load_discretization(c);
  const SnapshotSet snaps = io::load_snapshots(sp);
  const std::string source = io::snapshot_hash(sp);

  // Probe the numerical ranks with R = 0, then extract the requested count.
  const PodBasis probe_u = compute_pod(snaps, disc, Field::Velocity, 0);
  const PodBasis probe_p = compute_pod(snaps, disc, Field::Pressure, 0);
  const int Ru = resolve_modes(c.cfg.pod.velocity_modes, probe_u.numerical_rank);
  const int Rp = resolve_modes(c.cfg.pod.pressure_modes, probe_p.numerical_rank);
  c.parameters = {{"velocity_modes", Ru}, {"pressure_modes", Rp}, {"snapshots", snaps.count()}};
  PodBasis ub = compute_pod(snaps, disc, Field::Velocity, Ru);
  PodBasis pb = compute_pod(snaps, disc, Field::Pressure, Rp);
  ub.source_hash = pb.source_hash = source;
  io::save_basis(c.path("basis_velocity.bin"), ub);
  io::save_basis(c.path("basis_pressure.bin"), pb);
  c.produced("basis_velocity.bin");
  c.produced("basis_pressure.bin");

  {
    io::CsvWriter w(c.path("pod_spectrum.csv"), {"index", "velocity_eigenvalue", "pressure_eigenvalue",
                                                 "velocity_singular_value", "pressure_singular_value"});
    for (Eigen::Index i = 0; i < ub.eigenvalues.size(); ++i)
      w.row(std::vector<double>{static_cast<double>(i + 1), ub.eigenvalues[i], pb.eigenvalues[i],
                                std::sqrt(ub.eigenvalues[i]), std::sqrt(pb.eigenvalues[i])});
  }
  c.produced("pod_spectrum.csv");
  {
    io::CsvWriter w(c.path("pod_projection.csv"), {"field", "R", "l2_measured", "l2_tail", "l2_mismatch",
                                                   "h1_measured", "h1_tail", "h1_mismatch"});
    const auto emit = [&](const PodBasis& b, const Eigen::MatrixXd& A, const fem::SparseOperator& W,
                          const fem::SparseOperator* K) {
      std::vector<int> levels{0, std::min(5, b.size()), b.size()};
      levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
      for (int R : levels) {
        const auto r = projection_error_report(b, A, W, K, R);
        w.row(std::vector<std::string>{field_name(b.field), std::to_string(R), io::format_double(r.l2_measured),
                                       io::format_double(r.l2_tail), io::format_double(r.l2_mismatch()),
                                       io::format_double(r.h1_measured), io::format_double(r.h1_tail),
                                       io::format_double(r.has_h1 ? r.h1_mismatch() : 0.0)});
      }
    };
    emit(ub, snaps.U, disc.mass, &disc.stiffness);
    emit(pb, snaps.P, disc.pressure_mass, nullptr);
  }
  c.produced("pod_projection.csv");
  {
    // Divergence of the leading modes and of the last snapshot, at the mesh vertices.
    io::CsvWriter w(c.path("divergence_fields.csv"), {"source", "index", "x", "y", "divergence"});
    const auto emit = [&](const std::string& source, int index, const fem::Vector& u) {
      const fem::Vector dv = diag::divergence_field(disc, u);
      for (int v = 0; v < disc.dofs.n_p; ++v)
        w.row(std::vector<std::string>{source, std::to_string(index), io::format_double(disc.mesh.vertices[v].x),
                                       io::format_double(disc.mesh.vertices[v].y), io::format_double(dv[v])});
    };
    for (int i = 0; i < std::min(4, ub.size()); ++i) emit("mode", i + 1, ub.modes.col(i));
    emit("snapshot", snaps.count() - 1, snaps.U.col(snaps.count() - 1));
  }
  c.produced("divergence_fields.csv");
  std::ostringstream s;
  s << "velocity modes " << Ru << " (rank " << ub.numerical_rank << "), pressure modes " << Rp << " (rank "
    << pb.numerical_rank << ")";
  c.info(s.str());
}

// ---------------------------------------------------------------- rom

struct Loaded {
  fem::Discretization disc;
  SnapshotSet snaps;
  PodBasis ub, pb;
};

Loaded load_all(Context& c) {
  const fs::path sp = c.require("snapshots.bin", "offline");
  const fs::path up = c.require("basis_velocity.bin", "pod");
  const fs::path pp = c.require("basis_pressure.bin", "pod");
  Loaded l{load_discretization(c), io::load_snapshots(sp), io::load_basis(up), io::load_basis(pp)};
  if (l.ub.source_hash != io::snapshot_hash(sp) || l.pb.source_hash != l.ub.source_hash)
    throw MissingArtifactError("bases in " + c.out.string() + " were not built from " + sp.string() +
                               "; rerun `acrom pod`");
  return l;
}

struct Window {
  double t0, t1;
  Eigen::Index first;  // snapshot index of t0
};

Window resolve_window(const SnapshotSet& s, std::optional<double> t0, std::optional<double> t1) {
  Window w{t0.value_or(s.times.front()), t1.value_or(s.times.back()), 0};
  w.first = find_time(s.times, w.t0);
  if (w.first < 0) throw ConfigError("window start t=" + std::to_string(w.t0) + " is not a snapshot time");
  if (!(w.t1 > w.t0)) throw ConfigError("window end must exceed its start");
  return w;
}

std::int64_t steps_in(const Window& w, double dt) {
  const double span = (w.t1 - w.t0) / dt;
  const auto n = static_cast<std::int64_t>(std::llround(span));
  if (n < 1 || std::abs(span - static_cast<double>(n)) > 1e-6)
    throw ConfigError("window [" + std::to_string(w.t0) + ", " + std::to_string(w.t1) +
                      "] is not a whole number of steps of dt=" + std::to_string(dt));
  return n;
}

struct RomErrors {
  diag::RelativeError velocity, pressure;
};

// l2L2 errors of a trajectory against the snapshots at the shared times.
RomErrors trajectory_errors(const Loaded& l, const PodBasis& ub, const PodBasis& pb, const RomTrajectory& tr,
                            bool require_all) {
  std::vector<double> times;
  std::vector<Eigen::Index> cols;
  for (int k = 0; k < tr.count(); ++k) {
    if (find_time(l.snaps.times, tr.times[k]) >= 0) {
      times.push_back(tr.times[k]);
      cols.push_back(k);
    } else if (require_all) {
      throw InvariantError("trajectory time " + std::to_string(tr.times[k]) + " is not on the snapshot grid");
    }
  }
  if (times.empty()) throw InvariantError("trajectory shares no times with the snapshots");
  Eigen::MatrixXd U(ub.dofs(), static_cast<Eigen::Index>(cols.size()));
  Eigen::MatrixXd P(pb.dofs(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) {
    U.col(static_cast<Eigen::Index>(i)) = ub.modes * tr.a_u.col(cols[i]);
    P.col(static_cast<Eigen::Index>(i)) = pb.modes * tr.a_p.col(cols[i]);
  }
  return {diag::l2L2_relative_error(times, U, l.snaps.times, l.snaps.U, &l.disc.mass),
          diag::l2L2_relative_error(times, P, l.snaps.times, l.snaps.P, &l.disc.pressure_mass)};
}

void cmd_rom(Context& c) {
  const Loaded l = load_all(c);
  const auto& rc = c.cfg.rom;
  const double nu = l.snaps.config.nu, eps = l.snaps.config.eps;
  const double dt = rc.dt.value_or(l.snaps.config.dt);
  const Window w = resolve_window(l.snaps, rc.t_start, rc.t_end);
  const std::int64_t steps = steps_in(w, dt);
  c.parameters = {{"modes", rc.modes}, {"pressure_modes", rc.pressure_modes}, {"dt", dt}, {"t_start", w.t0},
                  {"t_end", w.t1}, {"nu", nu}, {"eps", eps}, {"stress_includes_nu", rc.stress_includes_nu}};

  io::CsvWriter traces(c.path("rom_traces.csv"), {"R", "M", "time", "energy", "drag", "lift", "energy_residual"});
  io::CsvWriter errors(c.path("rom_errors.csv"),
                       {"R", "M", "velocity_error", "pressure_error", "max_energy_residual", "inequality_holds"});
  RomBuildOptions bopt;
  bopt.forcing = l.snaps.config.forcing;
  bopt.stress_includes_nu = rc.stress_includes_nu;
  for (std::size_t i = 0; i < rc.modes.size(); ++i) {
    const int R = rc.modes[i];
    const int M = rc.pressure_modes.empty() ? R : rc.pressure_modes[i];
    if (R > l.ub.size() || M > l.pb.size())
      throw ConfigError("rom: R=" + std::to_string(R) + ", M=" + std::to_string(M) + " exceeds the stored bases (" +
                        std::to_string(l.ub.size()) + ", " + std::to_string(l.pb.size()) + ")");
    const PodBasis ub = truncate(l.ub, R), pb = truncate(l.pb, M);
    const ReducedModel model = build_reduced_model(ub, pb, l.disc, nu, eps, bopt);
    const RomState a0 = project_state(ub, pb, l.disc, l.snaps.U.col(w.first), l.snaps.P.col(w.first));
    const RomTrajectory tr = run_rom(model, a0, w.t0, dt, steps);
    const std::string name = "trajectory_" + modes_name(R, M) + ".bin";
    io::save_trajectory(c.path(name), tr, {{"nu", nu}, {"eps", eps}, {"basis_source", ub.source_hash}});
    c.produced(name);
    const auto eb = diag::energy_balance(model, tr);
    for (int k = 0; k < tr.count(); ++k)
      traces.row(std::vector<double>{double(R), double(M), tr.times[k], tr.kinetic_energy[k], tr.drag[k], tr.lift[k],
                                     tr.energy_residual[k]});
    const RomErrors e = trajectory_errors(l, ub, pb, tr, false);
    errors.row(std::vector<double>{double(R), double(M), e.velocity.value, e.pressure.value, eb.max_residual,
                                   eb.inequality_holds ? 1.0 : 0.0});
    std::ostringstream s;
    s << modes_name(R, M) << ": velocity error " << e.velocity.value << ", pressure error " << e.pressure.value
      << ", max energy residual " << eb.max_residual;
    c.info(s.str());
  }
  traces.close();
  errors.close();
  c.produced("rom_traces.csv");
  c.produced("rom_errors.csv");
}

// ---------------------------------------------------------------- angles

void cmd_angles(Context& c) {
  const auto disc = load_discretization(c);
  const PodBasis ub = io::load_basis(c.require("basis_velocity.bin", "pod"));
  const PodBasis pb = io::load_basis(c.require("basis_pressure.bin", "pod"));
  const int top = std::min({c.cfg.angles.max_modes, ub.size(), pb.size()});
  c.parameters = {{"max_modes", top}};
  {
    io::CsvWriter w(c.path("angles.csv"),
                    {"R", "M", "alpha", "alpha_squared", "theta1", "infsup_beta", "divergence_rank"});
    for (int r = 1; r <= top; ++r) {
      const auto a = diag::principal_angle(truncate(ub, r), truncate(pb, r), disc);
      w.row(std::vector<double>{double(r), double(r), a.alpha, a.alpha * a.alpha, a.theta1, a.infsup_beta,
                                double(a.divergence_rank)});
    }
  }
  c.produced("angles.csv");
  c.info("principal angles for R=M=1.." + std::to_string(top));
}

// ---------------------------------------------------------------- convergence

void cmd_convergence(Context& c) {
  const Loaded l = load_all(c);
  const auto& cc = c.cfg.convergence;
  const int R = std::min(cc.modes, l.ub.size());
  const int M = std::min(cc.pressure_modes.value_or(cc.modes), l.pb.size());
  const Window w = resolve_window(l.snaps, cc.t_start, cc.t_end);
  const double nu = l.snaps.config.nu, eps = l.snaps.config.eps;
  c.parameters = {{"dts", cc.dts}, {"R", R}, {"M", M}, {"t_start", w.t0}, {"t_end", w.t1}};
  const PodBasis ub = truncate(l.ub, R), pb = truncate(l.pb, M);
  RomBuildOptions bopt;
  bopt.forcing = l.snaps.config.forcing;
  const ReducedModel model = build_reduced_model(ub, pb, l.disc, nu, eps, bopt);
  const RomState a0 = project_state(ub, pb, l.disc, l.snaps.U.col(w.first), l.snaps.P.col(w.first));

  const std::size_t n = cc.dts.size();
  std::vector<RomErrors> errs(n);
  std::vector<std::string> failures(n);
  const auto work = [&](std::size_t i) {
    try {
      const RomTrajectory tr = run_rom(model, a0, w.t0, cc.dts[i], steps_in(w, cc.dts[i]));
      errs[i] = trajectory_errors(l, ub, pb, tr, true);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  };
  const int threads = std::max(1, std::min<int>(fem::resolve_threads(0), static_cast<int>(n)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < n; i += threads) work(i);
      });
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!failures[i].empty()) throw Error("convergence at dt=" + io::format_double(cc.dts[i]) + ": " + failures[i]);

  std::vector<double> ev, ep;
  {
    io::CsvWriter wr(c.path("convergence.csv"), {"dt", "velocity_error", "pressure_error"});
    for (std::size_t i = 0; i < n; ++i) {
      wr.row(std::vector<double>{cc.dts[i], errs[i].velocity.value, errs[i].pressure.value});
      ev.push_back(errs[i].velocity.value);
      ep.push_back(errs[i].pressure.value);
    }
  }
  const auto ov = diag::fit_order(cc.dts, ev);
  const auto op = diag::fit_order(cc.dts, ep);
  {
    io::CsvWriter wr(c.path("convergence_order.csv"), {"field", "order", "defined"});
    wr.row(std::vector<std::string>{"velocity", io::format_double(ov.value_or(std::nan(""))), ov ? "1" : "0"});
    wr.row(std::vector<std::string>{"pressure", io::format_double(op.value_or(std::nan(""))), op ? "1" : "0"});
  }
  c.produced("convergence.csv");
  c.produced("convergence_order.csv");
  std::ostringstream s;
  s << "fitted order velocity " << (ov ? io::format_double(*ov) : "undefined") << ", pressure "
    << (op ? io::format_double(*op) : "undefined");
  c.info(s.str());
}

// ---------------------------------------------------------------- report

const char* const kReportTables[] = {"offline_energy.csv", "offline_traces.csv", "pod_spectrum.csv",
                                     "pod_projection.csv", "divergence_fields.csv", "rom_traces.csv",
                                     "rom_errors.csv",     "angles.csv",         "convergence.csv",
                                     "convergence_order.csv"};

void cmd_report(Context& c) {
  io::CsvWriter w(c.path("report.csv"), {"table", "row", "column", "value"});
  int found = 0;
  for (const char* name : kReportTables) {
    const fs::path p = c.path(name);
    if (!fs::exists(p)) continue;
    ++found;
    c.inputs[name] = io::file_sha256(p);
    const io::CsvTable t = io::read_csv(p);
    const std::string table = fs::path(name).stem().string();
    for (std::size_t r = 0; r < t.rows.size(); ++r)
      for (std::size_t k = 0; k < t.columns.size(); ++k)
        w.row(std::vector<std::string>{table, std::to_string(r), t.columns[k], t.rows[r][k]});
  }
  if (found == 0) throw MissingArtifactError("report: no CSV tables found in " + c.out.string());
  w.close();
  c.produced("report.csv");
  c.info("bundled " + std::to_string(found) + " tables into " + c.path("report.csv").string());
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Artificial-compression reduced-order modelling pipeline", "acrom"};
  app.require_subcommand(1, 1);
  Context ctx;
  ctx.log = &out;
  std::string out_dir = "acrom-out";
  std::string config;
  const std::map<std::string, std::pair<std::string, void (*)(Context&)>> commands = {
      {"mesh", {"Generate the offset-cylinder mesh", cmd_mesh}},
      {"offline", {"Run the full-order scheme and store snapshots", cmd_offline}},
      {"pod", {"Extract velocity and pressure POD bases", cmd_pod}},
      {"rom", {"Run the reduced model over the snapshot window", cmd_rom}},
      {"angles", {"Principal angles and inf-sup constants versus mode count", cmd_angles}},
      {"convergence", {"Time-step convergence study of the reduced model", cmd_convergence}},
      {"report", {"Bundle all CSV tables into report.csv", cmd_report}}};
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config,-c", config, "Pipeline configuration file")->required();
    sub->add_option("--out,-o", out_dir, "Output directory");
    sub->add_flag("--quiet,-q", ctx.quiet, "Suppress progress messages");
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "acrom: usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  ctx.command = app.get_subcommands().front()->get_name();
  ctx.config_path = config;
  ctx.out = out_dir;
  try {
    const auto start = std::chrono::steady_clock::now();
    ctx.cfg = parse_config(ctx.config_path);
    fs::create_directories(ctx.out);
    commands.at(ctx.command).second(ctx);
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    write_manifest(ctx, dt.count());
    return kExitOk;
  } catch (const MissingArtifactError& e) {
    err << "acrom " << ctx.command << ": error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "acrom " << ctx.command << ": error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SolverError& e) {
    err << "acrom " << ctx.command << ": error: " << e.what() << " (last good time " << e.last_good_time() << ")\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "acrom " << ctx.command << ": error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace acrom::cli
