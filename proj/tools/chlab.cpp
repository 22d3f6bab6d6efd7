// chlab: scenario runner emitting trajectory, ledger, measure and
// characteristic files for the Camassa-Holm / Hunter-Saxton laboratory.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "chlab/characteristics.hpp"
#include "chlab/kernel.hpp"
#include "chlab/measures.hpp"
#include "chlab/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + ctx);
  }
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  check_keys(j,
             {"equation", "source", "mesh", "time", "windows",
              "test_functions", "t_candidates", "characteristics",
              "tolerances"},
             "config");
  return j;
}

chlab::KernelSpec equation_spec(const json& cfg) {
  const std::string eq = cfg.value("equation", "CH");
  if (eq == "CH") return chlab::KernelSpec::camassa_holm();
  if (eq == "HS") return chlab::KernelSpec::hunter_saxton();
  throw ConfigError("equation must be CH or HS");
}

chlab::MeshRequest mesh_request(const json& cfg, double refine) {
  chlab::MeshRequest mesh;
  if (cfg.contains("mesh")) {
    const json& m = cfg.at("mesh");
    check_keys(m, {"spacing", "grading_ratio", "floor_scale", "tail_cut"},
               "mesh");
    mesh.spacing = m.value("spacing", mesh.spacing);
    mesh.grading_ratio = m.value("grading_ratio", mesh.grading_ratio);
    mesh.floor_scale = m.value("floor_scale", mesh.floor_scale);
    mesh.tail_cut = m.value("tail_cut", mesh.tail_cut);
  }
  if (refine > 1.0) mesh = mesh.refined(refine);
  return mesh;
}

chlab::SolutionHandle build_source(const json& src) {
  check_keys(src, {"kind", "p0", "q0", "c", "t_end", "q", "p", "T", "base"},
             "source");
  const std::string kind = src.value("kind", "");
  if (kind == "Zero") {
    return chlab::make_zero_solution(src.value("t_end", 1.0));
  }
  if (kind == "SinglePeakon") {
    return chlab::make_single_peakon(src.value("c", 1.0),
                                     src.value("t_end", 1.0));
  }
  if (kind == "ExactPeakonAntipeakon" || kind == "Multipeakon") {
    if (kind == "Multipeakon" && src.contains("q")) {
      chlab::MultipeakonState st;
      st.q = src.at("q").get<std::vector<double>>();
      st.p = src.at("p").get<std::vector<double>>();
      return chlab::make_multipeakon(st, src.value("t_end", 1.0));
    }
    const double p0 = src.value("p0", 2.0);
    const double q0 = src.value("q0", std::log(0.75));
    const auto params = chlab::derive_params(p0, q0);
    const double t_end = src.value("t_end", 2.0 * params.t_collision);
    if (kind == "Multipeakon") {
      chlab::MultipeakonState st;
      st.q = {0.5 * q0, -0.5 * q0};
      st.p = {0.5 * p0, -0.5 * p0};
      return chlab::make_multipeakon(st, t_end);
    }
    return chlab::make_exact_peakon_antipeakon(params, t_end);
  }
  if (kind == "Reversed") {
    chlab::SolutionHandle base = build_source(src.at("base"));
    return chlab::make_reversed(base, src.value("T", base->t_end()));
  }
  throw ConfigError("source.kind must be one of Zero, SinglePeakon, "
                    "ExactPeakonAntipeakon, Multipeakon, Reversed");
}

std::vector<double> time_grid(const json& cfg, double t_end) {
  int frames = 41;
  double t0 = 0.0, t1 = t_end;
  if (cfg.contains("time")) {
    const json& t = cfg.at("time");
    check_keys(t, {"frames", "t0", "t1"}, "time");
    frames = t.value("frames", frames);
    t0 = t.value("t0", t0);
    t1 = t.value("t1", t1);
  }
  if (frames < 2) throw ConfigError("time.frames must be >= 2");
  std::vector<double> g(frames);
  for (int i = 0; i < frames; ++i) {
    g[i] = t0 + (t1 - t0) * i / (frames - 1);
  }
  return g;
}

chlab::StepFunction test_function(const json& tf) {
  check_keys(tf, {"type", "a", "b", "center", "half_width", "eps"},
             "test_functions entry");
  const std::string type = tf.value("type", "indicator");
  if (type == "indicator") {
    return chlab::StepFunction::indicator(tf.value("a", -1.0),
                                          tf.value("b", 1.0));
  }
  if (type == "hat") {
    const double c = tf.value("center", 0.0);
    const double w = tf.value("half_width", 1.0);
    const double eps = tf.value("eps", 0.05);
    return chlab::step_approximate(
        [=](double x) { return std::max(0.0, 1.0 - std::abs(x - c) / w); },
        c - w, c + w, eps);
  }
  throw ConfigError("test function type must be indicator or hat");
}

/// Writes via a temp file and rename so readers never see partial output.
void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw FileError("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

chlab::Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open trajectory: " + path);
  try {
    return chlab::read_trajectory(in);
  } catch (const std::exception& e) {
    throw FileError("unreadable trajectory " + path + ": " + e.what());
  }
}

/// Prefer the generator described by the config when it matches the
/// trajectory header (exact time resolution); otherwise interpolate frames.
chlab::SolutionHandle handle_for(const json& cfg,
                                 const chlab::Trajectory& traj) {
  if (cfg.contains("source")) {
    chlab::SolutionHandle h = build_source(cfg.at("source"));
    if (h->kind() == traj.kind) return h;
  }
  return chlab::make_from_frames(traj.frames, traj.kind);
}

int cmd_simulate(const json& cfg, const fs::path& out_dir, double refine) {
  chlab::SolutionHandle handle = build_source(cfg.at("source"));
  const chlab::MeshRequest mesh = mesh_request(cfg, refine);
  const std::vector<double> grid = time_grid(cfg, handle->t_end());
  std::vector<chlab::WaveProfile> frames;
  frames.reserve(grid.size());
  for (const double t : grid) frames.push_back(handle->profile_at(t, mesh));
  std::ostringstream os;
  chlab::write_trajectory(os, handle->kind(), handle->t_end(), frames);
  atomic_write(out_dir / "trajectory.csv", os.str());
  return 0;
}

int cmd_energy_report(const json& cfg, const fs::path& out_dir,
                      const std::string& traj_path, double refine) {
  const chlab::Trajectory traj = load_trajectory(traj_path);
  chlab::SolutionHandle handle = handle_for(cfg, traj);
  const chlab::KernelSpec spec = equation_spec(cfg);
  const chlab::MeshRequest mesh = mesh_request(cfg, refine);
  const std::vector<double> grid = time_grid(cfg, handle->t_end());

  // Per-window ledgers.
  if (cfg.contains("windows")) {
    int wi = 0;
    for (const json& w : cfg.at("windows")) {
      check_keys(w, {"alpha", "beta"}, "windows entry");
      const double a = w.at("alpha").get<double>();
      const double b = w.at("beta").get<double>();
      if (!(b > a)) throw ConfigError("window must satisfy beta > alpha");
      const chlab::Characteristic ac =
          chlab::trace(handle, a, grid.front(), grid.back(),
                       chlab::Side::Leftmost);
      const chlab::Characteristic bc =
          chlab::trace(handle, b, grid.front(), grid.back(),
                       chlab::Side::Leftmost);
      const chlab::EnergyLedger led =
          chlab::ledger(handle, ac, bc, grid, mesh);
      std::ostringstream os;
      chlab::write_ledger_csv(os, led);
      atomic_write(out_dir / ("ledger_" + std::to_string(wi) + ".csv"),
                   os.str());
      ++wi;
    }
  }

  // Per-test-function measure reports.
  if (cfg.contains("test_functions")) {
    std::vector<double> cands;
    if (cfg.contains("t_candidates")) {
      cands = cfg.at("t_candidates").get<std::vector<double>>();
    }
    int fi = 0;
    for (const json& tf : cfg.at("test_functions")) {
      const chlab::StepFunction phi = test_function(tf);
      chlab::MuOptions mopts;
      mopts.mesh = mesh;
      auto [mu_plus, mu_minus] = chlab::mu_atoms(handle, phi, cands, mopts);
      chlab::MeasureReport nu =
          chlab::nu_measure(handle, phi, +1, grid, mesh);
      mu_plus.bins = nu.bins;
      mu_plus.total_variation += nu.total_variation;
      chlab::MeasureReport nu_m =
          chlab::nu_measure(handle, phi, -1, grid, mesh);
      mu_minus.bins = nu_m.bins;
      mu_minus.total_variation += nu_m.total_variation;
      std::ostringstream osp, osm;
      chlab::write_measure_json(osp, mu_plus);
      chlab::write_measure_json(osm, mu_minus);
      atomic_write(
          out_dir / ("measure_plus_" + std::to_string(fi) + ".json"),
          osp.str());
      atomic_write(
          out_dir / ("measure_minus_" + std::to_string(fi) + ".json"),
          osm.str());
      ++fi;
    }
  }
  return 0;
}

int cmd_characteristics(const json& cfg, const fs::path& out_dir,
                        const std::string& traj_path) {
  const chlab::Trajectory traj = load_trajectory(traj_path);
  chlab::SolutionHandle handle = handle_for(cfg, traj);
  if (!cfg.contains("characteristics")) {
    throw ConfigError("characteristics section missing");
  }
  const json& cc = cfg.at("characteristics");
  check_keys(cc, {"starts", "v", "flow_map", "t0", "t1"}, "characteristics");
  const double t0 = cc.value("t0", 0.0);
  const double t1 = cc.value("t1", handle->t_end());
  const bool want_v = cc.value("v", false);

  if (cc.contains("starts")) {
    int si = 0;
    for (const double start : cc.at("starts").get<std::vector<double>>()) {
      chlab::Characteristic c =
          chlab::trace(handle, start, t0, t1, chlab::Side::Plain);
      if (want_v) {
        try {
          c = chlab::v_along(handle, c).curve;
        } catch (const chlab::SlopeMismatch& e) {
          std::cerr << "warning: start " << start << ": " << e.what()
                    << " (emitting x,u only)\n";
        }
      }
      std::ostringstream os;
      chlab::write_characteristic_csv(os, c);
      atomic_write(out_dir / ("char_" + std::to_string(si) + ".csv"),
                   os.str());
      ++si;
    }
  }
  if (cc.contains("flow_map")) {
    const json& fm = cc.at("flow_map");
    check_keys(fm, {"lo", "hi", "count", "t"}, "flow_map");
    const double lo = fm.at("lo").get<double>();
    const double hi = fm.at("hi").get<double>();
    const int count = fm.value("count", 101);
    if (count < 2 || !(hi > lo)) throw ConfigError("bad flow_map grid");
    std::vector<double> starts(count);
    for (int i = 0; i < count; ++i) {
      starts[i] = lo + (hi - lo) * i / (count - 1);
    }
    const chlab::FlowMap map =
        chlab::flow_map(handle, starts, fm.value("t", t1));
    std::ostringstream os;
    chlab::write_flow_map_csv(os, map);
    atomic_write(out_dir / "flow_map.csv", os.str());
  }
  return 0;
}

int cmd_kernel_check(const fs::path& out_dir, std::uint64_t seed) {
  json report;
  bool all_pass = true;
  for (const auto& [name, spec] :
       {std::pair{"CH", chlab::KernelSpec::camassa_holm()},
        std::pair{"HS", chlab::KernelSpec::hunter_saxton()}}) {
    const auto lip = chlab::verify_one_sided_lipschitz(spec, 10000, seed);
    std::mt19937_64 rng(seed + 1);
    std::uniform_real_distribution<double> pos(-5.0, 5.0);
    double max_recon_err = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double z = pos(rng);
      const double e = z + std::exp(pos(rng) * 0.5);
      const double y = pos(rng);
      const auto d = chlab::decompose_K(spec, z, e, y);
      const double quotient =
          (chlab::eval_A(spec, e, y) - chlab::eval_A(spec, z, y)) / (e - z);
      max_recon_err = std::max(max_recon_err, std::abs(d.sum() - quotient));
    }
    const bool pass = lip.pass && max_recon_err < 1e-12;
    all_pass = all_pass && pass;
    report[name] = {{"min_quotient", lip.min_quotient},
                    {"lipschitz_pass", lip.pass},
                    {"max_reconstruction_error", max_recon_err},
                    {"pass", pass}};
  }
  atomic_write(out_dir / "kernel_check.json", report.dump(2) + "\n");
  return all_pass ? 0 : 3;
}

int cmd_oracle_compare(const json& cfg, const fs::path& out_dir) {
  const json& src = cfg.at("source");
  const double p0 = src.value("p0", 2.0);
  const double q0 = src.value("q0", std::log(0.75));
  const auto params = chlab::derive_params(p0, q0);
  const double t_hi = 0.9 * params.t_collision;

  chlab::MultipeakonState st;
  st.q = {0.5 * q0, -0.5 * q0};
  st.p = {0.5 * p0, -0.5 * p0};
  chlab::SolutionHandle ode = chlab::make_multipeakon(st, t_hi);

  double max_err = 0.0;
  for (int i = 0; i <= 60; ++i) {
    const double t = t_hi * i / 60;
    for (int k = -80; k <= 80; ++k) {
      const double x = 0.1 * k;
      max_err = std::max(max_err,
                         std::abs(ode->u_at(t, x) -
                                  chlab::peakon_antipeakon_value(params, t, x)));
    }
  }
  const double tol =
      cfg.contains("tolerances")
          ? cfg.at("tolerances").value("oracle_sup_norm", 1e-5)
          : 1e-5;
  json report = {{"max_sup_norm_error", max_err},
                 {"tolerance", tol},
                 {"t_max_checked", t_hi},
                 {"pass", max_err <= tol}};
  atomic_write(out_dir / "oracle_compare.json", report.dump(2) + "\n");
  if (max_err > tol) {
    std::cerr << "oracle-compare: sup-norm error " << max_err
              << " exceeds tolerance " << tol << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for weak solutions of the Camassa-Holm "
               "and Hunter-Saxton equations"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", traj_path;
  std::uint64_t seed = 0;
  double refine = 1.0;
  app.add_option("--config", config_path, "scenario config (JSON)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for randomized probes");
  app.add_option("--refine", refine, "mesh/grid refinement factor");

  auto* sim = app.add_subcommand("simulate", "emit a trajectory file");
  auto* rep = app.add_subcommand("energy-report",
                                 "emit ledger CSVs and measure JSONs");
  rep->add_option("--trajectory", traj_path, "trajectory file")->required();
  auto* chars = app.add_subcommand("characteristics",
                                   "emit characteristic / flow-map CSVs");
  chars->add_option("--trajectory", traj_path, "trajectory file")->required();
  auto* kc = app.add_subcommand("kernel-check",
                                "verify kernel decomposition and bounds");
  auto* oc = app.add_subcommand("oracle-compare",
                                "compare ODE solver against closed forms");

  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(out_dir);
    if (kc->parsed()) return cmd_kernel_check(out_dir, seed);
    const json cfg = load_config(config_path);
    if (sim->parsed()) return cmd_simulate(cfg, out_dir, refine);
    if (rep->parsed()) {
      return cmd_energy_report(cfg, out_dir, traj_path, refine);
    }
    if (chars->parsed()) return cmd_characteristics(cfg, out_dir, traj_path);
    if (oc->parsed()) return cmd_oracle_compare(cfg, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const FileError& e) {
    std::cerr << "file error: " << e.what() << "\n";
    return 4;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
