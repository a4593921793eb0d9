// Batch front-end: every experiment is a subcommand that validates its
// parameters, runs one computation, writes a CSV artifact, and prints a short
// summary.  Exit status 2 flags invalid parameters or inputs (the message
// names the offending flag or file line); exit status 1 flags numerical
// failure (singular system near the discrete spectrum, carrying lambda/tau).
#include "CLI11.hpp"

#include "bsheat/assembly.hpp"
#include "bsheat/disk_oracle.hpp"
#include "bsheat/evolution.hpp"
#include "bsheat/linsolve.hpp"
#include "bsheat/mesh.hpp"
#include "bsheat/resolvent.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace bsheat;

struct MeshChoice {
  int rings = 8;
  std::string file;
};

void add_mesh_flags(CLI::App* sub, MeshChoice& choice) {
  auto* rings = sub->add_option("--rings", choice.rings, "structured disk mesh refinement")
                    ->check(CLI::PositiveNumber)
                    ->capture_default_str();
  auto* file = sub->add_option("--mesh", choice.file, "mesh text file (overrides --rings)");
  rings->excludes(file);
}

Mesh make_mesh(const MeshChoice& choice) {
  if (!choice.file.empty()) return load_mesh_file(choice.file);
  return build_disk_mesh(choice.rings);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("--out: cannot open '" + path + "' for writing");
  return out;
}

std::string trimmed(const std::string& text) {
  auto from = text.find_first_not_of(" \t\r");
  auto to = text.find_last_not_of(" \t\r");
  return from == std::string::npos ? std::string() : text.substr(from, to - from + 1);
}

// Expands every `--config <path>` in place into the flags the file encodes:
// one `key=value` per line (option names without the leading dashes), blank
// lines and # comments ignored.  Expansion happens before parsing, so file
// values satisfy required options and obey the same validation as flags.
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    std::size_t consumed = 0;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config: expected a file path");
      path = args[i + 1];
      consumed = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      consumed = 1;
    } else {
      continue;
    }
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("--config: cannot open '" + path + "'");
    std::vector<std::string> expanded;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string entry = trimmed(line);
      if (entry.empty() || entry[0] == '#') continue;
      auto eq = entry.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("--config: " + path + " line " + std::to_string(lineno) +
                                    ": expected key=value, got '" + entry + "'");
      expanded.push_back("--" + trimmed(entry.substr(0, eq)));
      expanded.push_back(trimmed(entry.substr(eq + 1)));
    }
    args.erase(args.begin() + long(i), args.begin() + long(i + consumed));
    args.insert(args.begin() + long(i), expanded.begin(), expanded.end());
    i += expanded.size();
    --i; // net of the loop increment: continue right after the insertion
  }
  return args;
}

void print_kv(const char* name, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  std::printf("%-12s %s\n", name, buf);
}

int run_mesh_info(const MeshChoice& choice, const std::string& out_path,
                  const std::string& save_path) {
  const Mesh mesh = make_mesh(choice);
  const TraceMap trace = trace_map(mesh);
  std::printf("%-12s %d\n", "nodes", mesh.num_nodes());
  std::printf("%-12s %d\n", "triangles", mesh.num_triangles());
  std::printf("%-12s %d\n", "boundary", mesh.num_boundary_nodes());
  print_kv("h", mesh.longest_edge());
  print_kv("area", mesh.total_area());
  print_kv("perimeter", trace.total_arc_length());

  auto out = open_output(out_path);
  out << "nodes,triangles,boundary_nodes,h,area,perimeter\n";
  char buf[192];
  std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.17g,%.17g,%.17g", mesh.num_nodes(),
                mesh.num_triangles(), mesh.num_boundary_nodes(), mesh.longest_edge(),
                mesh.total_area(), trace.total_arc_length());
  out << buf << '\n';
  if (!save_path.empty()) {
    auto save = open_output(save_path);
    save_mesh_text(mesh, save);
    std::printf("mesh written to %s\n", save_path.c_str());
  }
  return 0;
}

int run_constants(double k, double l, double c8, const std::string& out_path) {
  const ConstantsReport report = constants_report(k, l, c8);
  write_constants_text(report, std::cout);
  auto out = open_output(out_path);
  write_constants_csv(report, out);
  return 0;
}

int run_solve_elliptic(const MeshChoice& choice, double k, double l, double lambda_re,
                       double lambda_im, const std::string& rhs_kind, int mode_n,
                       const std::string& out_path) {
  const Mesh mesh = make_mesh(choice);
  const TraceMap trace = trace_map(mesh);
  const Pencil pencil = build_pencil(mesh, trace, k, l);
  const Eigen::VectorXd h = make_initial_state(mesh, rhs_kind, mode_n);
  const std::complex<double> lambda(lambda_re, lambda_im);
  const EllipticSolution sol = solve_resolvent(pencil, lambda, h);

  print_kv("re_lambda", lambda.real());
  print_kv("im_lambda", lambda.imag());
  print_kv("resid_bulk", sol.residual_bulk);
  print_kv("resid_bnd", sol.residual_boundary);
  print_kv("max_abs_u", sol.u.cwiseAbs().maxCoeff());

  auto out = open_output(out_path);
  out << "x,y,re_u,im_u\n";
  char buf[160];
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g", mesh.nodes(i, 0), mesh.nodes(i, 1),
                  sol.u[i].real(), sol.u[i].imag());
    out << buf << '\n';
  }
  return 0;
}

int run_evolve(const MeshChoice& choice, double k, double l, double tau, double T, double theta,
               const std::string& u0_kind, int mode_n, const std::string& out_path) {
  const Mesh mesh = make_mesh(choice);
  const TraceMap trace = trace_map(mesh);
  const Pencil pencil = build_pencil(mesh, trace, k, l);
  const GramSet grams = gram_set(mesh, trace);
  const Eigen::VectorXd u0 = make_initial_state(mesh, u0_kind, mode_n);
  const TimeSeries series = evolve(pencil, u0, tau, T, theta, grams);

  const std::size_t last = series.times.size() - 1;
  std::printf("%-12s %zu\n", "steps", last);
  print_kv("t_final", series.times[last]);
  print_kv("norm_H", series.norm_H[last]);
  print_kv("norm_H1", series.norm_H1_omega[last]);
  print_kv("conserved0", series.conserved.front());
  print_kv("conservedT", series.conserved.back());

  auto out = open_output(out_path);
  write_timeseries_csv(series, out);
  return 0;
}

int run_spectrum(const MeshChoice& choice, double k, double l, int cutoff,
                 const std::string& out_path) {
  const Mesh mesh = make_mesh(choice);
  const TraceMap trace = trace_map(mesh);
  const Pencil pencil = build_pencil(mesh, trace, k, l);
  const SpectrumReport report = generalized_eigs(pencil, mesh.longest_edge(), cutoff);

  double zero_mode = std::numeric_limits<double>::infinity();
  double worst_resid = 0.0;
  for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) {
    zero_mode = std::min(zero_mode, std::abs(report.eigenvalues[i]));
    worst_resid = std::max(worst_resid, report.residuals[i]);
  }
  std::printf("%-12s %zu\n", "finite", report.eigenvalues.size());
  std::printf("%-12s %d\n", "infinite", report.infinite_count);
  print_kv("sigma_max", report.sigma_max());
  print_kv("zero_mode", zero_mode);
  print_kv("max_resid", worst_resid);

  auto out = open_output(out_path);
  write_spectrum_csv(report, out);
  return 0;
}

int run_dispersion(double k, double l, int n_max, double mu_max, const std::string& out_path) {
  const auto roots = oracle::dispersion_roots(k, l, n_max, mu_max);
  int growing = 0;
  double sigma_max = 0.0;
  for (const auto& r : roots)
    if (r.sigma > 0.0) {
      ++growing;
      sigma_max = std::max(sigma_max, r.sigma);
    }
  std::printf("%-12s %zu\n", "roots", roots.size());
  std::printf("%-12s %d\n", "growing", growing);
  print_kv("sigma_max", sigma_max);

  auto out = open_output(out_path);
  oracle::write_dispersion_csv(roots, out);
  return 0;
}

int run_l_limit(const MeshChoice& choice, double k, const std::vector<double>& l_list, double tau,
                double T, double theta, const std::string& u0_kind, int mode_n,
                const std::string& out_path) {
  const Mesh mesh = make_mesh(choice);
  const Eigen::VectorXd u0 = make_initial_state(mesh, u0_kind, mode_n);
  const auto rows = l_limit_experiment(mesh, k, l_list, u0, tau, T, theta);
  std::printf("%-20s %-24s %s\n", "l", "peak_norm_H1", "predicted_sigma_max");
  for (const auto& row : rows)
    std::printf("%-20.12g %-24.17g %.12g\n", row.l, row.peak_norm_H1, row.predicted_sigma_max);

  auto out = open_output(out_path);
  write_l_limit_csv(rows, out);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"coupled bulk-surface heat flow toolbox (unit disk and custom meshes)"};
  app.require_subcommand(1);

  // mesh-info ---------------------------------------------------------------
  auto* mesh_info = app.add_subcommand("mesh-info", "mesh statistics and optional re-export");
  MeshChoice mi_mesh;
  std::string mi_out = "mesh-info.csv", mi_save;
  add_mesh_flags(mesh_info, mi_mesh);
  mesh_info->add_option("--out", mi_out, "CSV output path")->capture_default_str();
  mesh_info->add_option("--save", mi_save, "write the mesh back in text format");

  // constants ---------------------------------------------------------------
  auto* constants = app.add_subcommand("constants", "explicit coercivity constants");
  double co_k = 0.0, co_l = 0.0, co_c8 = 1.0;
  std::string co_out = "constants.csv";
  constants->add_option("--k", co_k, "boundary flux coefficient (nonzero)")->required();
  constants->add_option("--l", co_l, "surface diffusion coefficient (> 0)")->required();
  constants->add_option("--c8", co_c8, "configured domain constant")->capture_default_str();
  constants->add_option("--out", co_out, "CSV output path")->capture_default_str();

  // solve-elliptic ----------------------------------------------------------
  auto* elliptic = app.add_subcommand("solve-elliptic", "resolvent solve at one lambda");
  MeshChoice el_mesh;
  double el_k = 0.0, el_l = 0.0, el_lambda = 0.0, el_lambda_im = 0.0;
  std::string el_rhs = "gaussian", el_out = "solution.csv";
  int el_mode = 1;
  add_mesh_flags(elliptic, el_mesh);
  elliptic->add_option("--k", el_k, "boundary flux coefficient (nonzero)")->required();
  elliptic->add_option("--l", el_l, "surface diffusion coefficient (> 0)")->required();
  elliptic->add_option("--lambda", el_lambda, "shift, real part")->required();
  elliptic->add_option("--lambda-im", el_lambda_im, "shift, imaginary part")->capture_default_str();
  elliptic->add_option("--rhs", el_rhs, "data: constant, harmonic, gaussian")->capture_default_str();
  elliptic->add_option("--mode-n", el_mode, "angular mode for harmonic data")->capture_default_str();
  elliptic->add_option("--out", el_out, "CSV output path")->capture_default_str();

  // evolve ------------------------------------------------------------------
  auto* evolve_cmd = app.add_subcommand("evolve", "theta-scheme time evolution");
  MeshChoice ev_mesh;
  double ev_k = 0.0, ev_l = 0.0, ev_tau = 0.0, ev_T = 0.0, ev_theta = 1.0;
  std::string ev_u0 = "gaussian", ev_out = "timeseries.csv";
  int ev_mode = 1;
  add_mesh_flags(evolve_cmd, ev_mesh);
  evolve_cmd->add_option("--k", ev_k, "boundary flux coefficient (nonzero)")->required();
  evolve_cmd->add_option("--l", ev_l, "surface diffusion coefficient (> 0)")->required();
  evolve_cmd->add_option("--tau", ev_tau, "time step (> 0)")->required();
  evolve_cmd->add_option("--T", ev_T, "horizon (>= tau)")->required();
  evolve_cmd->add_option("--theta", ev_theta, "scheme parameter in [0.5, 1]")->capture_default_str();
  evolve_cmd->add_option("--u0", ev_u0, "initial state: constant, harmonic, gaussian")
      ->capture_default_str();
  evolve_cmd->add_option("--mode-n", ev_mode, "angular mode for harmonic data")->capture_default_str();
  evolve_cmd->add_option("--out", ev_out, "CSV output path")->capture_default_str();

  // spectrum ----------------------------------------------------------------
  auto* spectrum = app.add_subcommand("spectrum", "complete generalized eigensolution");
  MeshChoice sp_mesh;
  double sp_k = 0.0, sp_l = 0.0;
  int sp_cutoff = 3000;
  std::string sp_out = "spectrum.csv";
  add_mesh_flags(spectrum, sp_mesh);
  spectrum->add_option("--k", sp_k, "boundary flux coefficient (nonzero)")->required();
  spectrum->add_option("--l", sp_l, "surface diffusion coefficient (> 0)")->required();
  spectrum->add_option("--cutoff", sp_cutoff, "dense size limit")->capture_default_str();
  spectrum->add_option("--out", sp_out, "CSV output path")->capture_default_str();

  // dispersion ---------------------------------------------------------------
  auto* dispersion = app.add_subcommand("dispersion", "disk dispersion-relation roots");
  double di_k = 0.0, di_l = 0.0, di_mu_max = 30.0;
  int di_n_max = 8;
  std::string di_out = "dispersion.csv";
  dispersion->add_option("--k", di_k, "boundary flux coefficient (nonzero)")->required();
  dispersion->add_option("--l", di_l, "surface diffusion coefficient (> 0)")->required();
  dispersion->add_option("--n-max", di_n_max, "largest angular mode")->capture_default_str();
  dispersion->add_option("--mu-max", di_mu_max, "scan limit in mu (<= 30)")->capture_default_str();
  dispersion->add_option("--out", di_out, "CSV output path")->capture_default_str();

  // l-limit -----------------------------------------------------------------
  auto* l_limit = app.add_subcommand("l-limit", "peak-norm sweep as l decreases");
  MeshChoice ll_mesh;
  double ll_k = 0.0, ll_tau = 0.0, ll_T = 0.0, ll_theta = 1.0;
  std::vector<double> ll_list;
  std::string ll_u0 = "gaussian", ll_out = "l-limit.csv";
  int ll_mode = 1;
  add_mesh_flags(l_limit, ll_mesh);
  l_limit->add_option("--k", ll_k, "boundary flux coefficient (nonzero)")->required();
  l_limit->add_option("--l-list", ll_list, "strictly decreasing positive values")
      ->required()
      ->delimiter(',');
  l_limit->add_option("--tau", ll_tau, "time step (> 0)")->required();
  l_limit->add_option("--T", ll_T, "horizon (>= tau)")->required();
  l_limit->add_option("--theta", ll_theta, "scheme parameter in [0.5, 1]")->capture_default_str();
  l_limit->add_option("--u0", ll_u0, "initial state: constant, harmonic, gaussian")
      ->capture_default_str();
  l_limit->add_option("--mode-n", ll_mode, "angular mode for harmonic data")->capture_default_str();
  l_limit->add_option("--out", ll_out, "CSV output path")->capture_default_str();

  app.footer("Every subcommand also accepts --config <path>: a flat key=value file\n"
             "(option names without the leading dashes) expanded in place of the flag.");

  try {
    std::vector<std::string> args = expand_config_args(argc, argv);
    std::vector<const char*> argv_expanded;
    argv_expanded.push_back(argv[0]);
    for (const auto& arg : args) argv_expanded.push_back(arg.c_str());
    app.parse(int(argv_expanded.size()), argv_expanded.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return 2;
  }

  try {
    if (mesh_info->parsed()) return run_mesh_info(mi_mesh, mi_out, mi_save);
    if (constants->parsed()) return run_constants(co_k, co_l, co_c8, co_out);
    if (elliptic->parsed())
      return run_solve_elliptic(el_mesh, el_k, el_l, el_lambda, el_lambda_im, el_rhs, el_mode,
                                el_out);
    if (evolve_cmd->parsed())
      return run_evolve(ev_mesh, ev_k, ev_l, ev_tau, ev_T, ev_theta, ev_u0, ev_mode, ev_out);
    if (spectrum->parsed()) return run_spectrum(sp_mesh, sp_k, sp_l, sp_cutoff, sp_out);
    if (dispersion->parsed()) return run_dispersion(di_k, di_l, di_n_max, di_mu_max, di_out);
    if (l_limit->parsed())
      return run_l_limit(ll_mesh, ll_k, ll_list, ll_tau, ll_T, ll_theta, ll_u0, ll_mode, ll_out);
  } catch (const SingularSystemError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const StepSizeError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const oracle::RadialSingularError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const MeshError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const AssemblyError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
