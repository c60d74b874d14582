// bikelab command-line front end.
//
// Exit codes: 0 success or all checks passed, 1 check failure or numerical
// error, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bikelab/curve.hpp"
#include "bikelab/curve_io.hpp"
#include "bikelab/discrete.hpp"
#include "bikelab/experiments.hpp"
#include "bikelab/flows.hpp"
#include "bikelab/invariants.hpp"
#include "bikelab/smooth.hpp"
#include "bikelab/svg.hpp"

using namespace bikelab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty())
    std::cout << text;
  else
    write_text_file(out, text);
}

// "lo:hi:n" -> n evenly spaced values including both ends.
std::vector<double> parse_grid(const std::string& spec, const std::string& flag) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw UsageError(flag + ": expected lo:hi:n, got '" + spec + "'");
  double lo = 0, hi = 0;
  long n = 0;
  try {
    lo = std::stod(parts[0]);
    hi = std::stod(parts[1]);
    n = std::stol(parts[2]);
  } catch (const std::exception&) {
    throw UsageError(flag + ": expected lo:hi:n, got '" + spec + "'");
  }
  if (n < 1) throw UsageError(flag + ": n must be >= 1");
  std::vector<double> g(n);
  for (long i = 0; i < n; ++i) g[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

Vec parse_point(const std::string& s, int dim, const std::string& flag) {
  std::vector<double> v;
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ',');) {
    try {
      v.push_back(std::stod(p));
    } catch (const std::exception&) {
      throw UsageError(flag + ": expected comma-separated numbers, got '" + s + "'");
    }
  }
  if (static_cast<int>(v.size()) != dim) throw UsageError(flag + ": expected " + std::to_string(dim) + " coordinates");
  return Vec(v[0], v[1], dim == 3 ? v[2] : 0.0);
}

Json fixed_points_json(const MonodromyClass& c, int dim) {
  Json fps = Json::array();
  for (const auto& fp : c.fixed_points)
    fps.push_back({{"direction", vec_to_json(fp.direction, dim)},
                   {"multiplier", {fp.multiplier.real(), fp.multiplier.imag()}}});
  return fps;
}

Json matrix_json(const Mat2c& m) {
  Json rows = Json::array();
  for (int i = 0; i < 2; ++i) {
    Json row = Json::array();
    for (int j = 0; j < 2; ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

Json monodromy_json(const SampledCurve& c, double lambda) {
  const auto m = monodromy(c, lambda);
  Json j;
  j["lambda"] = lambda;
  j["class"] = to_string(m.classification.kind);
  j["tr2_over_det"] = m.classification.trace_invariant.real();
  if (c.dim() == 3) j["tr2_over_det_imag"] = m.classification.trace_invariant.imag();
  j["fixed_points"] = fixed_points_json(m.classification, c.dim());
  j["residual"] = m.fit_residual;
  j["identity_distance"] = m.classification.identity_distance;
  if (c.dim() == 2) j["route_gap"] = m.route_gap;
  j["matrix"] = matrix_json(m.map.matrix());
  if (m.map.log_scale() != 0.0) j["matrix_log_scale"] = m.map.log_scale();
  return j;
}

std::string flow_csv(const FlowResult& r, int dim) {
  std::ostringstream out;
  out << "step,t,F1,F2,F3,F4,F5";
  const std::vector<std::pair<int, int>> pairs =
      dim == 3 ? std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}} : std::vector<std::pair<int, int>>{{0, 1}};
  for (const auto& [i, j] : pairs) out << ",A" << i + 1 << j + 1;
  for (int k = 0; k < dim; ++k) out << ",J" << k + 1;
  out << '\n';
  for (const auto& e : r.log) {
    out << e.step << ',' << fmt(e.t);
    for (double v : e.integrals.values()) out << ',' << fmt(v);
    for (const auto& [i, j] : pairs) out << ',' << fmt(e.A(i, j));
    for (int k = 0; k < dim; ++k) out << ',' << fmt(e.J[k]);
    out << '\n';
  }
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bikelab: bicycle transformation, monodromy and filament hierarchy toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a test curve");
  std::string kind = "circle", out;
  CurveParams cp;
  gen->add_option("--kind", kind, "circle | ellipse | torus_knot | fourier_perturbed")
      ->check(CLI::IsMember({"circle", "ellipse", "torus_knot", "fourier_perturbed"}));
  gen->add_option("--r", cp.r, "circle or base radius");
  gen->add_option("--a", cp.a, "ellipse semi-axis along x");
  gen->add_option("--b", cp.b, "ellipse semi-axis along y");
  gen->add_option("--R", cp.R, "torus knot major radius");
  gen->add_option("--minor", cp.minor, "torus knot minor radius");
  gen->add_option("--p", cp.p, "torus knot p");
  gen->add_option("--q", cp.q, "torus knot q");
  gen->add_option("--n", cp.n, "number of samples")->check(CLI::PositiveNumber);
  gen->add_option("--seed", cp.seed, "seed for fourier_perturbed");
  gen->add_option("--amp", cp.amp, "perturbation amplitude");
  gen->add_option("--dim", cp.dim, "2 or 3")->check(CLI::IsMember({2, 3}));
  gen->add_option("--out", out, "output curve JSON (default stdout)");

  // discrete-transform
  auto* dt_cmd = app.add_subcommand("discrete-transform", "Discrete bicycle transformation of a polygon");
  std::string polygon_path, q1_text;
  double d = 0.0;
  bool fixed_start = false;
  dt_cmd->add_option("--polygon", polygon_path, "polygon JSON")->required();
  dt_cmd->add_option("--d", d, "segment length 2l")->required()->check(CLI::PositiveNumber);
  dt_cmd->add_option("--q1", q1_text, "start point Q1 as x,y[,z]");
  dt_cmd->add_flag("--fixed", fixed_start, "start from a fixed point of the discrete monodromy");
  dt_cmd->add_option("--out", out, "output JSON");

  // monodromy
  auto* mono = app.add_subcommand("monodromy", "Bicycle monodromy of a closed curve");
  std::string curve_path, scan;
  double lambda = 0.0;
  mono->add_option("--curve", curve_path, "curve JSON")->required();
  auto* lambda_opt = mono->add_option("--lambda", lambda, "bicycle length")->check(CLI::PositiveNumber);
  auto* scan_opt = mono->add_option("--scan", scan, "lambda grid lo:hi:n");
  lambda_opt->excludes(scan_opt);
  mono->add_option("--out", out, "output JSON");

  // partner
  auto* partner = app.add_subcommand("partner", "Bicycle partner curve (chord 2l)");
  double ell = 0.0;
  int branch = 0;
  std::string plot_path;
  partner->add_option("--curve", curve_path, "curve JSON")->required();
  partner->add_option("--l", ell, "bicycle length l")->required()->check(CLI::PositiveNumber);
  partner->add_option("--branch", branch, "0 attracting, 1 repelling")->check(CLI::IsMember({0, 1}));
  partner->add_option("--out", out, "output curve JSON");
  partner->add_option("--plot", plot_path, "SVG of both curves");

  // invariants
  auto* inv = app.add_subcommand("invariants", "F1..F5, A and J of a curve");
  inv->add_option("--curve", curve_path, "curve JSON")->required();
  inv->add_option("--out", out, "output JSON");

  // scan-lambda
  auto* scan_cmd = app.add_subcommand("scan-lambda", "CSV of lambda, Tr^2/det, int cos(alpha) dx");
  std::string grid_text = "0.05:0.8:16";
  scan_cmd->add_option("--curve", curve_path, "curve JSON")->required();
  scan_cmd->add_option("--grid", grid_text, "lo:hi:n");
  scan_cmd->add_option("--out", out, "output CSV");

  // flow
  auto* flow = app.add_subcommand("flow", "Evolve a curve by a hierarchy flow");
  std::string field = "filament", log_path;
  double dt = 1e-3;
  int steps = 100, cadence = 10;
  flow->add_option("--curve", curve_path, "curve JSON")->required();
  flow->add_option("--field", field, "filament | planar_filament | hierarchy_<n>");
  flow->add_option("--dt", dt, "time step")->check(CLI::PositiveNumber);
  flow->add_option("--steps", steps, "number of steps")->check(CLI::PositiveNumber);
  flow->add_option("--cadence", cadence, "resample every this many steps (0 = never)")->check(CLI::NonNegativeNumber);
  flow->add_option("--log", log_path, "conservation log CSV");
  flow->add_option("--out", out, "final curve JSON");

  // verify
  auto* verify = app.add_subcommand("verify", "Run a theorem check or conjecture probe");
  std::string check, suite_name = "theorems";
  std::uint64_t seed = 1;
  int dim = 2, trials = 6;
  verify->add_option("check", check, "check name, or 'all'")->required();
  verify->add_option("--curve", curve_path, "curve JSON (default: seeded perturbed circle)");
  verify->add_option("--l", ell, "bicycle length l")->check(CLI::PositiveNumber);
  verify->add_option("--lambda", lambda, "second length / monodromy parameter")->check(CLI::PositiveNumber);
  verify->add_option("--d", d, "chord length for zindler checks")->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed, "seed for random fields and default curves");
  verify->add_option("--dim", dim, "dimension of the default curve")->check(CLI::IsMember({2, 3}));
  verify->add_option("--trials", trials, "random field pairs")->check(CLI::PositiveNumber);
  verify->add_option("--suite", suite_name, "theorems | probes (with 'all')")
      ->check(CLI::IsMember({"theorems", "probes"}));
  verify->add_option("--out", out, "report JSON");

  // plot
  auto* plot = app.add_subcommand("plot", "SVG of a curve, its rear track or its partner");
  std::string plot_kind = "curve";
  plot->add_option("--curve", curve_path, "curve JSON")->required();
  plot->add_option("--kind", plot_kind, "curve | rear | partner")->check(CLI::IsMember({"curve", "rear", "partner"}));
  plot->add_option("--l", ell, "bicycle length for rear/partner")->check(CLI::PositiveNumber);
  plot->add_option("--branch", branch, "0 attracting, 1 repelling")->check(CLI::IsMember({0, 1}));
  plot->add_option("--plot", plot_path, "output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      cp.n = cp.n == 0 ? 512 : cp.n;
      emit(dump_json(curve_to_json(make_curve(kind, cp))) + "\n", out);
      return kExitOk;
    }

    if (*dt_cmd) {
      const Polygon p = read_polygon_file(polygon_path);
      Vec q1;
      if (fixed_start) {
        const auto starts = discrete_fixed_starts(p, d);
        if (starts.empty()) throw Error(ErrorCode::NoPeriodicSolution, "discrete monodromy has no fixed point");
        q1 = starts.front();
      } else if (!q1_text.empty()) {
        q1 = parse_point(q1_text, p.dim(), "--q1");
      } else {
        throw UsageError("--q1: required unless --fixed is given");
      }
      const auto t = transform_polygon(p, q1, d);
      Json j;
      j["polygon"] = polygon_to_json(t.polygon);
      j["end_point"] = vec_to_json(t.end_point, p.dim());
      j["closure_defect"] = t.closure_defect;
      j["near_collinear_steps"] = t.near_collinear_steps;
      try {
        const auto fit = discrete_monodromy(p, d);
        j["monodromy"] = {{"class", to_string(fit.classification.kind)},
                          {"tr2_over_det", fit.classification.trace_invariant.real()},
                          {"fixed_points", fixed_points_json(fit.classification, p.dim())},
                          {"residual", fit.residual},
                          {"matrix", matrix_json(fit.map.matrix())}};
      } catch (const Error& e) {
        j["monodromy"] = {{"error", e.what()}};
      }
      emit(dump_json(j) + "\n", out);
      return kExitOk;
    }

    if (*mono) {
      const auto scan_grid = scan.empty() ? std::vector<double>{} : parse_grid(scan, "--scan");
      if (scan.empty() && lambda_opt->count() == 0) throw UsageError("--lambda: required unless --scan is given");
      const SampledCurve c = read_curve_file(curve_path);
      if (!scan.empty()) {
        Json rows = Json::array();
        for (double l : scan_grid) {
          try {
            rows.push_back(monodromy_json(c, l));
          } catch (const Error& e) {
            rows.push_back({{"lambda", l}, {"error", e.what()}});
          }
        }
        emit(dump_json(rows) + "\n", out);
      } else {
        emit(dump_json(monodromy_json(c, lambda)) + "\n", out);
      }
      return kExitOk;
    }

    if (*partner) {
      const SampledCurve c = read_curve_file(curve_path);
      const SampledCurve p = bicycle_partner(c, ell, branch);
      emit(dump_json(curve_to_json(p)) + "\n", out);
      if (!plot_path.empty()) write_text_file(plot_path, plot_partners(c, p));
      return kExitOk;
    }

    if (*inv) {
      const SampledCurve c = read_curve_file(curve_path);
      const auto F = filament_integrals(c);
      const auto ac = area_centroid(c);
      Json j;
      j["F1"] = F.F1;
      j["F2"] = F.F2;
      j["F3"] = F.F3;
      j["F4"] = F.F4;
      j["F5"] = F.F5;
      j["flagged_samples"] = F.flagged_samples;
      Json A = Json::array();
      for (int i = 0; i < c.dim(); ++i) {
        Json row = Json::array();
        for (int k = 0; k < c.dim(); ++k) row.push_back(ac.A(i, k));
        A.push_back(row);
      }
      j["A"] = A;
      j["J"] = vec_to_json(ac.J, c.dim());
      j["zero_area"] = ac.zero_area;
      if (ac.center_of_mass) j["center_of_mass"] = vec_to_json(*ac.center_of_mass, 2);
      emit(dump_json(j) + "\n", out);
      return kExitOk;
    }

    if (*scan_cmd) {
      const auto grid = parse_grid(grid_text, "--grid");
      const SampledCurve c = read_curve_file(curve_path);
      const auto sp = c.dim() == 2 ? cos_alpha_spectrum(c, grid) : monodromy_spectrum(c, grid);
      std::ostringstream csv;
      csv << "lambda,tr2_over_det,I\n";
      for (const auto& p : sp.points) csv << fmt(p.lambda) << ',' << fmt(p.trace_invariant) << ',' << fmt(p.integral_cos_alpha) << '\n';
      emit(csv.str(), out);
      for (const auto& w : sp.warnings) std::cerr << "warning: " << w << '\n';
      return kExitOk;
    }

    if (*flow) {
      const SampledCurve c = read_curve_file(curve_path);
      FlowSpec spec;
      try {
        spec = FlowSpec::named(field, dt, steps);
      } catch (const Error&) {
        throw UsageError("--field: unknown field '" + field + "'");
      }
      spec.resample_every = cadence;
      const auto r = evolve(c, spec);
      if (!log_path.empty()) write_text_file(log_path, flow_csv(r, c.dim()));
      emit(dump_json(curve_to_json(r.curve)) + "\n", out);
      return kExitOk;
    }

    if (*verify) {
      std::vector<CheckReport> reports;
      if (check == "all") {
        for (const auto& e : suite(suite_name)) reports.push_back(e.run());
      } else {
        auto curve = [&]() {
          if (!curve_path.empty()) return read_curve_file(curve_path);
          FourierPerturbation fp;
          fp.seed = seed;
          fp.amplitude = 0.05;
          fp.dim = dim;
          return make_fourier_perturbed(fp, 1024);
        };
        auto need = [](double v, const char* flag) {
          if (!(v > 0.0)) throw UsageError(std::string(flag) + ": required for this check");
          return v;
        };
        if (check == "mono-moebius") {
          reports.push_back(check_mono_moebius(curve(), need(lambda, "--lambda")));
        } else if (check == "discrete-moebius") {
          reports.push_back(check_discrete_moebius(as_polygon(curve()), need(d, "--d")));
        } else if (check == "mono-conjugacy") {
          std::vector<double> grid;
          for (int k = 0; k < 8; ++k) grid.push_back(0.2 + 0.1 * k);
          reports.push_back(check_mono_conjugacy(curve(), need(ell, "--l"), grid));
        } else if (check == "bisymp") {
          reports.push_back(check_bisymp(curve(), need(ell, "--l"), trials, seed));
        } else if (check == "theorem-int") {
          reports.push_back(check_theorem_int(curve(), need(ell, "--l")));
        } else if (check == "other-integrals") {
          reports.push_back(check_other_integrals(curve(), need(ell, "--l")));
        } else if (check == "bianchi") {
          reports.push_back(check_bianchi(curve(), need(ell, "--l"), need(lambda, "--lambda")));
        } else if (check == "zindler") {
          reports.push_back(check_zindler(curve(), need(d, "--d")));
        } else if (check == "zflow") {
          reports.push_back(check_zflow(curve(), need(d, "--d"), FlowSpec::planar_filament(1e-3, 100)));
        } else if (check == "lemma-proj") {
          reports.push_back(check_lemma_proj(curve(), Vec(0.3, -0.5, 0.8), trials, seed));
        } else if (check == "sigma") {
          reports.push_back(check_sigma(curve(), need(lambda, "--lambda")));
        } else if (check == "recursion") {
          reports.push_back(check_recursion(curve()));
        } else if (check == "probe-commute") {
          reports.push_back(probe_conjecture_commute(resample_arclength(curve(), 64)));
        } else if (check == "probe-depend") {
          std::vector<double> grid;
          for (int k = 1; k <= 8; ++k) grid.push_back(0.1 * k);
          reports.push_back(probe_conjecture_depend(10, seed, grid));
        } else if (check == "circle-identity") {
          reports.push_back(probe_circle_identity(1.0, 3));
        } else if (check == "soliton") {
          reports.push_back(probe_soliton(curve(), FlowSpec::filament(1e-3, 100)));
        } else {
          throw UsageError("check: unknown check '" + check + "'");
        }
      }
      bool ok = true;
      Json j;
      if (reports.size() == 1) {
        j = reports.front().to_json();
      } else {
        j = Json::array();
        for (const auto& r : reports) j.push_back(r.to_json());
      }
      for (const auto& r : reports) ok = ok && r.pass();
      emit(dump_json(j) + "\n", out);
      return ok ? kExitOk : kExitFail;
    }

    if (*plot) {
      const SampledCurve c = read_curve_file(curve_path);
      std::string svg;
      if (plot_kind == "curve") {
        svg = plot_curve(c);
      } else {
        if (!(ell > 0.0)) throw UsageError("--l: required for --kind " + plot_kind);
        svg = plot_kind == "rear" ? plot_rear_track(c, rear_track(c, ell, branch))
                                  : plot_partners(c, bicycle_partner(c, ell, branch));
      }
      write_text_file(plot_path, svg);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}
