// Command line front end.  Each subcommand reads a scenario file and writes a
// CSV or SVG artifact; see README for the scenario grammar.
//
// Exit codes: 0 success, 2 validation error (bad arguments or scenario),
// 3 numerical failure (an analysis threw after validation passed).

#include <cstdlib>
#include <cxxabi.h>
#include <future>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "pwhs/cycles.hpp"
#include "pwhs/export.hpp"
#include "pwhs/flow.hpp"
#include "pwhs/regularize.hpp"
#include "pwhs/scenario.hpp"
#include "pwhs/switching.hpp"

namespace {

using namespace pwhs;

std::string error_name(const std::exception& e) {
  int status = 0;
  char* dem = abi::__cxa_demangle(typeid(e).name(), nullptr, nullptr, &status);
  std::string name = status == 0 && dem ? dem : typeid(e).name();
  std::free(dem);
  size_t pos = name.rfind("::");
  return pos == std::string::npos ? name : name.substr(pos + 2);
}

int thread_budget() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PWHS_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<int>(std::min<long>(v, hw));
  }
  return static_cast<int>(hw);
}

TransitionFunction scenario_phi(const Scenario& sc, const std::string& key) {
  std::string kind = sc.get_or(key, "cubic");
  TransitionFunction phi;
  if (kind == "cubic")
    phi.kind = TransitionKind::PolyCubic;
  else if (kind == "quintic")
    phi.kind = TransitionKind::PolyQuintic;
  else if (kind == "tanh")
    phi.kind = TransitionKind::Tanh;
  else if (kind == "arctan")
    phi.kind = TransitionKind::ArctanScaled;
  else
    throw ScenarioError("unknown transition function '" + kind + "'");
  return phi;
}

IntegratorOptions scenario_integrator(const Scenario& sc) {
  IntegratorOptions opt;
  opt.rel_tol = sc.get_double_or("integrator.rel_tol", opt.rel_tol);
  opt.abs_tol = sc.get_double_or("integrator.abs_tol", opt.abs_tol);
  opt.t_max = sc.get_double_or("integrator.t_max", opt.t_max);
  return opt;
}

struct OutputSpec {
  std::string path;
  std::string format = "csv";
};

int run_classify(const Scenario& sc, const OutputSpec& out) {
  PWSystem sys = scenario_system(sc);
  double s_lo = sc.get_double("classify.s_lo");
  double s_hi = sc.get_double("classify.s_hi");
  int resolution = sc.get_int_or("classify.resolution", 2001);
  RegionReport rep = classify_regions(sys, s_lo, s_hi, resolution);

  if (out.format == "svg") {
    write_portrait_svg(out.path, sys, {}, &rep);
    return 0;
  }
  std::vector<CsvRow> rows = region_rows(rep);
  for (double t : rep.tangency_points) {
    try {
      TangencyReport tr = classify_tangency(sys, sys.line.point_at(t));
      rows.push_back({"pairing", fmt_num(t), fmt_num(t), to_string(tr.pairing)});
    } catch (const Error&) {
      rows.push_back({"pairing", fmt_num(t), fmt_num(t), "unresolved"});
    }
  }
  write_csv(out.path, {"kind", "lo", "hi", "class"}, rows);
  return 0;
}

int run_portrait(const Scenario& sc, const OutputSpec& out) {
  PWSystem sys = scenario_system(sc);
  IntegratorOptions opt = scenario_integrator(sc);
  opt.t_max = sc.get_double_or("portrait.t_max", 50.0);

  std::vector<Complex> seeds;
  for (int k = 1; sc.has("portrait.seed." + std::to_string(k)); ++k)
    seeds.push_back(sc.get_complex("portrait.seed." + std::to_string(k)));
  if (seeds.empty()) throw ScenarioError("portrait: need at least portrait.seed.1");

  int budget = thread_budget();
  std::vector<Trajectory> trajs(seeds.size());
  std::vector<std::string> failures(seeds.size());
  for (size_t base = 0; base < seeds.size(); base += budget) {
    std::vector<std::future<void>> batch;
    for (size_t i = base; i < seeds.size() && i < base + budget; ++i) {
      batch.push_back(std::async(std::launch::async, [&, i] {
        try {
          trajs[i] = integrate(sys, seeds[i], opt);
        } catch (const Error& e) {
          failures[i] = e.what();
        }
      }));
    }
    for (auto& f : batch) f.get();
  }
  for (size_t i = 0; i < seeds.size(); ++i)
    if (!failures[i].empty())
      throw IntegrationFailure("portrait seed " + std::to_string(i + 1) + ": " +
                               failures[i]);

  if (out.format == "svg") {
    RegionReport rep;
    const RegionReport* rp = nullptr;
    if (sc.has("classify.s_lo") && sc.has("classify.s_hi")) {
      rep = classify_regions(sys, sc.get_double("classify.s_lo"),
                             sc.get_double("classify.s_hi"),
                             sc.get_int_or("classify.resolution", 2001));
      rp = &rep;
    }
    write_portrait_svg(out.path, sys, trajs, rp);
  } else {
    write_trajectories_csv(out.path, trajs);
  }
  return 0;
}

std::vector<CsvRow> cycle_summary_rows(const CycleResult& cyc) {
  std::vector<CsvRow> rows;
  rows.push_back({"A", fmt_num(cyc.map.A)});
  rows.push_back({"B", fmt_num(cyc.map.B)});
  if (cyc.map.fixed_point)
    rows.push_back({"fixed_point", fmt_num(*cyc.map.fixed_point)});
  rows.push_back({"derivative", fmt_num(cyc.map.derivative)});
  rows.push_back({"stability", to_string(cyc.map.stability)});
  rows.push_back({"w0", fmt_num(cyc.w0)});
  rows.push_back({"other_crossing", fmt_num(cyc.other_crossing)});
  rows.push_back({"period", fmt_num(cyc.period)});
  rows.push_back({"closure", fmt_num(cyc.closure)});
  return rows;
}

int run_cycle(const Scenario& sc, const OutputSpec& out) {
  std::string family = sc.get("cycle.family");
  IntegratorOptions opt = scenario_integrator(sc);

  if (family == "linear") {
    PoincareResult pr = linear_poincare(sc.get_double("cycle.a"), sc.get_double("cycle.b"),
                                        sc.get_double("cycle.c"), sc.get_double("cycle.d"),
                                        sc.get_double("cycle.x0"));
    std::vector<CsvRow> rows;
    rows.push_back({"A", fmt_num(pr.A)});
    rows.push_back({"B", fmt_num(pr.B)});
    if (pr.fixed_point) rows.push_back({"fixed_point", fmt_num(*pr.fixed_point)});
    rows.push_back({"derivative", fmt_num(pr.derivative)});
    rows.push_back({"stability", to_string(pr.stability)});
    write_csv(out.path, {"quantity", "value"}, rows);
    return 0;
  }

  CycleResult cyc;
  if (family == "power") {
    cyc = zn_cycle(sc.get_int("cycle.n"), sc.get_int_or("cycle.m", sc.get_int("cycle.n") % 2),
                   sc.get_double("cycle.a"), sc.get_double("cycle.b"),
                   sc.get_double("cycle.d"), sc.get_double_or("cycle.x0", 0.0),
                   sc.get_double("cycle.y0"), opt);
  } else if (family == "pole") {
    cyc = pole_cycle(sc.get_int("cycle.n"), sc.get_int_or("cycle.m", sc.get_int("cycle.n") % 2),
                     sc.get_double("cycle.a"), sc.get_double("cycle.b"),
                     sc.get_double("cycle.d"), sc.get_double("cycle.y0"), opt);
  } else if (family == "shooting") {
    PWSystem sys = scenario_system(sc);
    ShootingResult sr = shooting_fixed_point(sys, sc.get_double("cycle.bracket_lo"),
                                             sc.get_double("cycle.bracket_hi"), opt);
    std::vector<CsvRow> rows;
    rows.push_back({"w0", fmt_num(sr.w0)});
    rows.push_back({"derivative", fmt_num(sr.derivative)});
    rows.push_back({"stability", to_string(sr.stability)});
    write_csv(out.path, {"quantity", "value"}, rows);
    return 0;
  } else {
    throw ScenarioError("cycle.family must be linear, power, pole, or shooting");
  }

  if (out.format == "svg") {
    write_curve_svg(out.path, cyc.orbit);
  } else {
    std::vector<CsvRow> rows = cycle_summary_rows(cyc);
    for (const Complex& z : cyc.orbit)
      rows.push_back({fmt_num(z.real()), fmt_num(z.imag())});
    write_csv(out.path, {"quantity", "value"}, rows);
  }
  return 0;
}

int run_homoclinic(const Scenario& sc, const OutputSpec& out) {
  std::string fam = sc.get("homoclinic.family");
  HomoclinicFamily family;
  if (fam == "pole")
    family = HomoclinicFamily::PoleFamily;
  else if (fam == "power")
    family = HomoclinicFamily::PowerFamily;
  else
    throw ScenarioError("homoclinic.family must be pole or power");
  int n = sc.get_int("homoclinic.n");
  HomoclinicResult res = homoclinic(n, sc.get_int_or("homoclinic.m", n % 2),
                                    sc.get_double("homoclinic.b"),
                                    sc.get_double("homoclinic.y0"), family);
  if (out.format == "svg") {
    write_curve_svg(out.path, res.orbit);
    return 0;
  }
  std::vector<CsvRow> rows;
  rows.push_back({"s_right", fmt_num(res.s_right)});
  rows.push_back({"s_left", fmt_num(res.s_left)});
  rows.push_back({"theta_right", fmt_num(res.theta_right)});
  rows.push_back({"theta_left", fmt_num(res.theta_left)});
  rows.push_back({"half_period", fmt_num(res.half_period)});
  rows.push_back({"leaves_through_right", res.leaves_through_right ? "1" : "0"});
  rows.push_back({"closure", fmt_num(res.closure)});
  for (const Complex& z : res.orbit)
    rows.push_back({fmt_num(z.real()), fmt_num(z.imag())});
  write_csv(out.path, {"quantity", "value"}, rows);
  return 0;
}

int run_regularize(const Scenario& sc, const OutputSpec& out) {
  std::string task = sc.get_or("regularize.task", "defect");
  TransitionFunction phi = scenario_phi(sc, "regularize.phi");

  if (task == "defect") {
    RegularizedSystem R{scenario_system(sc), phi,
                        sc.get_double_or("regularize.eps", 0.1)};
    double d = holomorphy_defect(R, sc.get_double("regularize.x_lo"),
                                 sc.get_double("regularize.x_hi"),
                                 sc.get_double("regularize.y_lo"),
                                 sc.get_double("regularize.y_hi"),
                                 sc.get_int_or("regularize.nx", 41),
                                 sc.get_int_or("regularize.ny", 41));
    write_csv(out.path, {"quantity", "value"}, {{"defect", fmt_num(d)}});
    return 0;
  }
  if (task == "slowfast") {
    RegularizedSystem R{scenario_system(sc), phi,
                        sc.get_double_or("regularize.eps", 0.1)};
    std::vector<CsvRow> rows;
    for (double s : sc.get_list("regularize.samples")) {
      SlowFastPoint p = slow_fast(R, s);
      rows.push_back({fmt_num(s), fmt_num(p.x_bar), fmt_num(p.phi_val),
                      fmt_num(p.reduced)});
    }
    write_csv(out.path, {"s", "x_bar", "phi", "reduced"}, rows);
    return 0;
  }
  if (task == "transition") {
    TransitionSetup S;
    std::string kind = sc.get("regularize.case");
    if (kind == "linear")
      S.kind = TransitionCase::LinearCase;
    else if (kind == "power")
      S.kind = TransitionCase::PowerCase;
    else if (kind == "pole")
      S.kind = TransitionCase::PoleCase;
    else if (kind == "rational")
      S.kind = TransitionCase::RationalCase;
    else
      throw ScenarioError("regularize.case must be linear, power, pole, or rational");
    S.a = sc.get_double_or("regularize.a", 0.0);
    S.b = sc.get_double_or("regularize.b", 0.0);
    S.x0 = sc.get_double("regularize.x0");
    S.y0 = sc.get_double_or("regularize.y0", 0.0);
    TransitionExperimentResult res = transition_map_experiment(
        S, phi, sc.get_list("regularize.eps_grid"), sc.get_list("regularize.theta_grid"),
        sc.get_double_or("regularize.rho", 0.2));
    std::vector<CsvRow> rows;
    rows.push_back({"p_star", "", fmt_num(res.p_star)});
    rows.push_back({"alpha_expected", "", fmt_num(res.alpha_expected)});
    for (size_t i = 0; i < res.alpha_fit.size(); ++i)
      rows.push_back({"alpha_fit", std::to_string(i), fmt_num(res.alpha_fit[i])});
    rows.push_back({"alpha_fit_final", "", fmt_num(res.alpha_fit_final)});
    rows.push_back({"rel_error_final", "", fmt_num(res.rel_error_final)});
    for (const TransitionMeasurement& m : res.table)
      rows.push_back({fmt_num(m.eps), fmt_num(m.theta), fmt_num(m.landing_x)});
    write_csv(out.path, {"eps_or_quantity", "theta_or_index", "value"}, rows);
    return 0;
  }
  throw ScenarioError("regularize.task must be defect, slowfast, or transition");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"piecewise holomorphic planar systems laboratory"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, format = "csv";
  auto add = [&](const std::string& name, const std::string& desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("scenario", scenario_path, "scenario file")->required();
    sub->add_option("--out", out_path, "output path (default: <scenario>.<format>)");
    sub->add_option("--format", format, "csv or svg")
        ->check(CLI::IsMember({"csv", "svg"}));
    return sub;
  };
  CLI::App* c_classify = add("classify", "classify switching-line regions and tangencies");
  CLI::App* c_portrait = add("portrait", "integrate seed orbits into a phase portrait");
  CLI::App* c_cycle = add("cycle", "limit cycle analysis (closed form or shooting)");
  CLI::App* c_homoc = add("homoclinic", "homoclinic loop construction");
  CLI::App* c_reg = add("regularize", "regularization experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    pwhs::Scenario sc = pwhs::load_scenario(scenario_path);
    if (out_path.empty()) out_path = scenario_path + "." + format;
    OutputSpec out{out_path, format};
    if (c_classify->parsed()) return run_classify(sc, out);
    if (c_portrait->parsed()) return run_portrait(sc, out);
    if (c_cycle->parsed()) return run_cycle(sc, out);
    if (c_homoc->parsed()) return run_homoclinic(sc, out);
    if (c_reg->parsed()) return run_regularize(sc, out);
    std::cerr << "no subcommand\n";
    return 2;
  } catch (const pwhs::ScenarioError& e) {
    std::cerr << "ScenarioError: " << e.what() << "\n";
    return 2;
  } catch (const pwhs::InvalidFieldSpec& e) {
    std::cerr << "InvalidFieldSpec: " << e.what() << "\n";
    return 2;
  } catch (const pwhs::IoFailure& e) {
    std::cerr << "IoFailure: " << e.what() << "\n";
    return 2;
  } catch (const pwhs::Error& e) {
    std::cerr << error_name(e) << ": " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
