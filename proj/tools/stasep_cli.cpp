#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "stasep/asymptotics.hpp"
#include "stasep/io.hpp"
#include "stasep/path_kernel.hpp"
#include "stasep/pgf_model.hpp"
#include "stasep/reproduce.hpp"
#include "stasep/simulator.hpp"
#include "stasep/transition.hpp"

using namespace stasep;

namespace {

void emit(const std::string& payload, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << payload << "\n";
  } else {
    write_text_file(out_path, payload + "\n");
  }
}

Json model_report(const PgfModel& m, int grid) {
  Json rep;
  rep["model"] = model_to_json(m);
  rep["radius"] = std::isinf(m.radius()) ? Json("inf") : Json(m.radius());
  auto coeffs = model_coefficients(m);
  rep["normalization"] = {{"mass", coeffs.mass},
                          {"abs_error", std::abs(coeffs.mass - 1.0)},
                          {"min_coefficient", coeffs.min_coeff},
                          {"truncation_index", coeffs.truncation_index}};
  auto d = m.gamma_derivs();
  rep["gamma_derivs"] = {{"g1", d.g1}, {"g2", d.g2}, {"g3", d.g3}, {"denom", d.denom}};
  auto imas = m.check_assumption_imas();
  rep["assumption_denominator"] = {{"pass", imas.pass}, {"denom", imas.denom}};
  if (imas.pass) {
    auto sc = m.scaling_coeffs();
    rep["scaling_coeffs"] = {{"D", sc.D}, {"E", sc.E}, {"F", sc.F}, {"G", sc.G},
                             {"drift", sc.drift}};
    auto grid_rep = m.check_assumption_limcon(grid);
    rep["assumption_contour_decay"] = {{"pass", grid_rep.pass},
                                       {"max_lhs_condi10", grid_rep.max_lhs_condi10},
                                       {"max_lhs_condi11", grid_rep.max_lhs_condi11},
                                       {"argmax_condi10", grid_rep.argmax_condi10},
                                       {"argmax_condi11", grid_rep.argmax_condi11},
                                       {"grid_size", grid},
                                       {"domain_failure", grid_rep.domain_failure},
                                       {"note", grid_rep.note}};
  }
  if (m.kind() == ModelKind::DiscreteGeometric && m.radius() <= 1.5 + 1e-9)
    rep["warnings"] = {"radius <= 3/2: contour evaluations near the domain edge"};
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schuetz-type TASEP distributions, Fredholm determinants and KPZ scaling"};
  app.require_subcommand(1);

  std::string model_path, ic_path, out_path, observe = "1";
  std::string from_csv, to_csv, n_csv, a_csv, eps_csv = "0.1,0.05,0.025", which = "A1";
  std::string points_path, at_range;
  double t = 1.0, z_arg = 0.0, tol = 1e-8;
  long long depth = 0;
  std::int64_t samples = 10000;
  std::uint64_t seed = 1;
  int grid = 512;
  double dt = 5e-4;
  std::int64_t paths = 100000;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "write the result to this file instead of stdout");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--depth", depth, "truncation depth override");
    cmd->add_option("--tol", tol, "tolerance override where applicable");
  };

  auto* c_model = app.add_subcommand("model", "model file utilities");
  auto* c_check = c_model->add_subcommand("check", "normalization, derivative and assumption report");
  c_check->add_option("file", model_path, "model JSON file")->required();
  c_check->add_option("--grid", grid, "theta grid size");
  add_common(c_check);

  auto* c_trans = app.add_subcommand("transition", "determinantal transition probability");
  c_trans->add_option("--model", model_path)->required();
  c_trans->add_option("--from", from_csv)->required();
  c_trans->add_option("--to", to_csv)->required();
  c_trans->add_option("--t", t)->required();
  add_common(c_trans);

  auto* c_table = app.add_subcommand("transition-table", "full small-system distribution as CSV");
  c_table->add_option("--model", model_path)->required();
  c_table->add_option("--from", from_csv)->required();
  c_table->add_option("--t", t)->required();
  add_common(c_table);

  auto* c_joint = app.add_subcommand("joint-dist", "Fredholm joint distribution of positions");
  c_joint->add_option("--model", model_path)->required();
  c_joint->add_option("--ic", ic_path)->required();
  c_joint->add_option("--t", t)->required();
  c_joint->add_option("--n", n_csv)->required();
  c_joint->add_option("--a", a_csv)->required();
  add_common(c_joint);

  auto* c_sim = app.add_subcommand("simulate", "forward simulation of the dynamics");
  c_sim->add_option("--model", model_path)->required();
  c_sim->add_option("--ic", ic_path)->required();
  c_sim->add_option("--t", t)->required();
  c_sim->add_option("--samples", samples);
  c_sim->add_option("--observe", observe, "labels to record, e.g. 1,3");
  add_common(c_sim);

  auto* c_height = app.add_subcommand("height", "height profile of a simulated configuration");
  c_height->add_option("--model", model_path)->required();
  c_height->add_option("--ic", ic_path)->required();
  c_height->add_option("--t", t)->required();
  c_height->add_option("--at", at_range, "window z0..z1")->required();
  add_common(c_height);

  auto* c_scal = app.add_subcommand("scaling-coeffs", "KPZ scaling coefficients");
  c_scal->add_option("--model", model_path)->required();
  add_common(c_scal);

  auto* c_conv = app.add_subcommand("converge", "kernel convergence study (A1/A2/A3)");
  c_conv->add_option("--model", model_path)->required();
  c_conv->add_option("--which", which, "A1, A2 or A3");
  c_conv->add_option("--points", points_path, "JSON array of {t,x,u,v}")->required();
  c_conv->add_option("--eps", eps_csv, "comma-separated epsilon values");
  c_conv->add_option("--ic", ic_path, "initial condition (A3 only)");
  c_conv->add_option("--paths", paths, "Brownian paths (A3 only)");
  c_conv->add_option("--dt", dt, "Brownian time step (A3 only)");
  add_common(c_conv);

  auto* c_airy = app.add_subcommand("airy", "Airy function value");
  c_airy->add_option("--z", z_arg)->required();
  add_common(c_airy);

  auto* c_rep = app.add_subcommand("reproduce", "run the full acceptance suite");
  add_common(c_rep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*c_check) {
      emit(model_report(load_model(model_path), grid).dump(2), out_path);
    } else if (*c_trans) {
      auto m = load_model(model_path);
      Configuration from(parse_int_list(from_csv)), to(parse_int_list(to_csv));
      const double v = transition_probability(m, from, to, t);
      Json j = {{"value", v},
                {"diagnostics", {{"N", from.size()}, {"t", t}}}};
      emit(j.dump(2), out_path);
    } else if (*c_table) {
      auto m = load_model(model_path);
      Configuration from(parse_int_list(from_csv));
      auto bf = brute_force_distribution(m, from, (long long)std::llround(t));
      std::ostringstream csv;
      csv << "positions,enumeration,determinant\n";
      for (const auto& [cfg, pr] : bf) {
        csv << '"';
        for (std::size_t i = 0; i < cfg.positions.size(); ++i)
          csv << (i ? "," : "") << cfg.positions[i];
        csv << "\"," << pr << ',' << transition_probability(m, from, cfg, t) << "\n";
      }
      emit(csv.str(), out_path);
    } else if (*c_joint) {
      auto m = load_model(model_path);
      auto ic = load_ic(ic_path);
      auto ns = parse_int_list(n_csv);
      auto as = parse_int_list(a_csv);
      auto res = joint_probability(m, ic, t, ns, as, depth, tol);
      Json j = {{"probability", res.value},
                {"depth_report",
                 {{"depth_shallow", res.depth_shallow},
                  {"det_shallow", res.det_shallow},
                  {"depth_deep", res.depth_deep},
                  {"det_deep", res.det_deep},
                  {"gap", res.depth_gap}}},
                {"kernel_diagnostics", {{"clamped", res.clamped}}}};
      emit(j.dump(2), out_path);
    } else if (*c_sim) {
      auto m = load_model(model_path);
      auto ic = load_ic(ic_path);
      auto labels = parse_int_list(observe);
      auto ens = run_ensemble(m, ic.positions, {t}, samples, seed);
      std::ostringstream csv;
      csv << "sample,time,label,position\n";
      for (std::size_t s = 0; s < ens.samples.size(); ++s)
        for (long long lbl : labels) {
          if (lbl < 1 || lbl > (long long)ic.positions.size())
            throw ConfigError("observe label outside the initial condition");
          csv << s << ',' << t << ',' << lbl << ','
              << ens.samples[s][0][std::size_t(lbl - 1)] << "\n";
        }
      emit(csv.str(), out_path);
    } else if (*c_height) {
      auto m = load_model(model_path);
      auto ic = load_ic(ic_path);
      const auto dots = at_range.find("..");
      if (dots == std::string::npos) throw ConfigError("--at expects z0..z1");
      const long long z0 = std::stoll(at_range.substr(0, dots));
      const long long z1 = std::stoll(at_range.substr(dots + 2));
      auto ens = run_ensemble(m, ic.positions, {t}, 1, seed);
      auto prof = height_function(ens.samples[0][0], 1, z0, z1);
      std::ostringstream csv;
      csv << "z,height\n";
      for (long long z = z0; z <= z1; ++z)
        csv << z << ',' << prof.values[std::size_t(z - z0)] << "\n";
      emit(csv.str(), out_path);
    } else if (*c_scal) {
      auto m = load_model(model_path);
      auto d = m.gamma_derivs();
      auto sc = m.scaling_coeffs();
      Json j = {{"g1", d.g1}, {"g2", d.g2},     {"g3", d.g3},  {"denom", d.denom},
                {"D", sc.D},  {"E", sc.E},      {"F", sc.F},   {"G", sc.G},
                {"drift", sc.drift}};
      emit(j.dump(2), out_path);
    } else if (*c_conv) {
      auto m = load_model(model_path);
      const Json pts = load_json_file(points_path);
      if (!pts.is_array() || pts.empty()) throw ConfigError("points file must be a JSON array");
      std::optional<InitialCondition> ic;
      if (which == "A3") {
        if (ic_path.empty()) throw ConfigError("A3 study needs --ic");
        ic = load_ic(ic_path);
      }
      std::ostringstream csv;
      csv << "eps,point,value,limit,error\n";
      for (double eps : parse_double_list(eps_csv)) {
        for (std::size_t i = 0; i < pts.size(); ++i) {
          const auto& p = pts[i];
          auto fr = make_frame(m, eps, p.at("t").get<double>(), p.at("x").get<double>(),
                               p.value("a", 0.0), p.at("u").get<double>(),
                               p.at("v").get<double>());
          double value = 0.0, limit = 0.0;
          if (which == "A1") {
            value = eps_S(m, fr);
            limit = limit_A1(fr);
          } else if (which == "A2") {
            value = eps_Sbar(m, fr);
            limit = limit_A2(fr);
          } else if (which == "A3") {
            value = eps_Sbar_epi(m, *ic, fr);
            // Brownian estimate of the limit functional for the barrier the
            // initial condition induces at this eps
            PiecewiseLinear g = scaled_barrier(*ic, eps, 2.0);
            auto mc = brownian_epi(g, -fr.t_cap_eff, -fr.x_cap, fr.v_eff, fr.u_eff, paths, seed,
                                   dt, 2.0);
            limit = mc.estimate;
          } else {
            throw ConfigError("--which must be A1, A2 or A3");
          }
          csv << eps << ',' << i << ',' << value << ',' << limit << ','
              << std::abs(value - limit) << "\n";
        }
      }
      emit(csv.str(), out_path);
    } else if (*c_airy) {
      Json j = {{"z", z_arg}, {"value", airy(z_arg)}};
      emit(j.dump(2), out_path);
    } else if (*c_rep) {
      const auto results = run_acceptance_suite();
      const int failures = print_acceptance_report(results);
      return failures == 0 ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const NonConvergenceError& e) {
    std::cerr << "nonconvergence: " << e.what() << "\n";
    return 4;
  } catch (const TruncationError& e) {
    std::cerr << "truncation: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
