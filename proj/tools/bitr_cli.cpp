#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bitr/config.hpp"
#include "bitr/model_io.hpp"
#include "bitr/plot.hpp"
#include "bitr/simulation.hpp"

namespace fs = std::filesystem;
using namespace bitr;

namespace {

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--set", c.sets, "override a config key (key=value), repeatable");
  cmd->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
  for (const auto& s : c.sets) apply_override(cfg, s);
  if (c.jobs) cfg.jobs = *c.jobs;
  validate_config(cfg);
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string vec_str(const std::vector<double>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s + ")";
}

int cmd_simulate(const RunConfig& cfg, const std::string& out_override) {
  const fs::path dir = out_override.empty() ? fs::path(cfg.output_dir) : fs::path(out_override);
  const ScenarioSpec spec = scenario_spec(cfg);
  std::cerr << "simulate: scenario " << cfg.scenario << ", n = " << cfg.n << ", R = " << cfg.R
            << ", jobs = " << cfg.jobs << "\n";
  const auto report = run_replications(spec, cfg.weights, replication_options(cfg));
  fs::create_directories(dir);
  write_file(dir / "report.csv", report_csv(report));
  const std::string summary = report_summary(report);
  write_file(dir / "summary.txt", summary);
  std::cout << summary;
  return 0;
}

int cmd_generate(const RunConfig& cfg, const std::string& out) {
  const ScenarioSpec spec = scenario_spec(cfg);
  const Dataset d = generate_dataset(spec, mix_seed(cfg.seed, 1));
  if (out.empty())
    std::cout << format_dataset(d);
  else
    write_file(out, format_dataset(d));
  return 0;
}

int cmd_fit(const RunConfig& cfg, const std::string& data, const std::string& out) {
  const Dataset d = load_dataset(data);
  if (d.K() < 1)
    throw ValidationError("data has a single arm (K = 0); a treatment decision needs at least two");
  ItrOptions opts = itr_options(cfg);
  const WeightConfig c(cfg.c1, cfg.c2);
  auto fitted = fit_itr(d, c, opts);
  SavedModel m{std::move(fitted.model), std::move(fitted.net), c, cfg.t1, cfg.t2};
  save_model(m, out);
  for (std::size_t a = 0; a < m.model.arms.size(); ++a) {
    const auto& am = m.model.arms[a];
    std::cout << "arm " << a << ": kappa=" << format_double(am.kappa)
              << " beta1=" << vec_str(am.m1.beta) << " gamma1=" << format_double(am.m1.gamma)
              << " beta2=" << vec_str(am.m2.beta) << " gamma2=" << format_double(am.m2.gamma)
              << " copula=" << to_string(am.copula.family)
              << " theta=" << format_double(am.copula.theta) << "\n";
  }
  std::cerr << "fit: model written to " << out << "\n";
  return 0;
}

int cmd_decide(const std::string& model_path, const std::string& cov_path, const std::string& out) {
  const SavedModel m = load_model(model_path);
  const auto xs = load_covariates(cov_path);
  const int p = m.net.input_dim();
  std::string text;
  for (int k = 0; k < p; ++k) text += "x" + std::to_string(k + 1) + ",";
  text += "arm";
  for (int a = 0; a < m.net.n_arms(); ++a) text += ",prob" + std::to_string(a);
  text += "\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (static_cast<int>(xs[i].size()) != p)
      throw ShapeError("covariate row " + std::to_string(i + 1) + " has " +
                       std::to_string(xs[i].size()) + " columns; the model expects " +
                       std::to_string(p));
    for (double v : xs[i]) text += format_double(v) + ",";
    text += std::to_string(decide(m.net, xs[i]));
    for (double q : policy(m.net, xs[i])) text += "," + format_double(q);
    text += "\n";
  }
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
  return 0;
}

GridSpec parse_grid(const std::string& s) {
  GridSpec g;
  double lo = 0, hi = 0;
  int res = 0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%lf,%lf,%d%c", &lo, &hi, &res, &tail) != 3)
    throw ConfigError("grid must be lo,hi,resolution, got '" + s + "'");
  g.lo = lo;
  g.hi = hi;
  g.resolution = res;
  if (g.resolution < 1 || !(g.hi > g.lo)) throw EmptyGridError("grid '" + s + "' is empty");
  return g;
}

int cmd_plot(const RunConfig& cfg, const std::string& model_path, bool oracle,
             const std::string& grid_str, const std::string& out) {
  const GridSpec grid = parse_grid(grid_str);
  std::vector<PlotPanel> panels;
  int n_arms = 0;
  std::optional<ScenarioSpec> spec;
  if (oracle) {
    spec = scenario_spec(cfg);
    n_arms = spec->K + 1;
    panels.push_back({"truth (" + cfg.scenario + ")", spec->p,
                      [&spec](std::span<const double> x) { return oracle_policy(*spec, x); }});
  }
  std::optional<SavedModel> m;
  if (!model_path.empty()) {
    m = load_model(model_path);
    n_arms = std::max(n_arms, m->net.n_arms());
    panels.push_back({"prediction", m->net.input_dim(),
                      [&m](std::span<const double> x) { return decide(m->net, x); }});
  }
  if (panels.empty()) throw ConfigError("plot needs --model, --oracle, or both");
  emit_boundary_plot(panels, grid, n_arms, out);
  std::cerr << "plot: written to " << out << "\n";
  return 0;
}

int cmd_validate(const std::string& data) {
  std::cout << validate(load_dataset(data)).to_string();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bivariate-survival individualized treatment rules"};
  app.require_subcommand(1);

  Common sim_c, gen_c, fit_c, plot_c;
  std::string sim_out, gen_out, fit_data, fit_out = "model.json";
  std::string dec_model, dec_cov, dec_out;
  std::string plot_model, plot_grid = "-2.8,2.8,100", plot_out = "plot.svg";
  bool plot_oracle = false;
  std::string val_data;

  auto* sim = app.add_subcommand("simulate", "Monte Carlo replications of a scenario");
  add_common(sim, sim_c);
  sim->add_option("--out", sim_out, "output directory (overrides output_dir)");

  auto* gen = app.add_subcommand("generate", "write one simulated training set as CSV");
  add_common(gen, gen_c);
  gen->add_option("--out", gen_out, "output CSV (stdout when omitted)");

  auto* fit = app.add_subcommand("fit", "fit the joint model and policy on a data file");
  add_common(fit, fit_c);
  fit->add_option("--data", fit_data, "CSV with y1,y2,d1,d2,a,x1..xp")->required();
  fit->add_option("--out", fit_out, "model file");

  auto* dec = app.add_subcommand("decide", "recommend arms for a covariate file");
  dec->add_option("--model", dec_model, "model file")->required();
  dec->add_option("--covariates", dec_cov, "CSV with columns x1..xp")->required();
  dec->add_option("--out", dec_out, "output CSV (stdout when omitted)");

  auto* plt = app.add_subcommand("plot", "SVG of decision regions");
  add_common(plt, plot_c);
  plt->add_option("--model", plot_model, "model file for the prediction panel");
  plt->add_flag("--oracle", plot_oracle, "add the true rule of the configured scenario");
  plt->add_option("--grid", plot_grid, "lo,hi,resolution");
  plt->add_option("--out", plot_out, "output SVG");

  auto* val = app.add_subcommand("validate", "summarize a data file");
  val->add_option("--data", val_data, "CSV with y1,y2,d1,d2,a,x1..xp")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(resolve(sim_c), sim_out);
    if (gen->parsed()) return cmd_generate(resolve(gen_c), gen_out);
    if (fit->parsed()) return cmd_fit(resolve(fit_c), fit_data, fit_out);
    if (dec->parsed()) return cmd_decide(dec_model, dec_cov, dec_out);
    if (plt->parsed()) return cmd_plot(resolve(plot_c), plot_model, plot_oracle, plot_grid, plot_out);
    if (val->parsed()) return cmd_validate(val_data);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ModelFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    // shape mismatches, empty grids, unsupported plots, degenerate arm sets
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
