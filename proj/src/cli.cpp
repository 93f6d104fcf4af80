#include "frontier/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "frontier/afriat.hpp"
#include "frontier/constraint_gen.hpp"
#include "frontier/dataset.hpp"
#include "frontier/isotonic.hpp"
#include "frontier/plot.hpp"
#include "frontier/serialize.hpp"
#include "frontier/stoned.hpp"

namespace frontier {

namespace {

struct FitFlags {
  std::string data = "-";
  std::vector<std::string> x, y, z, b;
  std::string family = "cnls", cet = "add", fun = "prod", rts = "vrs";
  std::optional<double> tau;
  bool isotonic = false;
  std::string dump_dominance;
  bool ddf = false;
  std::vector<double> gx, gy, gb;
  bool gen = false;
  std::string gen_init = "regression-only";
  Index gen_k = 3;
  double gen_tol = 1e-6;
  Index gen_batch = 0;
  int gen_max_rounds = 100;
  std::optional<double> tol_primal, tol_dual;
  std::optional<int> max_iter;
};

struct StonedFlags {
  std::string result = "-";
  std::string method = "mom";
  std::optional<std::string> fun;
};

struct PlotFlags {
  std::string result = "-";
  std::string prefix = "frontier";
  std::optional<std::string> curve;
  std::vector<std::string> surface;
  Index grid = 0;
  Index envelope_grid = 0;
  bool gnuplot = false;
};

struct Common {
  std::string output = "-";
  std::string csv;
  bool record_timing = false;
};

class FlagError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Index>(v.size()));
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
  return f;
}

void emit_json(const nlohmann::json& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(1) + "\n";
  if (path == "-") {
    out << text;
  } else {
    auto f = open_out(path);
    f << text;
  }
}

ResultDocument read_document(const std::string& path, std::istream& in) {
  nlohmann::json j;
  try {
    if (path == "-") {
      j = nlohmann::json::parse(in);
    } else {
      std::ifstream f(path);
      if (!f) throw Error(ErrorKind::io, "cannot open '" + path + "'");
      j = nlohmann::json::parse(f);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_argument, std::string("result document is not valid JSON: ") + e.what());
  }
  if (j.contains("error")) throw Error(ErrorKind::invalid_argument, "input is an error document from an earlier stage");
  return result_from_json(j);
}

Index column_index(const Dataset& ds, const std::string& name) {
  for (std::size_t k = 0; k < ds.x_names.size(); ++k) {
    if (ds.x_names[k] == name) return static_cast<Index>(k);
  }
  throw Error(ErrorKind::unknown_column, "'" + name + "' is not an input column of this estimate");
}

// ---- fit -----------------------------------------------------------------

ModelSpec spec_from_flags(const FitFlags& f, const Dataset& ds) {
  ModelSpec s;
  s.family = parse_family(f.family);
  s.cet = parse_error_composition(f.cet);
  s.fun = parse_function_type(f.fun);
  s.rts = parse_returns_to_scale(f.rts);
  if (f.tau && s.family == Family::cnls) throw FlagError("--tau applies to the cqr and cer families only");
  s.tau = f.tau.value_or(0.5);
  s.isotonic = f.isotonic;
  s.use_contextual = ds.z.has_value();
  s.ddf = f.ddf;
  if (!f.ddf && (!f.gx.empty() || !f.gy.empty() || !f.gb.empty())) throw FlagError("--gx/--gy/--gb need --ddf");
  if (f.ddf) {
    s.gx = to_eigen(f.gx);
    s.gy = to_eigen(f.gy);
    s.gb = to_eigen(f.gb);
  }
  return s;
}

void write_fit_csv(std::ostream& out, const ResultDocument& doc) {
  const FrontierEstimate& e = doc.estimate;
  const bool split = e.residual_pos.has_value();
  out << "observation,fitted";
  out << (split ? ",residual_pos,residual_neg" : ",residual");
  out << ",alpha";
  for (const auto& nm : doc.data.x_names) out << ",beta_" << nm;
  if (e.gamma) {
    for (const auto& nm : doc.data.y_names) out << ",gamma_" << nm;
  }
  if (e.delta) {
    for (const auto& nm : doc.data.b_names) out << ",delta_" << nm;
  }
  out << '\n';
  for (Index i = 0; i < e.n(); ++i) {
    out << i << ',' << fmt(e.fitted[i]);
    if (split) {
      out << ',' << fmt((*e.residual_pos)[i]) << ',' << fmt((*e.residual_neg)[i]);
    } else {
      out << ',' << fmt((*e.residuals)[i]);
    }
    out << ',' << fmt(e.alpha[i]);
    for (Index k = 0; k < e.beta.cols(); ++k) out << ',' << fmt(e.beta(i, k));
    if (e.gamma) {
      for (Index k = 0; k < e.gamma->cols(); ++k) out << ',' << fmt((*e.gamma)(i, k));
    }
    if (e.delta) {
      for (Index k = 0; k < e.delta->cols(); ++k) out << ',' << fmt((*e.delta)(i, k));
    }
    out << '\n';
  }
}

void run_fit(const FitFlags& f, const Common& c, std::istream& in, std::ostream& out) {
  if (f.x.empty() || f.y.empty()) throw FlagError("fit needs --x and --y");
  Dataset ds = f.data == "-" ? read_csv(in, "<stdin>", f.x, f.y, f.z, f.b) : load_csv(f.data, f.x, f.y, f.z, f.b);
  const ModelSpec spec = spec_from_flags(f, ds);

  FitOptions opt;
  if (f.tol_primal) opt.tol.primal = *f.tol_primal;
  if (f.tol_dual) opt.tol.dual = *f.tol_dual;
  if (f.max_iter) opt.tol.max_iterations = *f.max_iter;

  ResultDocument doc;
  if (f.gen) {
    GenConfig g;
    g.initial_strategy = parse_initial_strategy(f.gen_init);
    g.k = f.gen_k;
    g.violation_tol = f.gen_tol;
    g.batch_limit = f.gen_batch;
    g.max_rounds = f.gen_max_rounds;
    GenResult r = fit_generated(ds, spec, g, opt);
    doc.estimate = std::move(r.estimate);
    doc.generation = std::move(r.state);
  } else {
    check_model(ds, spec);
    doc.estimate = fit(ds, spec, opt);
  }
  if (!f.dump_dominance.empty()) {
    auto file = open_out(f.dump_dominance);
    write_dominance_csv(file, dominance_matrix(ds));
  }
  doc.data = std::move(ds);
  emit_json(to_json(doc, c.record_timing), c.output, out);
  if (!c.csv.empty()) {
    auto file = open_out(c.csv);
    write_fit_csv(file, doc);
  }
}

// ---- stoned --------------------------------------------------------------

void run_stoned(const StonedFlags& f, const Common& c, std::istream& in, std::ostream& out) {
  ResultDocument doc = read_document(f.result, in);
  const FrontierEstimate& e = doc.estimate;
  if (e.spec.family != Family::cnls || !e.residuals) {
    throw Error(ErrorKind::unsupported, "quantile residuals not decomposable: StoNED needs a least-squares fit");
  }
  ModelSpec spec = e.spec;
  if (f.fun) spec.fun = parse_function_type(*f.fun);
  const VectorXd& eps = *e.residuals;

  switch (parse_decomposition_method(f.method)) {
    case DecompositionMethod::mom: doc.decomposition = decompose_mom(eps, spec.fun); break;
    case DecompositionMethod::qle: doc.decomposition = decompose_qle(eps, spec.fun); break;
    case DecompositionMethod::kde: doc.decomposition = decompose_kde(eps, spec.fun); break;
  }
  if (doc.decomposition->method != DecompositionMethod::kde) {
    EfficiencyResult eff = jlms_conditional(eps, *doc.decomposition, spec.fun);
    if (!spec.ddf) eff.technical_efficiency = technical_efficiency(doc.data, e, eff, spec);
    doc.efficiency = std::move(eff);
  }
  emit_json(to_json(doc, c.record_timing), c.output, out);

  if (!c.csv.empty()) {
    auto file = open_out(c.csv);
    file << "observation,residual,conditional_inefficiency,technical_efficiency\n";
    for (Index i = 0; i < eps.size(); ++i) {
      file << i << ',' << fmt(eps[i]) << ',';
      if (doc.efficiency) file << fmt(doc.efficiency->conditional_inefficiency[i]);
      file << ',';
      if (doc.efficiency && doc.efficiency->technical_efficiency.size() > 0) {
        file << fmt(doc.efficiency->technical_efficiency[i]);
      }
      file << '\n';
    }
  }
}

// ---- plotdata ------------------------------------------------------------

void run_plot(const PlotFlags& f, const Common& c, std::istream& in, std::ostream& out) {
  if (f.surface.size() != 0 && f.surface.size() != 2) throw FlagError("--surface takes exactly two input columns");
  if (f.grid != 0 && f.surface.empty()) throw FlagError("--grid needs --surface");
  if (f.envelope_grid != 0 && f.envelope_grid < 2) throw FlagError("--envelope-grid needs at least 2 points");
  const ResultDocument doc = read_document(f.result, in);
  const Dataset& ds = doc.data;
  const FrontierEstimate& e = doc.estimate;

  nlohmann::json files = nlohmann::json::object();
  auto write = [&](const std::string& key, const std::string& suffix, auto&& body) {
    const std::string path = f.prefix + suffix;
    auto file = open_out(path);
    body(file);
    if (!file) throw Error(ErrorKind::io, "write to '" + path + "' failed");
    files[key] = path;
  };

  const Index curve_col = f.curve ? column_index(ds, *f.curve) : 0;
  const CurveData curve = emit_curve_2d(e, ds, curve_col);
  write("curve", "_curve.csv", [&](std::ostream& o) { write_curve_csv(o, curve); });
  write("curve_scatter", "_curve_scatter.csv", [&](std::ostream& o) { write_curve_scatter_csv(o, curve); });
  if (f.envelope_grid > 0) {
    const auto env = envelope_grid(e, ds, curve_col, f.envelope_grid);
    write("envelope", "_envelope.csv", [&](std::ostream& o) { write_envelope_csv(o, env); });
  }

  if (!f.surface.empty()) {
    const SurfaceData s =
        emit_surface_3d(e, ds, column_index(ds, f.surface[0]), column_index(ds, f.surface[1]), f.grid);
    write("vertices", "_vertices.csv", [&](std::ostream& o) { write_vertices_csv(o, s); });
    write("triangles", "_triangles.csv", [&](std::ostream& o) { write_triangles_csv(o, s); });
    write("surface_scatter", "_surface_scatter.csv", [&](std::ostream& o) { write_surface_scatter_csv(o, s); });
    if (f.grid > 0) write("grid", "_grid.csv", [&](std::ostream& o) { write_grid_csv(o, s); });
  }
  if (f.gnuplot) {
    const std::string base = std::filesystem::path(f.prefix).filename().string();
    write("gnuplot", ".gp", [&](std::ostream& o) { write_gnuplot_script(o, base, !f.surface.empty()); });
  }
  emit_json({{"schema_version", schema_version}, {"files", files}}, c.output, out);
}

// ---- dgp -----------------------------------------------------------------

void run_dgp(const DgpConfig& cfg, const Common& c, std::ostream& out) {
  const Dataset ds = generate_dgp(cfg);
  if (c.output == "-") {
    write_csv(out, ds);
  } else {
    write_csv(c.output, ds);
  }
}

void add_common(CLI::App* app, Common& c, bool csv) {
  app->add_option("-o,--output", c.output, "Output path, - for stdout")->capture_default_str();
  if (csv) app->add_option("--csv", c.csv, "Also write a per-observation CSV here");
  app->add_flag("--record-timing", c.record_timing, "Include wall-clock times in the JSON");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shape-constrained nonparametric frontier estimation", "frontier"};
  app.require_subcommand(1);

  Common common;
  FitFlags fit_f;
  StonedFlags st_f;
  PlotFlags plot_f;
  DgpConfig dgp_cfg;
  dgp_cfg.n = 200;

  const auto family_check = CLI::IsMember({"cnls", "cqr", "cer"});

  auto* fit_cmd = app.add_subcommand("fit", "Estimate a frontier from a CSV file");
  fit_cmd->add_option("data", fit_f.data, "CSV file with a header row, - for stdin")->capture_default_str();
  fit_cmd->add_option("--x", fit_f.x, "Input columns")->delimiter(',');
  fit_cmd->add_option("--y", fit_f.y, "Output columns")->delimiter(',');
  fit_cmd->add_option("--z", fit_f.z, "Contextual columns (multiplicative models)")->delimiter(',');
  fit_cmd->add_option("--b", fit_f.b, "Undesirable output columns (DDF)")->delimiter(',');
  fit_cmd->add_option("--family", fit_f.family, "Loss: cnls (least squares), cqr (quantile), cer (expectile)")
      ->check(family_check)
      ->capture_default_str();
  fit_cmd->add_option("--cet", fit_f.cet, "Error composition")
      ->check(CLI::IsMember({"add", "mult", "additive", "multiplicative"}))
      ->capture_default_str();
  fit_cmd->add_option("--fun", fit_f.fun, "Frontier type")
      ->check(CLI::IsMember({"prod", "cost", "production"}))
      ->capture_default_str();
  fit_cmd->add_option("--rts", fit_f.rts, "Returns to scale")->check(CLI::IsMember({"vrs", "crs"}))->capture_default_str();
  fit_cmd->add_option("--tau", fit_f.tau, "Quantile or expectile level in (0, 1)");
  fit_cmd->add_flag("--isotonic", fit_f.isotonic, "Monotone-only fit (Afriat rows gated by input dominance)");
  fit_cmd->add_option("--dump-dominance", fit_f.dump_dominance, "Write the input dominance matrix as CSV");
  fit_cmd->add_flag("--ddf", fit_f.ddf, "Directional distance function model");
  fit_cmd->add_option("--gx", fit_f.gx, "Input direction")->delimiter(',');
  fit_cmd->add_option("--gy", fit_f.gy, "Output direction")->delimiter(',');
  fit_cmd->add_option("--gb", fit_f.gb, "Undesirable output direction")->delimiter(',');
  fit_cmd->add_flag("--gen", fit_f.gen, "Solve by constraint generation");
  auto* gen_init = fit_cmd->add_option("--gen-init", fit_f.gen_init, "Initial rows: regression-only or k-nearest")
                       ->check(CLI::IsMember({"regression-only", "regression_only", "k-nearest", "k_nearest"}))
                       ->capture_default_str();
  auto* gen_k = fit_cmd->add_option("--gen-k", fit_f.gen_k, "Neighbours per observation for k-nearest")
                    ->check(CLI::PositiveNumber)
                    ->capture_default_str();
  auto* gen_tol = fit_cmd->add_option("--gen-tol", fit_f.gen_tol, "Violation tolerance")->capture_default_str();
  auto* gen_batch =
      fit_cmd->add_option("--gen-batch", fit_f.gen_batch, "Rows added per round, 0 = max(n, 1000)")->capture_default_str();
  auto* gen_rounds =
      fit_cmd->add_option("--gen-max-rounds", fit_f.gen_max_rounds, "Round limit")->capture_default_str();
  for (CLI::Option* o : {gen_init, gen_k, gen_tol, gen_batch, gen_rounds}) o->needs("--gen");
  fit_cmd->add_option("--tol-primal", fit_f.tol_primal, "Solver primal feasibility tolerance");
  fit_cmd->add_option("--tol-dual", fit_f.tol_dual, "Solver dual feasibility tolerance");
  fit_cmd->add_option("--max-iter", fit_f.max_iter, "Interior point iteration limit");
  add_common(fit_cmd, common, true);

  auto* st_cmd = app.add_subcommand("stoned", "Decompose the residuals of a least-squares fit");
  st_cmd->add_option("result", st_f.result, "Result JSON from fit, - for stdin")->capture_default_str();
  st_cmd->add_option("--method", st_f.method, "Decomposition method")
      ->check(CLI::IsMember({"mom", "qle", "kde"}))
      ->capture_default_str();
  st_cmd->add_option("--fun", st_f.fun, "Frontier type, defaults to the one of the fit")
      ->check(CLI::IsMember({"prod", "cost", "production"}));
  add_common(st_cmd, common, true);

  auto* plot_cmd = app.add_subcommand("plotdata", "Write plot-ready CSV files for an estimate");
  plot_cmd->add_option("result", plot_f.result, "Result JSON, - for stdin")->capture_default_str();
  plot_cmd->add_option("--prefix", plot_f.prefix, "Path prefix of the written files")->capture_default_str();
  plot_cmd->add_option("--curve", plot_f.curve, "Input column of the 2D curve (default: first input)");
  plot_cmd->add_option("--surface", plot_f.surface, "Two input columns of the 3D surface")->delimiter(',');
  plot_cmd->add_option("--grid", plot_f.grid, "Interpolation grid size per axis for the surface")
      ->check(CLI::NonNegativeNumber);
  plot_cmd->add_option("--envelope-grid", plot_f.envelope_grid, "Envelope points along the curve input")
      ->check(CLI::NonNegativeNumber);
  plot_cmd->add_flag("--gnuplot", plot_f.gnuplot, "Also write a gnuplot script");
  plot_cmd->add_option("-o,--output", common.output, "Manifest output path, - for stdout")->capture_default_str();

  auto* dgp_cmd = app.add_subcommand("dgp", "Write synthetic two-input production data as CSV");
  dgp_cmd->add_option("--n", dgp_cfg.n, "Observations")->check(CLI::PositiveNumber)->capture_default_str();
  dgp_cmd->add_option("--seed", dgp_cfg.seed, "Random seed")->capture_default_str();
  dgp_cmd->add_option("--noise-sd", dgp_cfg.noise_sd, "Noise standard deviation")->capture_default_str();
  dgp_cmd->add_option("--inefficiency-sd", dgp_cfg.inefficiency_sd, "Scale of a half-normal term subtracted from y")
      ->capture_default_str();
  dgp_cmd->add_option("--low", dgp_cfg.input_low, "Lower input bound")->capture_default_str();
  dgp_cmd->add_option("--high", dgp_cfg.input_high, "Upper input bound")->capture_default_str();
  dgp_cmd->add_option("-o,--output", common.output, "Output path, - for stdout")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << error_json(ErrorKind::invalid_argument, e.what()).dump() << '\n';
    return 2;
  }

  try {
    if (fit_cmd->parsed()) {
      run_fit(fit_f, common, in, out);
    } else if (st_cmd->parsed()) {
      run_stoned(st_f, common, in, out);
    } else if (plot_cmd->parsed()) {
      run_plot(plot_f, common, in, out);
    } else {
      run_dgp(dgp_cfg, common, out);
    }
  } catch (const FlagError& e) {
    err << error_json(ErrorKind::invalid_argument, e.what()).dump() << '\n';
    return 2;
  } catch (const Error& e) {
    err << error_json(e.kind(), e.what()).dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << error_json(ErrorKind::io, e.what()).dump() << '\n';
    return 1;
  }
  out.flush();
  return 0;
}

}  // namespace frontier
