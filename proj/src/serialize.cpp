#include "frontier/serialize.hpp"

namespace frontier {

using nlohmann::json;

namespace {

json vec(const VectorXd& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json mat(const MatrixXd& m) {
  json a = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(std::move(row));
  }
  return a;
}

VectorXd to_vec(const json& a) {
  if (!a.is_array()) throw Error(ErrorKind::invalid_argument, "result document: expected a number array");
  VectorXd v(static_cast<Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Index>(i)] = a[i].get<double>();
  return v;
}

MatrixXd to_mat(const json& a) {
  if (!a.is_array()) throw Error(ErrorKind::invalid_argument, "result document: expected a matrix");
  const Index rows = static_cast<Index>(a.size());
  const Index cols = rows > 0 ? static_cast<Index>(a[0].size()) : 0;
  MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = a[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw Error(ErrorKind::invalid_argument, "result document: ragged matrix");
    }
    for (Index j = 0; j < cols; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

template <class T>
void put(json& j, const char* key, const std::optional<T>& v) {
  if (!v) return;
  if constexpr (std::is_same_v<T, VectorXd>) {
    j[key] = vec(*v);
  } else if constexpr (std::is_same_v<T, MatrixXd>) {
    j[key] = mat(*v);
  } else {
    j[key] = *v;
  }
}

std::optional<VectorXd> opt_vec(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  return to_vec(j.at(key));
}

std::optional<MatrixXd> opt_mat(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  return to_mat(j.at(key));
}

std::optional<double> opt_num(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  return j.at(key).get<double>();
}

json spec_json(const ModelSpec& s) {
  json j = {{"family", to_string(s.family)},
            {"error_composition", to_string(s.cet)},
            {"function_type", to_string(s.fun)},
            {"returns_to_scale", to_string(s.rts)},
            {"tau", s.tau},
            {"contextual", s.use_contextual},
            {"isotonic", s.isotonic},
            {"ddf", s.ddf}};
  if (s.ddf) {
    j["gx"] = vec(s.gx);
    j["gy"] = vec(s.gy);
    j["gb"] = vec(s.gb);
  }
  return j;
}

ModelSpec spec_from(const json& j) {
  ModelSpec s;
  s.family = parse_family(j.at("family").get<std::string>());
  s.cet = parse_error_composition(j.at("error_composition").get<std::string>());
  s.fun = parse_function_type(j.at("function_type").get<std::string>());
  s.rts = parse_returns_to_scale(j.at("returns_to_scale").get<std::string>());
  s.tau = j.at("tau").get<double>();
  s.use_contextual = j.at("contextual").get<bool>();
  s.isotonic = j.at("isotonic").get<bool>();
  s.ddf = j.at("ddf").get<bool>();
  if (s.ddf) {
    s.gx = to_vec(j.at("gx"));
    s.gy = to_vec(j.at("gy"));
    s.gb = to_vec(j.at("gb"));
  }
  return s;
}

json block(const MatrixXd& m, const std::vector<std::string>& names) {
  return {{"names", names}, {"values", mat(m)}};
}

json data_json(const Dataset& ds) {
  json j = {{"x", block(ds.x, ds.x_names)}, {"y", block(ds.y, ds.y_names)}};
  if (ds.z) j["z"] = block(*ds.z, ds.z_names);
  if (ds.b) j["b"] = block(*ds.b, ds.b_names);
  return j;
}

MatrixXd block_from(const json& j, std::vector<std::string>& names) {
  names = j.at("names").get<std::vector<std::string>>();
  MatrixXd m = to_mat(j.at("values"));
  if (m.rows() > 0 && m.cols() != static_cast<Index>(names.size())) {
    throw Error(ErrorKind::invalid_argument, "result document: column names do not match the data");
  }
  if (m.rows() == 0) m.resize(0, static_cast<Index>(names.size()));
  return m;
}

Dataset data_from(const json& j) {
  Dataset ds;
  ds.x = block_from(j.at("x"), ds.x_names);
  ds.y = block_from(j.at("y"), ds.y_names);
  if (j.contains("z")) ds.z = block_from(j.at("z"), ds.z_names);
  if (j.contains("b")) ds.b = block_from(j.at("b"), ds.b_names);
  return ds;
}

}  // namespace

SolveStatus parse_solve_status(std::string_view s) {
  for (SolveStatus v : {SolveStatus::optimal, SolveStatus::max_iterations, SolveStatus::infeasible,
                        SolveStatus::numerical_failure}) {
    if (s == to_string(v)) return v;
  }
  throw Error(ErrorKind::invalid_argument, "unknown solver status '" + std::string(s) + "'");
}

json error_json(ErrorKind kind, const std::string& message) {
  return {{"error", {{"kind", to_string(kind)}, {"message", message}}}};
}

json to_json(const ResultDocument& doc, bool record_timing) {
  const FrontierEstimate& e = doc.estimate;
  json j;
  j["schema_version"] = schema_version;
  j["spec"] = spec_json(e.spec);
  j["data"] = data_json(doc.data);
  j["n"] = e.n();
  j["objective_value"] = e.objective_value;
  j["alpha"] = vec(e.alpha);
  j["beta"] = mat(e.beta);
  put(j, "gamma", e.gamma);
  put(j, "delta", e.delta);
  put(j, "z_coefficients", e.z_coefficients);
  put(j, "residuals", e.residuals);
  put(j, "residual_pos", e.residual_pos);
  put(j, "residual_neg", e.residual_neg);
  put(j, "phi", e.phi);
  j["fitted"] = vec(e.fitted);

  json d = {{"status", to_string(e.diagnostics.status)},
            {"kkt",
             {{"primal", e.diagnostics.kkt.primal},
              {"dual", e.diagnostics.kkt.dual},
              {"complementarity", e.diagnostics.kkt.complementarity}}},
            {"iterations", e.diagnostics.iterations},
            {"message", e.diagnostics.message}};
  if (record_timing) d["wall_time"] = e.diagnostics.wall_time;
  j["diagnostics"] = std::move(d);

  if (doc.generation) {
    const GenState& g = *doc.generation;
    json pairs = json::array();
    for (const auto& p : g.active_pairs) pairs.push_back({p.i, p.j});
    json gj = {{"rounds", g.iteration},
               {"converged", g.converged},
               {"total_constraints", g.total_constraints},
               {"violations_added_per_round", g.violations_added_per_round},
               {"objective_trace", g.objective_trace},
               {"active_pairs", std::move(pairs)}};
    if (record_timing) gj["runtime"] = g.runtime;
    j["generation"] = std::move(gj);
  }
  if (doc.decomposition) {
    const DecompositionResult& r = *doc.decomposition;
    json dj = {{"method", to_string(r.method)}, {"function_type", to_string(r.function_type)}, {"mu", r.mu}};
    put(dj, "sigma_u", r.sigma_u);
    put(dj, "sigma_v", r.sigma_v);
    put(dj, "signal_to_noise", r.signal_to_noise);
    put(dj, "sigma", r.sigma);
    put(dj, "m2", r.m2);
    put(dj, "m3", r.m3);
    put(dj, "log_likelihood", r.log_likelihood);
    put(dj, "bandwidth", r.bandwidth);
    j["decomposition"] = std::move(dj);
  }
  if (doc.efficiency) {
    const EfficiencyResult& r = *doc.efficiency;
    j["efficiency"] = {{"conditional_inefficiency", vec(r.conditional_inefficiency)},
                       {"technical_efficiency", vec(r.technical_efficiency)},
                       {"mu_star", vec(r.mu_star)},
                       {"sigma_star", r.sigma_star}};
  }
  return j;
}

ResultDocument result_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("schema_version")) {
      throw Error(ErrorKind::invalid_argument, "result document: missing schema_version");
    }
    if (j.at("schema_version").get<int>() != schema_version) {
      throw Error(ErrorKind::invalid_argument,
                  "result document: unsupported schema_version " + j.at("schema_version").dump());
    }
    ResultDocument doc;
    FrontierEstimate& e = doc.estimate;
    e.spec = spec_from(j.at("spec"));
    doc.data = data_from(j.at("data"));
    e.objective_value = j.at("objective_value").get<double>();
    e.alpha = to_vec(j.at("alpha"));
    e.beta = to_mat(j.at("beta"));
    e.gamma = opt_mat(j, "gamma");
    e.delta = opt_mat(j, "delta");
    e.z_coefficients = opt_vec(j, "z_coefficients");
    e.residuals = opt_vec(j, "residuals");
    e.residual_pos = opt_vec(j, "residual_pos");
    e.residual_neg = opt_vec(j, "residual_neg");
    e.phi = opt_vec(j, "phi");
    e.fitted = to_vec(j.at("fitted"));
    if (j.at("n").get<Index>() != e.n()) throw Error(ErrorKind::invalid_argument, "result document: n mismatch");

    const json& d = j.at("diagnostics");
    e.diagnostics.status = parse_solve_status(d.at("status").get<std::string>());
    e.diagnostics.kkt.primal = d.at("kkt").at("primal").get<double>();
    e.diagnostics.kkt.dual = d.at("kkt").at("dual").get<double>();
    e.diagnostics.kkt.complementarity = d.at("kkt").at("complementarity").get<double>();
    e.diagnostics.iterations = d.at("iterations").get<int>();
    e.diagnostics.message = d.at("message").get<std::string>();
    e.diagnostics.wall_time = d.value("wall_time", 0.0);

    if (j.contains("generation")) {
      const json& gj = j.at("generation");
      GenState g;
      g.iteration = gj.at("rounds").get<int>();
      g.converged = gj.at("converged").get<bool>();
      g.total_constraints = gj.at("total_constraints").get<Index>();
      g.violations_added_per_round = gj.at("violations_added_per_round").get<std::vector<Index>>();
      g.objective_trace = gj.at("objective_trace").get<std::vector<double>>();
      for (const json& p : gj.at("active_pairs")) g.active_pairs.push_back({p.at(0).get<Index>(), p.at(1).get<Index>()});
      g.runtime = gj.value("runtime", 0.0);
      doc.generation = std::move(g);
    }
    if (j.contains("decomposition")) {
      const json& dj = j.at("decomposition");
      DecompositionResult r;
      r.method = parse_decomposition_method(dj.at("method").get<std::string>());
      r.function_type = parse_function_type(dj.at("function_type").get<std::string>());
      r.mu = dj.at("mu").get<double>();
      r.sigma_u = opt_num(dj, "sigma_u");
      r.sigma_v = opt_num(dj, "sigma_v");
      r.signal_to_noise = opt_num(dj, "signal_to_noise");
      r.sigma = opt_num(dj, "sigma");
      r.m2 = opt_num(dj, "m2");
      r.m3 = opt_num(dj, "m3");
      r.log_likelihood = opt_num(dj, "log_likelihood");
      r.bandwidth = opt_num(dj, "bandwidth");
      doc.decomposition = r;
    }
    if (j.contains("efficiency")) {
      const json& ej = j.at("efficiency");
      EfficiencyResult r;
      r.conditional_inefficiency = to_vec(ej.at("conditional_inefficiency"));
      r.technical_efficiency = to_vec(ej.at("technical_efficiency"));
      r.mu_star = to_vec(ej.at("mu_star"));
      r.sigma_star = ej.at("sigma_star").get<double>();
      doc.efficiency = std::move(r);
    }
    return doc;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::invalid_argument, std::string("result document: ") + ex.what());
  }
}

}  // namespace frontier
