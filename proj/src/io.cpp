#include "bpinn/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "bpinn/errors.hpp"

namespace bpinn {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double(const std::string& s, long line, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("could not parse ") + what + " '" + s + "'", line);
  }
}

}  // namespace

std::vector<LongitudinalSeries> load_cohort(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open cohort file: " + path);

  struct Row {
    double time;
    double volume;
    long line;
  };
  std::vector<std::string> order;
  std::map<std::string, std::vector<Row>> rows;

  std::string line;
  long lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!header_seen) {
      const auto fields = split_csv_line(t);
      if (fields.size() != 3 || fields[0] != "patient_id" ||
          fields[1] != "time_days" || fields[2] != "volume_mm3")
        throw ParseError("expected header patient_id,time_days,volume_mm3", lineno);
      header_seen = true;
      continue;
    }
    const auto fields = split_csv_line(t);
    if (fields.size() != 3) throw ParseError("expected 3 comma-separated fields", lineno);
    const std::string& id = fields[0];
    if (id.empty()) throw ParseError("empty patient_id", lineno);
    const double time = parse_double(fields[1], lineno, "time_days");
    const double volume = parse_double(fields[2], lineno, "volume_mm3");
    if (!(volume > 0.0))
      throw ParseError("volume_mm3 must be positive", lineno);
    if (rows.find(id) == rows.end()) order.push_back(id);
    rows[id].push_back(Row{time, volume, lineno});
  }
  if (!header_seen) throw ParseError("missing header line in " + path);

  std::vector<LongitudinalSeries> cohort;
  cohort.reserve(order.size());
  for (const std::string& id : order) {
    auto& r = rows[id];
    std::stable_sort(r.begin(), r.end(),
                     [](const Row& a, const Row& b) { return a.time < b.time; });
    for (std::size_t i = 1; i < r.size(); ++i)
      if (r[i].time == r[i - 1].time)
        throw ParseError("duplicate observation time for patient " + id,
                         std::max(r[i].line, r[i - 1].line));
    std::vector<double> times, volumes;
    times.reserve(r.size());
    volumes.reserve(r.size());
    for (const Row& row : r) {
      times.push_back(row.time);
      volumes.push_back(row.volume);
    }
    cohort.push_back(LongitudinalSeries::from_volumes(id, std::move(times),
                                                      std::move(volumes)));
  }
  return cohort;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string("N/A");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

}  // namespace

void write_cohort_csv(const std::string& path,
                      const std::vector<LongitudinalSeries>& cohort) {
  auto out = open_out(path);
  out << "patient_id,time_days,volume_mm3\n";
  for (const auto& s : cohort)
    for (std::size_t i = 0; i < s.size(); ++i)
      out << s.patient_id << ',' << fmt_double(s.times[i]) << ','
          << fmt_double(s.volumes[i]) << '\n';
}

void write_truth_csv(const std::string& path,
                     const std::vector<SyntheticPatient>& cohort) {
  auto out = open_out(path);
  out << "patient_id,alpha,beta,y0,t0\n";
  for (const auto& p : cohort)
    out << p.series.patient_id << ',' << fmt_double(p.truth.alpha) << ','
        << fmt_double(p.truth.beta) << ',' << fmt_double(p.truth.y0) << ','
        << fmt_double(p.truth.t0) << '\n';
}

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& scope) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ParseError("unknown config key '" + scope + it.key() + "'");
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& dst) {
  if (obj.contains(key)) dst = obj.at(key).get<T>();
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("config root must be a JSON object");
  reject_unknown_keys(doc,
                      {"seed", "grid_points", "horizon_factor", "train_count",
                       "methods", "energy", "hmc", "map"},
                      "");

  RunConfig cfg;
  read_field(doc, "seed", cfg.seed);
  read_field(doc, "grid_points", cfg.grid_points);
  read_field(doc, "horizon_factor", cfg.horizon_factor);
  read_field(doc, "train_count", cfg.train_count);
  if (doc.contains("methods")) {
    cfg.methods.clear();
    for (const auto& m : doc.at("methods"))
      cfg.methods.push_back(parse_method(m.get<std::string>()));
    if (cfg.methods.empty()) throw ParseError("config: methods must be nonempty");
  }

  if (doc.contains("energy")) {
    const json& e = doc.at("energy");
    reject_unknown_keys(e,
                        {"sigma_d", "sigma_p", "sigma_w", "weight_data",
                         "weight_phys", "weight_prior", "n_collocation",
                         "physics_mean", "prior_alpha", "prior_beta", "y0_prior",
                         "sigma_v", "infer_sigma_v", "sigma_v_scale"},
                        "energy.");
    read_field(e, "sigma_d", cfg.energy.sigma_d);
    read_field(e, "sigma_p", cfg.energy.sigma_p);
    if (e.contains("sigma_w")) {
      if (e.at("sigma_w").is_null())
        cfg.energy.sigma_w = std::numeric_limits<double>::infinity();
      else
        cfg.energy.sigma_w = e.at("sigma_w").get<double>();
    }
    read_field(e, "weight_data", cfg.energy.weight_data);
    read_field(e, "weight_phys", cfg.energy.weight_phys);
    read_field(e, "weight_prior", cfg.energy.weight_prior);
    read_field(e, "n_collocation", cfg.energy.n_collocation);
    read_field(e, "physics_mean", cfg.energy.physics_mean);
    if (e.contains("prior_alpha")) {
      const json& p = e.at("prior_alpha");
      reject_unknown_keys(p, {"mu", "sigma"}, "energy.prior_alpha.");
      read_field(p, "mu", cfg.energy.prior_alpha.mu);
      read_field(p, "sigma", cfg.energy.prior_alpha.sigma);
    }
    if (e.contains("prior_beta")) {
      const json& p = e.at("prior_beta");
      reject_unknown_keys(p, {"mu", "sigma"}, "energy.prior_beta.");
      read_field(p, "mu", cfg.energy.prior_beta.mu);
      read_field(p, "sigma", cfg.energy.prior_beta.sigma);
    }
    if (e.contains("y0_prior")) {
      const json& p = e.at("y0_prior");
      reject_unknown_keys(p, {"mean", "sd"}, "energy.y0_prior.");
      if (p.contains("mean")) {
        if (p.at("mean").is_null())
          cfg.energy.y0_prior.mean = std::numeric_limits<double>::quiet_NaN();
        else
          cfg.energy.y0_prior.mean = p.at("mean").get<double>();
      }
      read_field(p, "sd", cfg.energy.y0_prior.sd);
    }
    read_field(e, "sigma_v", cfg.energy.sigma_v);
    read_field(e, "infer_sigma_v", cfg.energy.infer_sigma_v);
    read_field(e, "sigma_v_scale", cfg.energy.sigma_v_scale);
  }

  if (doc.contains("hmc")) {
    const json& h = doc.at("hmc");
    reject_unknown_keys(h, {"step_size", "leapfrog_steps", "n_samples", "burn_in"},
                        "hmc.");
    read_field(h, "step_size", cfg.hmc.step_size);
    read_field(h, "leapfrog_steps", cfg.hmc.leapfrog_steps);
    read_field(h, "n_samples", cfg.hmc.n_samples);
    read_field(h, "burn_in", cfg.hmc.burn_in);
  }

  if (doc.contains("map")) {
    const json& m = doc.at("map");
    reject_unknown_keys(m, {"learning_rate", "epochs", "layer_sizes"}, "map.");
    read_field(m, "learning_rate", cfg.map.learning_rate);
    read_field(m, "epochs", cfg.map.epochs);
    if (m.contains("layer_sizes"))
      cfg.map.layer_sizes = m.at("layer_sizes").get<std::vector<int>>();
  }

  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string serialize_run_config(const RunConfig& cfg) {
  json doc;
  doc["seed"] = cfg.seed;
  doc["grid_points"] = cfg.grid_points;
  doc["horizon_factor"] = cfg.horizon_factor;
  doc["train_count"] = cfg.train_count;
  json methods = json::array();
  for (Method m : cfg.methods) methods.push_back(method_name(m));
  doc["methods"] = methods;

  json e;
  e["sigma_d"] = cfg.energy.sigma_d;
  e["sigma_p"] = cfg.energy.sigma_p;
  if (std::isfinite(cfg.energy.sigma_w)) e["sigma_w"] = cfg.energy.sigma_w;
  else e["sigma_w"] = nullptr;
  e["weight_data"] = cfg.energy.weight_data;
  e["weight_phys"] = cfg.energy.weight_phys;
  e["weight_prior"] = cfg.energy.weight_prior;
  e["n_collocation"] = cfg.energy.n_collocation;
  e["physics_mean"] = cfg.energy.physics_mean;
  e["prior_alpha"] = {{"mu", cfg.energy.prior_alpha.mu},
                      {"sigma", cfg.energy.prior_alpha.sigma}};
  e["prior_beta"] = {{"mu", cfg.energy.prior_beta.mu},
                     {"sigma", cfg.energy.prior_beta.sigma}};
  json y0;
  if (std::isfinite(cfg.energy.y0_prior.mean)) y0["mean"] = cfg.energy.y0_prior.mean;
  else y0["mean"] = nullptr;
  y0["sd"] = cfg.energy.y0_prior.sd;
  e["y0_prior"] = y0;
  e["sigma_v"] = cfg.energy.sigma_v;
  e["infer_sigma_v"] = cfg.energy.infer_sigma_v;
  e["sigma_v_scale"] = cfg.energy.sigma_v_scale;
  doc["energy"] = e;

  doc["hmc"] = {{"step_size", cfg.hmc.step_size},
                {"leapfrog_steps", cfg.hmc.leapfrog_steps},
                {"n_samples", cfg.hmc.n_samples},
                {"burn_in", cfg.hmc.burn_in}};
  doc["map"] = {{"learning_rate", cfg.map.learning_rate},
                {"epochs", cfg.map.epochs},
                {"layer_sizes", cfg.map.layer_sizes}};
  return doc.dump(2) + "\n";
}

void write_map_summary_csv(const std::string& path,
                           const std::vector<PatientResult>& results) {
  auto out = open_out(path);
  out << "patient_id,status,alpha_hat,beta_hat,y0_hat,final_energy\n";
  for (const auto& r : results) {
    if (r.skipped) {
      out << r.patient_id << ",skipped,N/A,N/A,N/A,N/A\n";
      continue;
    }
    out << r.patient_id << ",ok," << fmt_double(r.map.alpha_hat) << ','
        << fmt_double(r.map.beta_hat) << ',' << fmt_double(r.map.y0_hat) << ','
        << fmt_double(r.map.final_energy) << '\n';
  }
}

void write_posterior_txt(const std::string& path,
                         const std::vector<PatientResult>& results) {
  auto out = open_out(path);
  for (const auto& r : results) {
    out << "patient " << r.patient_id << '\n';
    if (r.skipped) {
      out << "status skipped (" << r.skip_reason << ")\nend\n";
      continue;
    }
    out << "status ok\n";
    out << "acceptance_rate " << fmt_double(r.posterior.acceptance_rate) << '\n';
    out << "degenerate " << (r.posterior.degenerate ? 1 : 0) << '\n';
    const auto& d = r.diagnostics;
    out << "mean " << fmt_double(d.mean[0]) << ' ' << fmt_double(d.mean[1]) << ' '
        << fmt_double(d.mean[2]) << '\n';
    out << "sd " << fmt_double(d.sd[0]) << ' ' << fmt_double(d.sd[1]) << ' '
        << fmt_double(d.sd[2]) << '\n';
    out << "lag1";
    for (int c = 0; c < 3; ++c) {
      const auto& l = d.lag1[static_cast<std::size_t>(c)];
      out << ' ' << (l ? fmt_double(*l) : std::string("degenerate"));
    }
    out << '\n';
    out << "draws " << r.posterior.draws.size() << " alpha beta y0\n";
    for (const auto& row : r.posterior.draws)
      out << fmt_double(row[0]) << ' ' << fmt_double(row[1]) << ' '
          << fmt_double(row[2]) << '\n';
    out << "end\n";
  }
}

void write_trajectory_csv(const std::string& path, const PatientResult& result) {
  auto out = open_out(path);
  out << "time,mean_log,lo_log,hi_log,mean_vol,lo_vol,hi_vol\n";
  const auto& p = result.predictive;
  for (std::size_t i = 0; i < p.grid.size(); ++i)
    out << fmt_double(p.grid[i]) << ',' << fmt_double(p.log_band.mean[i]) << ','
        << fmt_double(p.log_band.lo[i]) << ',' << fmt_double(p.log_band.hi[i]) << ','
        << fmt_double(p.vol_band.mean[i]) << ',' << fmt_double(p.vol_band.lo[i])
        << ',' << fmt_double(p.vol_band.hi[i]) << '\n';
}

void write_metrics_csv(const std::string& path,
                       const std::vector<PatientResult>& results) {
  auto out = open_out(path);
  out << "patient_id,status,n_train,n_test,rmse_log,rmse_vol,mae_vol,mae_log,"
         "coverage95,rel_ci_width,interval_score,acceptance_rate\n";
  for (const auto& r : results) {
    if (r.skipped) {
      out << r.patient_id << ",skipped,0,0,N/A,N/A,N/A,N/A,N/A,N/A,N/A,N/A\n";
      continue;
    }
    if (r.eval.n_test == 0) {
      out << r.patient_id << ",no_holdout," << r.eval.n_train
          << ",0,N/A,N/A,N/A,N/A,N/A,N/A,N/A,"
          << fmt_opt(r.eval.acceptance_rate) << '\n';
      continue;
    }
    out << r.patient_id << ",ok," << r.eval.n_train << ',' << r.eval.n_test << ','
        << fmt_double(r.eval.rmse_log) << ',' << fmt_double(r.eval.rmse_vol) << ','
        << fmt_double(r.eval.mae_vol) << ',' << fmt_double(r.eval.mae_log) << ','
        << fmt_opt(r.eval.coverage95) << ',' << fmt_opt(r.eval.rel_ci_width) << ','
        << fmt_opt(r.eval.interval_score) << ',' << fmt_opt(r.eval.acceptance_rate)
        << '\n';
  }
}

void write_summary_csv(const std::string& path,
                       const std::vector<PatientResult>& results) {
  auto out = open_out(path);
  out << "metric,mean,sd,n\n";
  for (const auto& s : summarize_cohort(results))
    out << s.name << ',' << fmt_double(s.mean) << ',' << fmt_double(s.sd) << ','
        << s.n << '\n';
}

void write_calibration_csv(const std::string& path, const CalibrationCurve& curve) {
  auto out = open_out(path);
  out << "nominal,empirical\n";
  for (std::size_t i = 0; i < curve.nominal.size(); ++i)
    out << fmt_double(curve.nominal[i]) << ',' << fmt_double(curve.empirical[i])
        << '\n';
  out << "# mean_abs_gap," << fmt_double(curve.mean_abs_gap) << '\n';
}

void write_uncertainty_profile_csv(const std::string& path,
                                   const std::vector<PatientResult>& results,
                                   int n_windows) {
  auto out = open_out(path);
  out << "patient_id,window_start,window_end,rel_ci_width\n";
  for (const auto& r : results) {
    if (r.skipped || r.predictive.grid.empty()) continue;
    const double start = r.predictive.grid.front();
    const double end = r.predictive.grid.back();
    std::vector<std::pair<double, double>> windows;
    for (int w = 0; w < n_windows; ++w)
      windows.emplace_back(start + (end - start) * w / n_windows,
                           start + (end - start) * (w + 1) / n_windows);
    const std::vector<double> widths = uncertainty_profile(r.predictive, windows);
    for (int w = 0; w < n_windows; ++w)
      out << r.patient_id << ',' << fmt_double(windows[static_cast<std::size_t>(w)].first)
          << ',' << fmt_double(windows[static_cast<std::size_t>(w)].second) << ','
          << fmt_double(widths[static_cast<std::size_t>(w)]) << '\n';
  }
}

void write_comparison_csv(const std::string& path, const ComparisonReport& report) {
  auto out = open_out(path);
  out << "method,n_ok,n_failed,rmse_log,rmse_log_sd,rmse_t_p,rmse_w_p,rmse_dz,"
         "mae_vol,mae_t_p,mae_w_p,mae_dz,mae_log,rel_ci_width,interval_score,"
         "coverage_dev,acceptance_rate,wins,losses,ties\n";
  for (const auto& c : report.columns) {
    out << method_name(c.method) << ',' << c.n_ok << ',' << c.n_failed << ','
        << fmt_double(c.rmse_log) << ',' << fmt_double(c.rmse_log_sd) << ',';
    if (c.rmse_test && !c.rmse_test->degenerate)
      out << fmt_double(c.rmse_test->t_p) << ',' << fmt_double(c.rmse_test->wilcoxon_p)
          << ',' << fmt_double(c.rmse_test->cohens_dz) << ',';
    else
      out << "N/A,N/A,N/A,";
    out << fmt_double(c.mae_vol) << ',';
    if (c.mae_test && !c.mae_test->degenerate)
      out << fmt_double(c.mae_test->t_p) << ',' << fmt_double(c.mae_test->wilcoxon_p)
          << ',' << fmt_double(c.mae_test->cohens_dz) << ',';
    else
      out << "N/A,N/A,N/A,";
    out << fmt_double(c.mae_log) << ',' << fmt_opt(c.rel_ci_width) << ','
        << fmt_opt(c.interval_score) << ',' << fmt_opt(c.coverage_dev) << ','
        << fmt_opt(c.mean_acceptance) << ',' << c.wins << ',' << c.losses << ','
        << c.ties << '\n';
  }
}

void write_paired_diffs_csv(const std::string& path, const ComparisonReport& report) {
  auto out = open_out(path);
  out << "patient_id,method,diff_sq_log_err,diff_abs_vol_err\n";
  for (const auto& d : report.paired_diffs)
    out << d.patient_id << ',' << method_name(d.method) << ','
        << fmt_double(d.diff_sq_log_err) << ',' << fmt_double(d.diff_abs_vol_err)
        << '\n';
}

}  // namespace bpinn
