#include "mimm/app/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mimm/gaussian/simulate.hpp"
#include "mimm/gaussian/transforms.hpp"

namespace mimm::app {
namespace {

using nlohmann::json;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string vector_text(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt("%g", v[i]);
  return s + ")";
}

std::string matrix_text(const Matrix& m) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    s += i ? ";" : "";
    for (Eigen::Index j = 0; j < m.cols(); ++j) s += (j ? "," : "") + fmt("%g", m(i, j));
  }
  return s + "]";
}

Matrix matrix_from(const json& j, const std::string& what) {
  require(j.is_array() && !j.empty() && j[0].is_array(), ErrorKind::validation,
          what + " must be a nested array");
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].size() == j[0].size(), ErrorKind::validation, what + " rows differ in length");
    for (std::size_t c = 0; c < j[i].size(); ++c) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
    }
  }
  return m;
}

TrueModel model_from(const json& j) {
  TrueModel m;
  m.label = j.value("label", std::string());
  require(!m.label.empty(), ErrorKind::validation, "every model needs a label");
  if (j.contains("ar")) {
    ClassicalARParams p;
    const auto phi = j.at("ar").get<std::vector<double>>();
    p.phi = Eigen::Map<const Vector>(phi.data(), static_cast<Eigen::Index>(phi.size()));
    p.sigma2 = j.at("sigma2").get<double>();
    validate_stationary(p);
    m.params = p;
  } else if (j.contains("var1")) {
    ClassicalVARParams p;
    p.A.push_back(matrix_from(j.at("var1").at("A"), "A"));
    p.Sigma = matrix_from(j.at("var1").at("Sigma"), "Sigma");
    validate_stationary(p);
    m.params = p;
  } else {
    fail(ErrorKind::validation, "model '" + m.label + "' needs an 'ar' or 'var1' entry");
  }
  return m;
}

EstimatorRun estimator_from(const json& j) {
  EstimatorRun e;
  if (j.is_string()) {
    e.kind = parse_estimator(j.get<std::string>());
    e.label = j.get<std::string>();
    return e;
  }
  e.kind = parse_estimator(j.at("name").get<std::string>());
  e.label = j.value("label", j.at("name").get<std::string>());
  auto& o = e.options;
  if (j.contains("eta")) o.sgd.eta = j["eta"].get<double>();
  if (j.contains("iters")) o.sgd.n_iters = j["iters"].get<std::size_t>();
  if (j.contains("lr0")) o.gd.lr0 = j["lr0"].get<double>();
  if (j.contains("decay")) o.gd.decay = j["decay"].get<double>();
  if (j.contains("max_epochs")) o.gd.max_epochs = j["max_epochs"].get<int>();
  if (j.contains("tol")) o.gd.tol = j["tol"].get<double>();
  if (j.contains("samples")) o.exchange.n_samples = j["samples"].get<std::size_t>();
  if (j.contains("burn_in")) o.exchange.burn_in = j["burn_in"].get<std::size_t>();
  if (j.contains("max_iters")) o.scoring.max_iters = j["max_iters"].get<int>();
  if (j.contains("grad_tol")) o.scoring.grad_tol = j["grad_tol"].get<double>();
  // Benchmarks report errors over all pairs only for PLE fits that produce them.
  o.sgd.evaluate_log_pl = false;
  return e;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

DependenceSpec TrueModel::spec() const {
  if (const auto* ar = std::get_if<ClassicalARParams>(&params)) {
    return ar_spec(static_cast<int>(ar->phi.size()));
  }
  const auto& var = std::get<ClassicalVARParams>(params);
  const KronLag lag1{};
  return kron_spec(static_cast<int>(var.Sigma.rows()), std::span(&lag1, 1));
}

Vector TrueModel::true_theta() const {
  if (const auto* ar = std::get_if<ClassicalARParams>(&params)) return ard_to_mininfo(*ar).theta;
  return var1_theta_vector(var1_to_mininfo(std::get<ClassicalVARParams>(params)).Theta);
}

TimeSeries TrueModel::simulate(std::size_t n, int burn_in, std::uint64_t seed) const {
  if (const auto* ar = std::get_if<ClassicalARParams>(&params)) {
    return simulate_ar(*ar, n, burn_in, seed);
  }
  return simulate_var(std::get<ClassicalVARParams>(params), n, burn_in, seed);
}

std::string TrueModel::describe() const {
  if (const auto* ar = std::get_if<ClassicalARParams>(&params)) {
    return "phi=" + vector_text(ar->phi) + " sigma2=" + fmt("%g", ar->sigma2);
  }
  const auto& var = std::get<ClassicalVARParams>(params);
  return "A=" + matrix_text(var.A.front()) + " Sigma=" + matrix_text(var.Sigma);
}

Manifest parse_manifest(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorKind::validation, std::string("manifest is not valid JSON: ") + e.what());
  }
  Manifest m;
  try {
    m.name = j.value("name", m.name);
    m.reps = j.value("reps", m.reps);
    m.seed = j.value("seed", m.seed);
    m.time_limit_s = j.value("time_limit_s", m.time_limit_s);
    m.burn_in = j.value("burn_in", m.burn_in);
    m.threads = j.value("threads", m.threads);
    for (const auto& mj : j.at("models")) m.models.push_back(model_from(mj));
    for (const auto& g : j.at("groups")) {
      std::vector<std::size_t> models;
      for (const auto& label : g.at("models")) {
        const auto name = label.get<std::string>();
        const auto it = std::find_if(m.models.begin(), m.models.end(),
                                     [&](const TrueModel& t) { return t.label == name; });
        require(it != m.models.end(), ErrorKind::validation, "group refers to unknown model '" + name + "'");
        models.push_back(static_cast<std::size_t>(it - m.models.begin()));
      }
      std::vector<EstimatorRun> estimators;
      for (const auto& e : g.at("estimators")) estimators.push_back(estimator_from(e));
      for (std::size_t model : models) {
        for (const auto& n : g.at("n")) {
          for (const auto& est : estimators) m.cells.push_back({model, n.get<std::size_t>(), est});
        }
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::validation, std::string("malformed manifest: ") + e.what());
  }
  require(m.reps >= 1, ErrorKind::validation, "manifest needs reps >= 1");
  require(m.time_limit_s > 0, ErrorKind::validation, "time_limit_s must be positive");
  require(!m.cells.empty(), ErrorKind::validation, "manifest expands to no cells");
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str());
}

const char* to_string(RunStatus status) noexcept {
  switch (status) {
    case RunStatus::ok: return "ok";
    case RunStatus::timeout: return "timeout";
    case RunStatus::failed: return "failed";
    case RunStatus::skipped: return "skipped";
  }
  return "?";
}

BenchmarkReport run_benchmark(const Manifest& manifest, const ProgressCallback& progress) {
  require(manifest.reps >= 1, ErrorKind::validation, "benchmark needs reps >= 1");
  const std::size_t cells = manifest.cells.size();
  const std::size_t tasks = cells * manifest.reps;
  BenchmarkReport report;
  report.name = manifest.name;
  report.runs.resize(tasks);
  std::vector<Vector> truth;
  for (const auto& m : manifest.models) truth.push_back(m.true_theta());
  auto timed_out = std::make_unique<std::atomic<bool>[]>(cells);
  for (std::size_t c = 0; c < cells; ++c) timed_out[c] = false;

  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  const auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < tasks;) {
      const std::size_t c = t / manifest.reps;
      const std::size_t r = t % manifest.reps;
      const auto& cell = manifest.cells[c];
      const auto& model = manifest.models[cell.model];
      RunRecord rec;
      rec.cell = c;
      rec.rep = r;
      if (timed_out[c]) {
        rec.message = "skipped after an earlier timeout";
      } else {
        try {
          const TimeSeries data = model.simulate(cell.n, manifest.burn_in, manifest.seed + r);
          EstimatorOptions opts = cell.estimator.options;
          opts.seed = manifest.seed + r;
          const Estimate e = estimate(cell.estimator.kind, model.spec(), data, opts,
                                      Deadline::after(manifest.time_limit_s));
          rec.status = RunStatus::ok;
          rec.error = (e.theta - truth[cell.model]).norm();
          rec.time_s = e.wall_time_s;
          rec.converged = e.converged;
        } catch (const Error& e) {
          rec.status = e.kind() == ErrorKind::timeout ? RunStatus::timeout : RunStatus::failed;
          rec.message = e.what();
          if (rec.status == RunStatus::timeout) timed_out[c] = true;
        } catch (const std::exception& e) {
          rec.status = RunStatus::failed;
          rec.message = e.what();
        }
      }
      report.runs[t] = rec;
      if (progress) {
        const std::lock_guard lock(progress_mutex);
        progress(rec);
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(manifest.threads, tasks));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t c = 0; c < cells; ++c) {
    const auto& cell = manifest.cells[c];
    BenchmarkRow row;
    row.model = manifest.models[cell.model].label;
    row.params = manifest.models[cell.model].describe();
    row.n = cell.n;
    row.estimator = cell.estimator.label;
    row.reps = manifest.reps;
    std::vector<double> errors, times;
    for (std::size_t r = 0; r < manifest.reps; ++r) {
      const auto& rec = report.runs[c * manifest.reps + r];
      if (rec.status == RunStatus::ok) {
        errors.push_back(rec.error);
        times.push_back(rec.time_s);
      } else if (rec.status == RunStatus::timeout) {
        row.timed_out = true;
      } else if (rec.status == RunStatus::failed) {
        ++row.failed;
      }
      if (row.message.empty() && rec.status != RunStatus::ok) row.message = rec.message;
    }
    row.completed = errors.size();
    row.mean_error = mean(errors);
    row.mean_time_s = mean(times);
    double ss = 0.0;
    for (double e : errors) ss += (e - row.mean_error) * (e - row.mean_error);
    row.sd_error = errors.size() > 1 ? std::sqrt(ss / static_cast<double>(errors.size() - 1)) : 0.0;
    report.rows.push_back(row);
  }
  return report;
}

namespace {

bool has_value(const BenchmarkRow& r) { return !r.timed_out && r.completed > 0; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

}  // namespace

std::string rows_csv(const BenchmarkReport& report) {
  std::string out =
      "table,model,params,n,estimator,reps,completed,failed,status,mean_error,sd_error,mean_time_s\n";
  for (const auto& r : report.rows) {
    const bool v = has_value(r);
    const char* status = r.timed_out ? "timeout" : (r.completed == 0 ? "failed" : "ok");
    out += csv_field(report.name) + "," + csv_field(r.model) + "," + csv_field(r.params) + "," +
           std::to_string(r.n) + "," + csv_field(r.estimator) + "," + std::to_string(r.reps) + "," +
           std::to_string(r.completed) + "," + std::to_string(r.failed) + "," + status + "," +
           (v ? fmt("%.6g", r.mean_error) : "--") + "," + (v ? fmt("%.6g", r.sd_error) : "--") + "," +
           (v ? fmt("%.6g", r.mean_time_s) : "--") + "\n";
  }
  return out;
}

std::string runs_csv(const BenchmarkReport& report, const Manifest& manifest) {
  std::string out = "table,model,n,estimator,rep,seed,status,error,time_s,converged\n";
  for (const auto& rec : report.runs) {
    const auto& cell = manifest.cells[rec.cell];
    const bool ok = rec.status == RunStatus::ok;
    out += csv_field(report.name) + "," + csv_field(manifest.models[cell.model].label) + "," +
           std::to_string(cell.n) + "," + csv_field(cell.estimator.label) + "," +
           std::to_string(rec.rep) + "," + std::to_string(manifest.seed + rec.rep) + "," +
           to_string(rec.status) + "," + (ok ? fmt("%.6g", rec.error) : "") + "," +
           (ok ? fmt("%.6g", rec.time_s) : "") + "," + (ok ? (rec.converged ? "1" : "0") : "") + "\n";
  }
  return out;
}

std::string rows_text(const BenchmarkReport& report) {
  std::vector<std::vector<std::string>> cells{{"model", "n", "estimator", "reps", "mean error", "mean time (s)"}};
  for (const auto& r : report.rows) {
    const bool v = has_value(r);
    std::string reps = std::to_string(r.completed) + "/" + std::to_string(r.reps);
    cells.push_back({r.model, std::to_string(r.n), r.estimator, reps,
                     v ? fmt("%.4f", r.mean_error) : "--", v ? fmt("%.3f", r.mean_time_s) : "--"});
  }
  std::vector<std::size_t> width(cells[0].size(), 0);
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out = report.name + "\n";
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      const auto pad = std::string(width[i] - row[i].size(), ' ');
      out += (i ? "  " : "") + (i == 0 || i == 2 ? row[i] + pad : pad + row[i]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace mimm::app
