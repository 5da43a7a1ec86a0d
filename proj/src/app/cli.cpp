#include "mimm/app/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "mimm/app/benchmark.hpp"
#include "mimm/app/estimate.hpp"
#include "mimm/app/verify.hpp"
#include "mimm/core/io.hpp"
#include "mimm/core/statistics.hpp"
#include "mimm/gaussian/simulate.hpp"
#include "mimm/gaussian/transforms.hpp"

namespace mimm::app {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct SimulateArgs {
  std::vector<double> ar;
  std::optional<double> sigma2;
  std::vector<double> theta;
  std::optional<double> tau2;
  std::vector<std::string> var1;
  std::string params;
  std::size_t n = 0;
  std::uint64_t seed = 1;
  int burn_in = 100;
  std::string out;
};

struct FitArgs {
  std::string data;
  std::vector<std::string> specs;
  std::string estimator = "ple-naive";
  std::uint64_t seed = 1;
  bool standardize = false;
  std::size_t threads = 1;
  double time_limit_s = 0.0;
  std::optional<double> eta;
  std::optional<std::size_t> iters;
  std::optional<double> lr0;
  std::optional<double> decay;
  std::optional<int> max_epochs;
  std::optional<double> tol;
  std::optional<std::size_t> burn_in;
  std::optional<std::size_t> samples;
  std::optional<int> max_iters;
  std::optional<double> grad_tol;
  std::string diagnostics;
  std::string out;
};

struct BenchArgs {
  std::string manifest;
  std::optional<std::size_t> reps;
  std::optional<double> time_limit_s;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string out = ".";
};

struct VerifyArgs {
  std::optional<double> riccati_tol;
  std::uint64_t seed = VerifyOptions{}.seed;
  bool list = false;
  std::string out;
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  require(static_cast<bool>(f), ErrorKind::io, "cannot write " + path.string());
  f << text;
  require(static_cast<bool>(f), ErrorKind::io, "write failed for " + path.string());
}

Matrix read_matrix(const std::string& path) {
  const TimeSeries t = read_csv(path);
  return t.data();
}

ojson to_json(const Vector& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ojson number_or_null(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? ojson(*v) : ojson(nullptr);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const int sources = (!a.ar.empty()) + (!a.theta.empty()) + (!a.var1.empty()) + (!a.params.empty());
  require(sources == 1, ErrorKind::validation,
          "give exactly one of --ar, --theta, --var1 or --params");
  require(a.n >= 1, ErrorKind::validation, "--n must be >= 1");
  require(a.burn_in >= 0, ErrorKind::validation, "--burn-in must be >= 0");

  ParamRecord record;
  if (!a.ar.empty()) {
    require(a.sigma2.has_value(), ErrorKind::validation, "--ar needs --sigma2");
    ClassicalARParams p;
    p.phi = Eigen::Map<const Vector>(a.ar.data(), static_cast<Eigen::Index>(a.ar.size()));
    p.sigma2 = *a.sigma2;
    record = p;
  } else if (!a.theta.empty()) {
    require(a.tau2.has_value(), ErrorKind::validation, "--theta needs --tau2");
    MinInfoARParams p;
    p.theta = Eigen::Map<const Vector>(a.theta.data(), static_cast<Eigen::Index>(a.theta.size()));
    p.tau2 = *a.tau2;
    record = p;
  } else if (!a.var1.empty()) {
    ClassicalVARParams p;
    p.A.push_back(read_matrix(a.var1.at(0)));
    p.Sigma = read_matrix(a.var1.at(1));
    record = p;
  } else {
    record = parse_param_record(read_key_values(a.params));
  }

  // Minimum-information input is converted to the classical form first.
  if (const auto* mi = std::get_if<MinInfoARParams>(&record)) {
    const auto d = mi->theta.size();
    record = d == 1 ? mininfo_to_ar1(*mi) : d == 2 ? mininfo_to_ar2(*mi) : mininfo_to_ard(*mi);
  } else if (const auto* mv = std::get_if<MinInfoVARParams>(&record)) {
    record = mininfo_to_var1(*mv);
  }

  TimeSeries series = std::holds_alternative<ClassicalARParams>(record)
                          ? simulate_ar(std::get<ClassicalARParams>(record), a.n, a.burn_in, a.seed)
                          : simulate_var(std::get<ClassicalVARParams>(record), a.n, a.burn_in, a.seed);
  require(!a.out.empty(), ErrorKind::validation, "--out is required");
  const fs::path path(a.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_csv(series, path);
  KeyValues meta = to_key_values(record);
  meta["model"] = std::holds_alternative<ClassicalARParams>(record) ? "ar" : "var";
  meta["n"] = std::to_string(a.n);
  meta["seed"] = std::to_string(a.seed);
  meta["burn_in"] = std::to_string(a.burn_in);
  meta["kinds"] = format_kinds(series.kinds());
  write_key_values(meta, sidecar_path(path));
  out << "wrote " << series.length() << "x" << series.dim() << " series to " << path.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- fit

void check_compatibility(const FitArgs& a, Estimator est) {
  const auto reject = [&](bool given, const char* flag, const char* users) {
    require(!given, ErrorKind::validation,
            std::string(flag) + " applies only to " + users + ", not " + to_string(est));
  };
  const bool sgd = est == Estimator::ple_sgd;
  const bool gd = est == Estimator::ple_naive || est == Estimator::ple_bipartition;
  const bool mcle = est == Estimator::mcle;
  if (!sgd) {
    reject(a.eta.has_value(), "--eta", "ple-sgd");
    reject(a.iters.has_value(), "--iters", "ple-sgd");
  }
  if (!gd) {
    reject(a.lr0.has_value(), "--lr0", "ple-naive/ple-bipartition");
    reject(a.decay.has_value(), "--decay", "ple-naive/ple-bipartition");
    reject(a.max_epochs.has_value(), "--max-epochs", "ple-naive/ple-bipartition");
    reject(a.tol.has_value(), "--tol", "ple-naive/ple-bipartition");
  }
  if (!mcle) {
    reject(a.burn_in.has_value(), "--burn-in", "mcle");
    reject(a.samples.has_value(), "--samples", "mcle");
    reject(a.max_iters.has_value(), "--max-iters", "mcle");
    reject(a.grad_tol.has_value(), "--grad-tol", "mcle");
    reject(!a.diagnostics.empty(), "--diagnostics", "mcle");
  }
}

EstimatorOptions options_from(const FitArgs& a) {
  EstimatorOptions o;
  o.seed = a.seed;
  o.gd.threads = a.threads;
  if (a.eta) o.sgd.eta = *a.eta;
  if (a.iters) o.sgd.n_iters = *a.iters;
  if (a.lr0) o.gd.lr0 = *a.lr0;
  if (a.decay) o.gd.decay = *a.decay;
  if (a.max_epochs) o.gd.max_epochs = *a.max_epochs;
  if (a.tol) o.gd.tol = *a.tol;
  if (a.samples) o.exchange.n_samples = *a.samples;
  if (a.burn_in) o.exchange.burn_in = *a.burn_in;
  if (a.max_iters) o.scoring.max_iters = *a.max_iters;
  if (a.grad_tol) o.scoring.grad_tol = *a.grad_tol;
  require(a.threads >= 1, ErrorKind::validation, "--threads must be >= 1");
  require(o.sgd.eta > 0, ErrorKind::validation, "--eta must be positive");
  require(o.gd.lr0 > 0, ErrorKind::validation, "--lr0 must be positive");
  require(o.gd.decay >= 0, ErrorKind::validation, "--decay must be >= 0");
  require(o.gd.tol > 0, ErrorKind::validation, "--tol must be positive");
  require(o.exchange.n_samples >= 1, ErrorKind::validation, "--samples must be >= 1");
  require(o.scoring.grad_tol > 0, ErrorKind::validation, "--grad-tol must be positive");
  require(a.time_limit_s >= 0, ErrorKind::validation, "--time-limit-s must be >= 0");
  return o;
}

ojson effective_config(const FitArgs& a, const EstimatorOptions& o, Estimator est) {
  ojson c;
  c["data"] = a.data;
  c["spec"] = a.specs;
  c["estimator"] = to_string(est);
  c["seed"] = a.seed;
  c["standardize"] = a.standardize;
  c["time_limit_s"] = a.time_limit_s;
  c["threads"] = a.threads;
  switch (est) {
    case Estimator::ple_naive:
    case Estimator::ple_bipartition:
      c["lr0"] = o.gd.lr0;
      c["decay"] = o.gd.decay;
      c["max_epochs"] = o.gd.max_epochs;
      c["tol"] = o.gd.tol;
      break;
    case Estimator::ple_sgd:
      c["eta"] = o.sgd.eta;
      c["iters"] = o.sgd.n_iters;
      break;
    case Estimator::mcle:
      c["samples"] = o.exchange.n_samples;
      c["burn_in"] = o.exchange.effective_burn_in();
      c["max_iters"] = o.scoring.max_iters;
      c["grad_tol"] = o.scoring.grad_tol;
      break;
    case Estimator::mle:
      break;
  }
  return c;
}

TimeSeries load_data(const std::string& path, bool standardize) {
  require(!path.empty(), ErrorKind::validation, "--data is required");
  TimeSeries s = read_csv(path);
  return standardize ? standard_scale(s) : s;
}

Deadline deadline_for(double seconds) {
  return seconds > 0 ? Deadline::after(seconds) : Deadline::none();
}

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  const Estimator est = parse_estimator(a.estimator);
  check_compatibility(a, est);
  require(a.specs.size() == 1, ErrorKind::validation, "fit takes exactly one --spec");
  const EstimatorOptions opts = options_from(a);
  const DependenceSpec spec = load_spec(a.specs.front());
  const TimeSeries data = load_data(a.data, a.standardize);
  require(spec.dim() == static_cast<int>(data.dim()), ErrorKind::shape,
          "spec uses " + std::to_string(spec.dim()) + " components, data has " +
              std::to_string(data.dim()));
  if (est == Estimator::mcle && spec.order() >= 2 && data.length() >= 1000) {
    err << "warning: mcle with d=" << spec.order() << " on n=" << data.length()
        << " mixes slowly (acceptance falls with d); expect a long run or a timeout\n";
  }

  const Estimate e = estimate(est, spec, data, opts, deadline_for(a.time_limit_s));
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "fit";
  j["estimator"] = to_string(est);
  j["spec_terms"] = format_spec(spec);
  j["K"] = spec.size();
  j["theta"] = to_json(e.theta);
  j["log_pl"] = number_or_null(e.log_pl);
  if (e.log_pl) {
    const auto ic = aic_pic(*e.log_pl, static_cast<int>(spec.size()), data.length(), spec.order());
    j["aic"] = ic.aic;
    j["pic"] = ic.pic;
  } else {
    j["aic"] = nullptr;
    j["pic"] = nullptr;
  }
  j["n_pairs_used"] = e.n_pairs_used;
  j["wall_time_s"] = e.wall_time_s;
  j["converged"] = e.converged;
  j["separation_warning"] = e.separation_warning;
  j["acceptance_rate"] = number_or_null(e.acceptance_rate);
  j["iterations"] = e.iterations;
  j["config"] = effective_config(a, opts, est);
  if (e.separation_warning) err << "warning: |theta| exceeded the divergence cap (likely separation)\n";

  if (!a.diagnostics.empty() && e.mcle) {
    std::string csv = "iter";
    for (Eigen::Index k = 0; k < e.theta.size(); ++k) csv += ",theta_" + std::to_string(k + 1);
    csv += ",score_norm,acceptance_rate\n";
    for (std::size_t i = 0; i < e.mcle->score_norm_trace.size(); ++i) {
      csv += std::to_string(i);
      for (Eigen::Index k = 0; k < e.theta.size(); ++k) csv += "," + fmt("%.17g", e.mcle->theta_trace[i][k]);
      csv += "," + fmt("%.17g", e.mcle->score_norm_trace[i]) + "," +
             fmt("%.17g", e.mcle->acceptance_trace[i]) + "\n";
    }
    write_text(a.diagnostics, csv);
  }
  const std::string text = j.dump(2) + "\n";
  if (a.out.empty()) {
    out << text;
  } else {
    write_text(a.out, text);
    out << "wrote " << a.out << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- select

int cmd_select(const FitArgs& a, std::ostream& out, std::ostream& err) {
  const Estimator est = parse_estimator(a.estimator);
  require(est == Estimator::ple_naive || est == Estimator::ple_bipartition || est == Estimator::ple_sgd,
          ErrorKind::validation, "select ranks pseudo-likelihood fits; use a ple-* estimator");
  check_compatibility(a, est);
  require(a.specs.size() >= 2, ErrorKind::validation, "select needs at least two --spec files");
  const EstimatorOptions opts = options_from(a);
  const TimeSeries data = load_data(a.data, a.standardize);

  struct Row {
    std::string label, terms;
    std::size_t k = 0;
    Vector theta;
    double log_pl = 0, aic = 0, pic = 0;
    bool ok = false;
    std::string error;
  };
  std::vector<DependenceSpec> specs;
  std::vector<Row> rows;
  int order = 1;
  for (const auto& path : a.specs) {
    Row r;
    r.label = fs::path(path).stem().string();
    try {
      specs.push_back(load_spec(path));
      order = std::max(order, specs.back().order());
      r.terms = format_spec(specs.back());
      r.k = specs.back().size();
    } catch (const Error& e) {
      specs.push_back(ar_spec(1));
      r.error = e.what();
    }
    rows.push_back(r);
  }
  // Every candidate is scored on the interior of the largest order.
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& r = rows[i];
    if (!r.error.empty()) continue;
    try {
      const Estimate e = estimate(est, specs[i].with_order(order), data, opts, deadline_for(a.time_limit_s));
      r.theta = e.theta;
      r.log_pl = e.log_pl.value_or(std::nan(""));
      const auto ic = aic_pic(r.log_pl, static_cast<int>(r.k), data.length(), order);
      r.aic = ic.aic;
      r.pic = ic.pic;
      r.ok = std::isfinite(r.aic);
      if (!r.ok) r.error = "non-finite pseudo-likelihood";
    } catch (const Error& e) {
      r.error = e.what();
      err << "spec " << r.label << ": " << e.what() << "\n";
    }
  }
  std::optional<std::size_t> best_aic, best_pic;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].ok) continue;
    if (!best_aic || rows[i].aic < rows[*best_aic].aic) best_aic = i;
    if (!best_pic || rows[i].pic < rows[*best_pic].pic) best_pic = i;
  }
  require(best_aic.has_value(), ErrorKind::validation, "every candidate spec failed to fit");

  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "select";
  j["estimator"] = to_string(est);
  j["common_order"] = order;
  j["n"] = data.length();
  j["rows"] = ojson::array();
  std::string csv = "spec,K,log_pl,aic,pic,best_aic,best_pic,theta,status\n";
  std::vector<std::vector<std::string>> table{{"spec", "K", "log L_PLE", "AIC", "PIC", "theta"}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    ojson row;
    row["spec"] = r.label;
    row["path"] = a.specs[i];
    row["terms"] = r.terms;
    row["K"] = r.k;
    row["ok"] = r.ok;
    std::string theta_text;
    if (r.ok) {
      row["theta"] = to_json(r.theta);
      row["log_pl"] = r.log_pl;
      row["aic"] = r.aic;
      row["pic"] = r.pic;
      for (Eigen::Index k = 0; k < r.theta.size(); ++k) theta_text += (k ? " " : "") + fmt("%.4g", r.theta[k]);
    } else {
      row["error"] = r.error;
    }
    row["best_aic"] = best_aic == i;
    row["best_pic"] = best_pic == i;
    j["rows"].push_back(row);
    csv += r.label + "," + std::to_string(r.k) + "," + (r.ok ? fmt("%.17g", r.log_pl) : "") + "," +
           (r.ok ? fmt("%.17g", r.aic) : "") + "," + (r.ok ? fmt("%.17g", r.pic) : "") + "," +
           (best_aic == i ? "1" : "0") + "," + (best_pic == i ? "1" : "0") + "," + theta_text + "," +
           (r.ok ? "ok" : "failed") + "\n";
    table.push_back({r.label, std::to_string(r.k), r.ok ? fmt("%.2f", r.log_pl) : "failed",
                     r.ok ? fmt("%.2f", r.aic) + (best_aic == i ? " *" : "  ") : "--",
                     r.ok ? fmt("%.2f", r.pic) + (best_pic == i ? " *" : "  ") : "--", theta_text});
  }
  j["config"] = effective_config(a, opts, est);

  std::vector<std::size_t> width(table[0].size(), 0);
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string text;
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string pad(width[c] - row[c].size(), ' ');
      text += (c ? "  " : "") + (c == 0 || c == 5 ? row[c] + pad : pad + row[c]);
    }
    text += "\n";
  }
  text += "(* marks the minimum of each criterion)\n";
  out << text;
  if (!a.out.empty()) {
    write_text(a.out + ".csv", csv);
    write_text(a.out + ".txt", text);
    write_text(a.out + ".json", j.dump(2) + "\n");
  }
  return 0;
}

// ---------------------------------------------------------------- benchmark

int cmd_benchmark(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  require(!a.manifest.empty(), ErrorKind::validation, "--manifest is required");
  Manifest m = load_manifest(a.manifest);
  if (a.reps) m.reps = *a.reps;
  if (a.time_limit_s) m.time_limit_s = *a.time_limit_s;
  if (a.seed) m.seed = *a.seed;
  if (a.threads) m.threads = *a.threads;
  require(m.reps >= 1, ErrorKind::validation, "benchmark needs --reps >= 1");
  require(m.time_limit_s > 0, ErrorKind::validation, "--time-limit-s must be positive");
  require(m.threads >= 1, ErrorKind::validation, "--threads must be >= 1");

  const std::size_t total = m.cells.size() * m.reps;
  std::size_t done = 0;
  const auto report = run_benchmark(m, [&](const RunRecord& r) {
    ++done;
    if (r.status == RunStatus::timeout || r.status == RunStatus::failed) {
      err << "[" << done << "/" << total << "] cell " << r.cell << " rep " << r.rep << ": "
          << to_string(r.status) << " " << r.message << "\n";
    } else if (done % 10 == 0 || done == total) {
      err << "[" << done << "/" << total << "]\n";
    }
  });
  const fs::path dir(a.out);
  write_text(dir / (m.name + ".csv"), rows_csv(report));
  write_text(dir / (m.name + "_runs.csv"), runs_csv(report, m));
  const std::string text = rows_text(report);
  write_text(dir / (m.name + ".txt"), text);
  out << text;
  return 0;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  if (a.list) {
    for (const auto& n : verify_check_names()) out << n << "\n";
    return 0;
  }
  VerifyOptions opts;
  opts.seed = a.seed;
  if (a.riccati_tol) {
    require(*a.riccati_tol > 0, ErrorKind::validation, "--riccati-tol must be positive");
    opts.riccati.tol = *a.riccati_tol;
  }
  const auto start = std::chrono::steady_clock::now();
  const auto results = run_verify(opts);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "verify";
  j["riccati_tol"] = opts.riccati.tol;
  j["seconds"] = secs;
  j["checks"] = ojson::array();
  bool all = true;
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  for (const auto& r : results) {
    all = all && r.passed;
    ojson c;
    c["name"] = r.name;
    c["passed"] = r.passed;
    c["measured"] = std::isfinite(r.measured) ? ojson(r.measured) : ojson(nullptr);
    c["tolerance"] = r.tolerance;
    c["seconds"] = r.seconds;
    c["detail"] = r.detail;
    j["checks"].push_back(c);
    out << (r.passed ? "PASS " : "FAIL ") << r.name << std::string(width - r.name.size(), ' ')
        << "  measured " << fmt("%.3e", r.measured) << "  tolerance " << fmt("%.1e", r.tolerance)
        << "  " << r.detail << "\n";
  }
  j["passed"] = all;
  out << (all ? "all " : "some ") << "checks " << (all ? "passed" : "FAILED") << " ("
      << results.size() << " checks, " << fmt("%.2f", secs) << " s)\n";
  if (!a.out.empty()) write_text(a.out, j.dump(2) + "\n");
  return all ? 0 : 3;
}

void add_estimator_flags(CLI::App* c, FitArgs& a) {
  c->add_option("--data", a.data, "CSV data file (kinds from <file>.meta)")->required();
  c->add_option("--estimator", a.estimator, "mle, mcle, ple-naive, ple-bipartition or ple-sgd")
      ->capture_default_str();
  c->add_option("--seed", a.seed, "seed for pairings, pair streams and MCMC")->capture_default_str();
  c->add_flag("--standardize", a.standardize,
              "scale real columns to zero mean and unit variance (divides by n)");
  c->add_option("--threads", a.threads, "workers for the all-pairs objective")->capture_default_str();
  c->add_option("--time-limit-s", a.time_limit_s, "abort a fit after this many seconds (0: none)");
  c->add_option("--eta", a.eta, "ple-sgd learning rate (default 0.01)");
  c->add_option("--iters", a.iters, "ple-sgd iterations (default 10000)");
  c->add_option("--lr0", a.lr0, "gradient ascent initial rate, in units of 1/curvature (default 1)");
  c->add_option("--decay", a.decay, "inverse-time decay constant (default 0.01)");
  c->add_option("--max-epochs", a.max_epochs, "gradient ascent epochs (default 500)");
  c->add_option("--tol", a.tol, "gradient norm stop for the mean objective (default 1e-6)");
  c->add_option("--burn-in", a.burn_in, "mcle burn-in steps per chain (default samples/10)");
  c->add_option("--samples", a.samples, "mcle retained samples per iteration (default 10000)");
  c->add_option("--max-iters", a.max_iters, "mcle Fisher scoring iterations (default 20)");
  c->add_option("--grad-tol", a.grad_tol, "mcle relative score norm stop (default 1e-6)");
  c->add_option("--out", a.out, "output path");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimum information Markov model: simulation, estimation, selection, benchmarks"};
  app.set_config("--config", "", "TOML/INI file with option defaults (flags take precedence)");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "simulate an AR(d) or VAR(1) series to CSV");
  s->add_option("--ar", sim.ar, "AR coefficients phi_1,...,phi_d")->delimiter(',');
  s->add_option("--sigma2", sim.sigma2, "noise variance for --ar");
  s->add_option("--theta", sim.theta, "minimum-information theta_1,...,theta_d")->delimiter(',');
  s->add_option("--tau2", sim.tau2, "stationary variance for --theta");
  s->add_option("--var1", sim.var1, "VAR(1) coefficient and noise covariance CSV files")->expected(2);
  s->add_option("--params", sim.params, "key=value parameter record (phi.i, sigma2, A.k.i.j, ...)");
  s->add_option("--n", sim.n, "series length")->required();
  s->add_option("--seed", sim.seed, "random seed")->capture_default_str();
  s->add_option("--burn-in", sim.burn_in, "discarded initial steps")->capture_default_str();
  s->add_option("--out", sim.out, "output CSV path (a .meta sidecar is written next to it)")->required();

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "estimate theta for one dependence spec");
  f->add_option("--spec", fit.specs, "dependence spec file")->required();
  add_estimator_flags(f, fit);
  f->add_option("--diagnostics", fit.diagnostics, "mcle per-iteration CSV");

  FitArgs sel;
  sel.estimator = "ple-naive";
  auto* c = app.add_subcommand("select", "rank candidate specs by AIC and PIC");
  c->add_option("--spec", sel.specs, "candidate spec files (two or more)")->required();
  add_estimator_flags(c, sel);

  BenchArgs bench;
  auto* b = app.add_subcommand("benchmark", "run a benchmark manifest");
  b->add_option("manifest,--manifest", bench.manifest, "benchmark manifest (JSON)")->required();
  b->add_option("--reps", bench.reps, "override the repetitions per cell");
  b->add_option("--time-limit-s", bench.time_limit_s, "override the per-run time limit");
  b->add_option("--seed", bench.seed, "override the base seed");
  b->add_option("--threads", bench.threads, "worker threads");
  b->add_option("--out", bench.out, "output directory")->capture_default_str();

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "run the invariant suite against the oracles");
  v->add_option("--riccati-tol", ver.riccati_tol, "override the Riccati solver tolerance");
  v->add_option("--seed", ver.seed, "seed for the randomized checks")->capture_default_str();
  v->add_flag("--list", ver.list, "print the check names and exit");
  v->add_option("--out", ver.out, "write the JSON report here");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (s->parsed()) return cmd_simulate(sim, out);
    if (f->parsed()) return cmd_fit(fit, out, err);
    if (c->parsed()) return cmd_select(sel, out, err);
    if (b->parsed()) return cmd_benchmark(bench, out, err);
    if (v->parsed()) return cmd_verify(ver, out);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace mimm::app
