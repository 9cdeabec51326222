#include "svalse/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace svalse {

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& path, const std::string& what) {
  throw ConfigError("config error at '" + path + "': " + what);
}

template <typename T>
T get_or(const json& j, const std::string& key, const T& fallback,
         const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_fail(ctx + "." + key, e.what());
  }
}

template <typename T>
T get_req(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key)) config_fail(ctx + "." + key, "missing required key");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_fail(ctx + "." + key, e.what());
  }
}

SourceSpec parse_source(const json& j, const std::string& ctx) {
  SourceSpec s;
  s.initial_doa = get_req<double>(j, "doa_deg", ctx);
  if (j.contains("amplitude")) {
    const json& a = j.at("amplitude");
    const std::string type = get_req<std::string>(a, "type", ctx + ".amplitude");
    if (type == "gaussian") {
      s.amplitude.kind = AmplitudeModel::Kind::Gaussian;
      s.amplitude.variance = get_or<double>(a, "variance", 1.0, ctx + ".amplitude");
    } else if (type == "fixed") {
      s.amplitude.kind = AmplitudeModel::Kind::Fixed;
      s.amplitude.fixed = cplx(get_or<double>(a, "re", 10.0, ctx + ".amplitude"),
                               get_or<double>(a, "im", 0.0, ctx + ".amplitude"));
    } else {
      config_fail(ctx + ".amplitude.type", "expected 'gaussian' or 'fixed'");
    }
  }
  if (j.contains("motion")) {
    const json& m = j.at("motion");
    const std::string type = get_req<std::string>(m, "type", ctx + ".motion");
    if (type == "static") {
      s.motion.kind = MotionModel::Kind::Static;
    } else if (type == "random_walk") {
      s.motion.kind = MotionModel::Kind::RandomWalk;
      s.motion.std_deg = get_or<double>(m, "std_deg", 1.5, ctx + ".motion");
    } else {
      config_fail(ctx + ".motion.type", "expected 'static' or 'random_walk'");
    }
  } else {
    s.motion.kind = MotionModel::Kind::Static;
  }
  if (j.contains("active")) {
    const json& w = j.at("active");
    if (!w.is_array() || w.size() != 2)
      config_fail(ctx + ".active", "expected [t_start, t_end]");
    s.t_start = w.at(0).get<int>();
    s.t_end = w.at(1).get<int>();
  }
  return s;
}

} // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse failure in " + path + ": " + e.what());
  }

  RunConfig cfg;
  bool have_geometry = false;

  if (j.contains("scenario")) {
    const json& sc = j.at("scenario");
    if (sc.is_string()) {
      try {
        cfg.scenario = canned_scenario(sc.get<std::string>());
      } catch (const std::invalid_argument& e) {
        config_fail("scenario", e.what());
      }
      cfg.geometry = cfg.scenario.geometry;
      have_geometry = true;
    } else if (sc.is_object()) {
      cfg.scenario.t_max = get_or<int>(sc, "t_max", 50, "scenario");
      if (!sc.contains("sources") || !sc.at("sources").is_array())
        config_fail("scenario.sources", "expected an array of sources");
      int i = 0;
      for (const json& src : sc.at("sources")) {
        cfg.scenario.sources.push_back(
            parse_source(src, "scenario.sources[" + std::to_string(i) + "]"));
        ++i;
      }
    } else {
      config_fail("scenario", "expected a canned name or an object");
    }
  }

  if (j.contains("geometry")) {
    const json& g = j.at("geometry");
    try {
      cfg.geometry = ArrayGeometry::from_frequency(
          get_req<int>(g, "sensors", "geometry"),
          get_req<double>(g, "spacing_m", "geometry"),
          get_req<double>(g, "sound_speed_mps", "geometry"),
          get_req<double>(g, "frequency_hz", "geometry"));
    } catch (const std::invalid_argument& e) {
      config_fail("geometry", e.what());
    }
    have_geometry = true;
  }
  if (!have_geometry) config_fail("geometry", "missing (and no canned scenario given)");
  cfg.scenario.geometry = cfg.geometry;

  cfg.estimator.l_components = cfg.geometry.m_sensors;
  if (j.contains("estimator")) {
    const json& e = j.at("estimator");
    cfg.estimator.l_components =
        get_or<int>(e, "components", cfg.estimator.l_components, "estimator");
    cfg.estimator.p_act = get_or<double>(e, "p_act", 0.10, "estimator");
    cfg.estimator.p_deact = get_or<double>(e, "p_deact", 0.25, "estimator");
    cfg.estimator.kappa_r = get_or<double>(e, "kappa_r", 148.0, "estimator");
    cfg.estimator.prune_d = get_or<int>(e, "prune_d", 4, "estimator");
    cfg.estimator.rho0 = get_or<double>(e, "rho0", 0.5, "estimator");
    cfg.estimator.max_iter = get_or<int>(e, "max_iter", 200, "estimator");
    cfg.estimator.theta_tol = get_or<double>(e, "theta_tol", 1e-6, "estimator");
    cfg.estimator.snr_init_db = get_or<double>(e, "snr_init_db", 20.0, "estimator");
  }
  try {
    cfg.estimator.validate();
  } catch (const std::invalid_argument& e) {
    config_fail("estimator", e.what());
  }

  if (j.contains("metric")) {
    const json& m = j.at("metric");
    cfg.metric.c = get_or<double>(m, "gospa_cutoff_deg", 10.0, "metric");
    cfg.metric.c_prime = get_or<double>(m, "rmse_cutoff_deg", 10.0, "metric");
    if (!(cfg.metric.c > 0.0) || !(cfg.metric.c_prime > 0.0))
      config_fail("metric", "cutoffs must be > 0");
  }

  if (j.contains("snr_db")) {
    const json& s = j.at("snr_db");
    if (s.is_array()) {
      cfg.snr_db.clear();
      for (const json& v : s) {
        if (v.is_string() && v.get<std::string>() == "inf")
          cfg.snr_db.push_back(std::numeric_limits<double>::infinity());
        else
          cfg.snr_db.push_back(v.get<double>());
      }
    } else {
      cfg.snr_db = {s.get<double>()};
    }
    if (cfg.snr_db.empty()) config_fail("snr_db", "must be nonempty");
  }

  cfg.n_runs = get_or<int>(j, "n_runs", 1, "");
  if (cfg.n_runs < 1) config_fail("n_runs", "must be >= 1");
  cfg.seed = get_or<std::uint64_t>(j, "seed", 0, "");
  cfg.output_dir = get_or<std::string>(j, "output_dir", "out", "");
  cfg.threads = get_or<int>(j, "threads", 1, "");
  if (cfg.threads < 1) config_fail("threads", "must be >= 1");
  return cfg;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path);
  return out;
}

[[noreturn]] void data_fail(const std::string& path, int row, const std::string& what) {
  throw DataError(path + ":" + std::to_string(row) + ": " + what);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_num(const std::string& s, const std::string& path, int row) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    data_fail(path, row, "non-numeric cell '" + s + "'");
  }
  if (pos != s.size()) data_fail(path, row, "trailing junk in cell '" + s + "'");
  return v;
}

} // namespace

void write_snapshots(const std::string& path, const std::vector<Snapshot>& snaps) {
  auto out = open_out(path);
  const int m = snaps.empty() ? 0 : int(snaps.front().y.size());
  out << "t";
  for (int i = 0; i < m; ++i) out << ",re_" << i << ",im_" << i;
  out << "\n";
  for (const Snapshot& s : snaps) {
    if (int(s.y.size()) != m)
      throw DataError("write_snapshots: inconsistent snapshot lengths");
    out << s.t;
    for (int i = 0; i < m; ++i)
      out << "," << fmt_double(s.y[i].real()) << "," << fmt_double(s.y[i].imag());
    out << "\n";
  }
}

std::vector<Snapshot> parse_snapshots(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open snapshot file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  const std::vector<std::string> hdr = split_csv(line);
  if (hdr.empty() || hdr[0] != "t" || hdr.size() < 3 || hdr.size() % 2 == 0)
    data_fail(path, 1, "malformed snapshot header");
  const int m = int(hdr.size() - 1) / 2;
  for (int i = 0; i < m; ++i) {
    if (hdr[1 + 2 * i] != "re_" + std::to_string(i) ||
        hdr[2 + 2 * i] != "im_" + std::to_string(i))
      data_fail(path, 1, "snapshot header column mismatch at sensor " + std::to_string(i));
  }

  std::vector<Snapshot> snaps;
  int row = 1;
  int last_t = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (int(cells.size()) != 1 + 2 * m)
      data_fail(path, row, "expected " + std::to_string(1 + 2 * m) + " cells, got " +
                               std::to_string(cells.size()));
    const double traw = parse_num(cells[0], path, row);
    const int t = int(traw);
    if (double(t) != traw || t < 1) data_fail(path, row, "bad time index");
    if (t <= last_t) data_fail(path, row, "non-monotone time index");
    last_t = t;
    Snapshot s;
    s.t = t;
    s.y.resize(m);
    for (int i = 0; i < m; ++i) {
      s.y[i] = cplx(parse_num(cells[1 + 2 * i], path, row),
                    parse_num(cells[2 + 2 * i], path, row));
    }
    snaps.push_back(std::move(s));
  }
  if (snaps.empty()) throw DataError(path + ": no snapshot rows");
  return snaps;
}

void write_truth(const std::string& path, const Truth& truth) {
  auto out = open_out(path);
  out << "t,source_id,doa_deg,amp_re,amp_im\n";
  for (int t = 1; t <= truth.t_max; ++t) {
    for (const TruthEntry& e : truth.steps[t - 1]) {
      out << t << "," << e.source_id << "," << fmt_double(e.doa_deg) << ","
          << fmt_double(e.amplitude.real()) << "," << fmt_double(e.amplitude.imag())
          << "\n";
    }
  }
}

void write_tracks(const std::string& path, const std::vector<RunTrackRow>& rows) {
  auto out = open_out(path);
  out << "run,t,component_id,doa_deg,pa_rad,kappa,w_re,w_im\n";
  for (const RunTrackRow& r : rows) {
    out << r.run << "," << r.rec.t << "," << r.rec.component_id << ","
        << fmt_double(r.rec.doa_deg) << "," << fmt_double(r.rec.pa_rad) << ","
        << fmt_double(r.rec.kappa) << "," << fmt_double(r.rec.weight.real()) << ","
        << fmt_double(r.rec.weight.imag()) << "\n";
  }
}

void write_metrics(const std::string& path, const std::vector<MetricsRow>& rows) {
  auto out = open_out(path);
  out << "run,method,snr_db,t,gospa_total,gospa_dist,gospa_miss,gospa_false,"
         "rmse,n_true,n_est\n";
  for (const MetricsRow& r : rows) {
    out << r.run << "," << r.method << "," << fmt_double(r.snr_db) << "," << r.t
        << "," << fmt_double(r.gospa.total) << "," << fmt_double(r.gospa.dist)
        << "," << fmt_double(r.gospa.miss) << "," << fmt_double(r.gospa.false_)
        << "," << fmt_double(r.rmse) << "," << r.n_true << "," << r.n_est << "\n";
  }
}

void write_summary(const std::string& path, const std::vector<SummaryRow>& rows) {
  auto out = open_out(path);
  out << "method,snr_db,gospa_total,gospa_dist,gospa_miss,gospa_false,rmse\n";
  for (const SummaryRow& r : rows) {
    out << r.method << "," << fmt_double(r.snr_db) << ","
        << fmt_double(r.summary.gospa.total) << "," << fmt_double(r.summary.gospa.dist)
        << "," << fmt_double(r.summary.gospa.miss) << ","
        << fmt_double(r.summary.gospa.false_) << "," << fmt_double(r.summary.rmse)
        << "\n";
  }
}

} // namespace svalse
