// Batch front end: scenario simulation, sequential/nonsequential estimation,
// and Monte Carlo benchmarks with CSV and SVG outputs.
#include <atomic>
#include <filesystem>
#include <iostream>
#include <map>
#include <thread>

#include <CLI11.hpp>

#include "svalse/io.hpp"
#include "svalse/svg.hpp"

namespace fs = std::filesystem;
using namespace svalse;

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Per-trial seed derived only from (master, snr index, run index) so that
// results do not depend on scheduling.
std::uint64_t trial_seed(std::uint64_t master, int snr_idx, int run_idx) {
  return mix64(master + 0x9e3779b97f4a7c15ULL *
                            (std::uint64_t(snr_idx) * 1000003ULL +
                             std::uint64_t(run_idx) + 1ULL));
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + dir + "': " + ec.message());
}

std::vector<double> degree_grid() {
  std::vector<double> grid;
  for (int b = -90; b <= 90; ++b) grid.push_back(double(b));
  return grid;
}

Eigen::MatrixXd cbf_background(const ArrayGeometry& geom,
                               const std::vector<Snapshot>& snaps,
                               const std::vector<double>& grid) {
  Eigen::MatrixXd power(snaps.size(), grid.size());
  for (size_t i = 0; i < snaps.size(); ++i)
    power.row(i) = cbf(geom, snaps[i].y, grid).transpose();
  return power;
}

int cmd_simulate(const RunConfig& cfg) {
  ensure_dir(cfg.output_dir);
  const Truth truth = build_truth(cfg.scenario.sources, cfg.scenario.t_max, cfg.seed);
  const std::vector<Snapshot> snaps =
      synthesize(truth, cfg.geometry, cfg.snr_db.front(), mix64(cfg.seed ^ 0x51ab5e5eULL));
  write_snapshots(cfg.output_dir + "/snapshots.csv", snaps);
  write_truth(cfg.output_dir + "/truth.csv", truth);
  std::cout << "wrote " << snaps.size() << " snapshots at "
            << fmt_double(cfg.snr_db.front()) << " dB to " << cfg.output_dir
            << "/snapshots.csv\n";
  return 0;
}

int cmd_estimate(const RunConfig& cfg, const std::string& snapshot_path,
                 bool sequential, const std::string& svg_path) {
  ensure_dir(cfg.output_dir);
  const std::vector<Snapshot> snaps = parse_snapshots(snapshot_path);
  if (int(snaps.front().y.size()) != cfg.geometry.m_sensors)
    throw DataError("snapshot sensor count " +
                    std::to_string(snaps.front().y.size()) +
                    " does not match configured geometry M = " +
                    std::to_string(cfg.geometry.m_sensors));

  const std::vector<TrackRecord> tracks =
      run_sequence(snaps, cfg.geometry, cfg.estimator, sequential);
  std::vector<RunTrackRow> rows;
  rows.reserve(tracks.size());
  for (const TrackRecord& r : tracks) rows.push_back({0, r});
  write_tracks(cfg.output_dir + "/tracks.csv", rows);
  std::cout << "wrote " << rows.size() << " track rows to " << cfg.output_dir
            << "/tracks.csv\n";

  if (!svg_path.empty()) {
    const std::vector<double> grid = degree_grid();
    PointSeries est{sequential ? "SVALSE" : "VALSE", {}};
    for (const TrackRecord& r : tracks) est.points.push_back({double(r.t), r.doa_deg});
    svg_doa_time(svg_path, "DOA estimates over conventional beamforming",
                 cbf_background(cfg.geometry, snaps, grid), grid, {est});
    std::cout << "wrote " << svg_path << "\n";
  }
  return 0;
}

struct TrialOut {
  std::vector<MetricsRow> rows; // 2 methods x t_max
};

int cmd_benchmark(const RunConfig& cfg) {
  ensure_dir(cfg.output_dir);
  const int n_snr = int(cfg.snr_db.size());
  const int t_max = cfg.scenario.t_max;
  std::vector<TrialOut> results(size_t(n_snr) * cfg.n_runs);

  std::atomic<int> next{0};
  const int total = n_snr * cfg.n_runs;
  auto worker = [&]() {
    for (int k = next.fetch_add(1); k < total; k = next.fetch_add(1)) {
      const int snr_idx = k / cfg.n_runs;
      const int run = k % cfg.n_runs;
      const double snr = cfg.snr_db[snr_idx];
      const std::uint64_t seed = trial_seed(cfg.seed, snr_idx, run);
      const Truth truth = build_truth(cfg.scenario.sources, t_max, seed);
      const std::vector<Snapshot> snaps =
          synthesize(truth, cfg.geometry, snr, mix64(seed ^ 0xc0ffeeULL));

      TrialOut out;
      for (const bool sequential : {true, false}) {
        const std::vector<TrackRecord> tracks =
            run_sequence(snaps, cfg.geometry, cfg.estimator, sequential);
        std::vector<std::vector<double>> est(t_max);
        for (const TrackRecord& r : tracks) est[r.t - 1].push_back(r.doa_deg);
        for (int t = 1; t <= t_max; ++t) {
          MetricsRow row;
          row.run = run;
          row.method = sequential ? "svalse" : "valse";
          row.snr_db = snr;
          row.t = t;
          const std::vector<double> td = truth.doas(t);
          row.gospa = gospa(td, est[t - 1], cfg.metric);
          row.rmse = td.empty() ? std::numeric_limits<double>::quiet_NaN()
                                : rmse(td, est[t - 1], cfg.metric);
          row.n_true = int(td.size());
          row.n_est = int(est[t - 1].size());
          out.rows.push_back(row);
        }
      }
      results[k] = std::move(out);
    }
  };

  {
    std::vector<std::thread> pool;
    const int n_threads = std::max(1, std::min(cfg.threads, total));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Flatten in deterministic (snr, run, method, t) order.
  std::vector<MetricsRow> all;
  all.reserve(size_t(total) * 2 * t_max);
  for (const TrialOut& r : results) all.insert(all.end(), r.rows.begin(), r.rows.end());
  write_metrics(cfg.output_dir + "/metrics.csv", all);

  // Aggregates per (method, snr) over runs and steps.
  std::vector<SummaryRow> summary;
  for (const std::string& method : {std::string("svalse"), std::string("valse")}) {
    for (int si = 0; si < n_snr; ++si) {
      std::vector<MetricRow> rows;
      for (const MetricsRow& r : all) {
        if (r.method == method && r.snr_db == cfg.snr_db[si])
          rows.push_back({r.gospa, r.rmse});
      }
      summary.push_back({method, cfg.snr_db[si], average_metrics(rows)});
    }
  }
  write_summary(cfg.output_dir + "/summary.csv", summary);

  // Metric-versus-SNR curves.
  auto series_of = [&](const std::string& method, auto field) {
    CurveSeries s;
    for (int si = 0; si < n_snr; ++si) {
      for (const SummaryRow& r : summary)
        if (r.method == method && r.snr_db == cfg.snr_db[si]) s.y.push_back(field(r));
    }
    return s;
  };
  std::vector<CurveSeries> gospa_curves;
  for (const std::string& method : {std::string("svalse"), std::string("valse")}) {
    auto add = [&](const std::string& label, auto field) {
      CurveSeries s = series_of(method, field);
      s.name = method + " " + label;
      gospa_curves.push_back(std::move(s));
    };
    add("total", [](const SummaryRow& r) { return r.summary.gospa.total; });
    add("dist", [](const SummaryRow& r) { return r.summary.gospa.dist; });
    add("missed", [](const SummaryRow& r) { return r.summary.gospa.miss; });
    add("false", [](const SummaryRow& r) { return r.summary.gospa.false_; });
  }
  svg_curves(cfg.output_dir + "/gospa_vs_snr.svg", "GOSPA versus SNR", "SNR [dB]",
             "GOSPA [deg]", cfg.snr_db, gospa_curves);
  std::vector<CurveSeries> rmse_curves;
  for (const std::string& method : {std::string("svalse"), std::string("valse")}) {
    CurveSeries s = series_of(method, [](const SummaryRow& r) { return r.summary.rmse; });
    s.name = method;
    rmse_curves.push_back(std::move(s));
  }
  svg_curves(cfg.output_dir + "/rmse_vs_snr.svg", "RMSE versus SNR", "SNR [dB]",
             "RMSE [deg]", cfg.snr_db, rmse_curves);

  // Per-time GOSPA (mean over runs) for each SNR point.
  for (int si = 0; si < n_snr; ++si) {
    std::vector<double> steps(t_max);
    for (int t = 0; t < t_max; ++t) steps[t] = double(t + 1);
    std::vector<CurveSeries> curves;
    for (const std::string& method : {std::string("svalse"), std::string("valse")}) {
      CurveSeries s;
      s.name = method;
      s.y.assign(t_max, 0.0);
      int count = 0;
      for (const MetricsRow& r : all) {
        if (r.method == method && r.snr_db == cfg.snr_db[si]) {
          s.y[r.t - 1] += r.gospa.total;
          ++count;
        }
      }
      for (double& v : s.y) v /= double(count / t_max);
      curves.push_back(std::move(s));
    }
    svg_curves(cfg.output_dir + "/gospa_vs_time_snr" + std::to_string(si) + ".svg",
               "GOSPA versus time, " + fmt_double(cfg.snr_db[si]) + " dB",
               "time step", "GOSPA [deg]", steps, curves);
  }

  std::cout << "wrote metrics for " << total << " trials (" << n_snr
            << " SNR points x " << cfg.n_runs << " runs) to " << cfg.output_dir
            << "\n";
  for (const SummaryRow& r : summary) {
    std::cout << "  " << r.method << " @ " << fmt_double(r.snr_db)
              << " dB: mean GOSPA " << fmt_double(r.summary.gospa.total)
              << " deg, mean RMSE " << fmt_double(r.summary.rmse) << " deg\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gridless sequential Bayesian direction-of-arrival estimation"};
  app.require_subcommand(1);

  std::string config_path, snapshot_path, svg_path, out_override;
  bool no_sequential = false;
  int thread_override = 0;

  CLI::App* sim = app.add_subcommand("simulate", "Synthesize snapshots and ground truth");
  sim->add_option("--config", config_path, "JSON config file")->required();
  sim->add_option("--out", out_override, "Output directory override");

  CLI::App* est = app.add_subcommand("estimate", "Run the estimator over a snapshot file");
  est->add_option("--config", config_path, "JSON config file")->required();
  est->add_option("--snapshots", snapshot_path, "Snapshot CSV")->required();
  est->add_flag("--no-sequential", no_sequential,
                "Process snapshots independently (nonsequential baseline)");
  est->add_option("--svg", svg_path, "Optional DOA-versus-time SVG output path");
  est->add_option("--out", out_override, "Output directory override");

  CLI::App* bench = app.add_subcommand("benchmark", "Monte Carlo benchmark over SNR points");
  bench->add_option("--config", config_path, "JSON config file")->required();
  bench->add_option("--threads", thread_override, "Worker thread count override");
  bench->add_option("--out", out_override, "Output directory override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (thread_override > 0) cfg.threads = thread_override;
    if (sim->parsed()) return cmd_simulate(cfg);
    if (est->parsed()) return cmd_estimate(cfg, snapshot_path, !no_sequential, svg_path);
    if (bench->parsed()) return cmd_benchmark(cfg);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
