#include "edfa/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

namespace edfa {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double nearest_rank(const std::vector<double>& sorted, double pct) {
  if (sorted.empty()) return 0.0;
  const auto rank = static_cast<std::size_t>(
      std::ceil(pct / 100.0 * static_cast<double>(sorted.size())));
  return sorted[std::min(std::max<std::size_t>(rank, 1) - 1, sorted.size() - 1)];
}

void fill_stats(EvalCell& cell, std::vector<double>& abs_errs, double signed_sum) {
  std::sort(abs_errs.begin(), abs_errs.end());
  cell.count = static_cast<long>(abs_errs.size());
  double sum = 0.0;
  for (double e : abs_errs) sum += e;
  cell.mae_db = sum / static_cast<double>(abs_errs.size());
  cell.mean_error_db = signed_sum / static_cast<double>(abs_errs.size());
  cell.p50_db = nearest_rank(abs_errs, 50.0);
  cell.p95_db = nearest_rank(abs_errs, 95.0);
  cell.max_abs_db = abs_errs.back();
}

nlohmann::json cell_to_json(const EvalCell& c) {
  return {{"device_id", c.device_id},
          {"gain_target_db", c.gain_target_db},
          {"config_class", to_string(c.config_class)},
          {"mae_db", c.mae_db},
          {"mean_error_db", c.mean_error_db},
          {"p50_db", c.p50_db},
          {"p95_db", c.p95_db},
          {"max_abs_db", c.max_abs_db},
          {"count", c.count}};
}

}  // namespace

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["overall"] = cell_to_json(overall);
  j["cells"] = nlohmann::json::array();
  for (const auto& c : cells) j["cells"].push_back(cell_to_json(c));
  return j;
}

EvalReport evaluate(const Network& net, const std::vector<MeasurementRecord>& test) {
  if (test.empty()) throw EmptyTestSet("evaluate: empty test set");

  const Eigen::MatrixXd pred = predict_gain(net, test);
  struct Acc {
    std::vector<double> abs_errs;
    double signed_sum = 0.0;
  };
  std::map<std::tuple<std::string, double, int>, Acc> groups;
  EvalReport report;
  double overall_signed = 0.0;

  for (std::size_t k = 0; k < test.size(); ++k) {
    const auto& r = test[k];
    Acc& acc = groups[{r.device_id, r.gain_target_db, static_cast<int>(r.config_class)}];
    for (int i = 0; i < kNumChannels; ++i) {
      if (!r.mask.active(i)) continue;
      const double err =
          pred(static_cast<Eigen::Index>(k), i) - (r.p_out_dbm[i] - r.p_in_dbm[i]);
      acc.abs_errs.push_back(std::abs(err));
      acc.signed_sum += err;
      report.abs_errors_db.push_back(std::abs(err));
      overall_signed += err;
    }
  }

  for (auto& [key, acc] : groups) {
    EvalCell cell;
    cell.device_id = std::get<0>(key);
    cell.gain_target_db = std::get<1>(key);
    cell.config_class = static_cast<ConfigClass>(std::get<2>(key));
    fill_stats(cell, acc.abs_errs, acc.signed_sum);
    report.cells.push_back(std::move(cell));
  }

  std::vector<double> all = report.abs_errors_db;
  report.overall.device_id = "all";
  fill_stats(report.overall, all, overall_signed);
  return report;
}

void export_cdf(const EvalReport& report, const std::filesystem::path& path) {
  if (report.abs_errors_db.empty()) throw EmptyTestSet("export_cdf: no samples");
  std::vector<double> sorted = report.abs_errors_db;
  std::sort(sorted.begin(), sorted.end());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << "abs_error_db,cumulative_fraction\n";
  const auto n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    f << fmt_double(sorted[i]) << ',' << fmt_double(static_cast<double>(i + 1) / n)
      << '\n';
}

void export_cdf_svg(const EvalReport& report, const std::filesystem::path& path) {
  if (report.abs_errors_db.empty()) throw EmptyTestSet("export_cdf_svg: no samples");
  std::vector<double> sorted = report.abs_errors_db;
  std::sort(sorted.begin(), sorted.end());
  const double xmax = std::max(sorted.back(), 1e-12);
  const int w = 640, h = 480, margin = 50;

  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
    << "'>\n<rect width='100%' height='100%' fill='white'/>\n"
    << "<line x1='" << margin << "' y1='" << h - margin << "' x2='" << w - margin
    << "' y2='" << h - margin << "' stroke='black'/>\n"
    << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin
    << "' y2='" << h - margin << "' stroke='black'/>\n<polyline fill='none' "
       "stroke='steelblue' stroke-width='1.5' points='";
  const auto n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double x = margin + sorted[i] / xmax * (w - 2 * margin);
    const double y =
        h - margin - (static_cast<double>(i + 1) / n) * (h - 2 * margin);
    f << x << ',' << y << ' ';
  }
  f << "'/>\n<text x='" << w / 2 << "' y='" << h - 10
    << "' text-anchor='middle' font-size='12'>abs error (dB), max="
    << fmt_double(xmax) << "</text>\n</svg>\n";
}

nlohmann::json TlMatrix::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["device_ids"] = device_ids;
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < mae_db.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < mae_db.cols(); ++c) row.push_back(mae_db(i, c));
    rows.push_back(std::move(row));
  }
  j["mae_db"] = std::move(rows);
  return j;
}

TlMatrix tl_matrix(const std::vector<DeviceBundle>& devices, const TlRunConfig& cfg) {
  if (devices.size() < 2)
    throw std::invalid_argument("tl_matrix needs at least 2 devices");
  const auto n = static_cast<Eigen::Index>(devices.size());
  TlMatrix m;
  m.mae_db.setZero(n, n);
  for (const auto& d : devices) m.device_ids.push_back(d.device_id);

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& src = devices[static_cast<std::size_t>(i)];
      const auto& tgt = devices[static_cast<std::size_t>(j)];
      if (i == j) {
        m.mae_db(i, j) = evaluate(src.net, src.test).overall.mae_db;
        continue;
      }
      std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(i * n + j));
      Network transferred;
      if (cfg.mode == TlMode::Homogeneous) {
        const auto shots = tl_shot_sampler(tgt.train, TlMode::Homogeneous,
                                           cfg.homo.shots_per_gain_setting, rng);
        transferred = homogeneous_transfer(src.net, shots, cfg.homo, rng);
      } else {
        const auto shots = tl_shot_sampler(tgt.train, TlMode::Heterogeneous,
                                           cfg.hetero.shots_per_gain_setting, rng);
        transferred = heterogeneous_transfer(src.net, shots, cfg.hetero, rng);
      }
      m.mae_db(i, j) = evaluate(transferred, tgt.test).overall.mae_db;
    }
  }
  return m;
}

SweepTable shot_sweep(const DeviceBundle& source, const DeviceBundle& target,
                      const std::vector<int>& shot_counts, const TlRunConfig& cfg,
                      const std::vector<std::uint64_t>& seeds) {
  SweepTable table;
  table.shots = shot_counts;
  for (int shots : shot_counts) {
    double sum = 0.0;
    for (std::uint64_t seed : seeds) {
      std::mt19937_64 rng(seed);
      Network transferred;
      if (cfg.mode == TlMode::Homogeneous) {
        HomoTlConfig homo = cfg.homo;
        homo.shots_per_gain_setting = shots;
        const auto s = tl_shot_sampler(target.train, TlMode::Homogeneous, shots, rng);
        transferred = homogeneous_transfer(source.net, s, homo, rng);
      } else {
        HeteroTlConfig hetero = cfg.hetero;
        hetero.shots_per_gain_setting = shots;
        const auto s =
            tl_shot_sampler(target.train, TlMode::Heterogeneous, shots, rng);
        transferred = heterogeneous_transfer(source.net, s, hetero, rng);
      }
      const double mae = evaluate(transferred, target.test).overall.mae_db;
      table.rows.push_back({shots, seed, mae});
      sum += mae;
    }
    table.mean_mae_per_shots.push_back(sum / static_cast<double>(seeds.size()));
  }
  return table;
}

void write_sweep_csv(const SweepTable& table, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << "shots,seed,mae_db\n";
  for (const auto& row : table.rows)
    f << row.shots << ',' << row.seed << ',' << fmt_double(row.mae_db) << '\n';
}

}  // namespace edfa
