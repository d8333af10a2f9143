#include "edfa/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "edfa/units.hpp"

namespace edfa {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, int row) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParseError("row " + std::to_string(row) + ": bad number '" + s + "'");
  return v;
}

std::vector<std::string> csv_header() {
  std::vector<std::string> h = {"schema_version", "device_id",    "kind",
                                "direction",      "gain_target_db", "tilt_db",
                                "config_class",   "total_in_dbm", "total_out_dbm",
                                "voa_in_dbm",     "voa_out_dbm",  "voa_attn_db"};
  for (int i = 1; i <= kNumChannels; ++i) h.push_back("p_in_" + std::to_string(i));
  for (int i = 1; i <= kNumChannels; ++i) h.push_back("p_out_" + std::to_string(i));
  for (int i = 1; i <= kNumChannels; ++i) h.push_back("mask_" + std::to_string(i));
  return h;
}

void check_record_or_throw(const MeasurementRecord& r, int row) {
  const auto violations = validate_record(r);
  if (!violations.empty()) {
    std::string msg = "row " + std::to_string(row) + ": invalid record:";
    for (const auto& v : violations) msg += " " + v;
    throw ParseError(msg);
  }
}

json record_to_json(const MeasurementRecord& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["device_id"] = r.device_id;
  j["kind"] = to_string(r.kind);
  j["direction"] = to_string(r.direction);
  j["gain_target_db"] = r.gain_target_db;
  j["tilt_db"] = r.tilt_db;
  j["config_class"] = to_string(r.config_class);
  j["total_in_dbm"] = r.total_in_dbm;
  j["total_out_dbm"] = r.total_out_dbm;
  if (r.voa_in_dbm) j["voa_in_dbm"] = *r.voa_in_dbm;
  if (r.voa_out_dbm) j["voa_out_dbm"] = *r.voa_out_dbm;
  if (r.voa_attn_db) j["voa_attn_db"] = *r.voa_attn_db;
  j["p_in"] = std::vector<double>(r.p_in_dbm.begin(), r.p_in_dbm.end());
  j["p_out"] = std::vector<double>(r.p_out_dbm.begin(), r.p_out_dbm.end());
  std::vector<int> mask(kNumChannels);
  for (int i = 0; i < kNumChannels; ++i) mask[static_cast<std::size_t>(i)] = r.mask.active(i);
  j["mask"] = mask;
  return j;
}

MeasurementRecord record_from_json(const json& j, int row) {
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != kSchemaVersion)
    throw SchemaMismatch("row " + std::to_string(row) + ": schema_version mismatch");
  MeasurementRecord r;
  r.device_id = j.at("device_id").get<std::string>();
  r.kind = kind_from_string(j.at("kind").get<std::string>());
  r.direction = direction_from_string(j.at("direction").get<std::string>());
  r.gain_target_db = j.at("gain_target_db").get<double>();
  r.tilt_db = j.at("tilt_db").get<double>();
  r.config_class = config_class_from_string(j.at("config_class").get<std::string>());
  r.total_in_dbm = j.at("total_in_dbm").get<double>();
  r.total_out_dbm = j.at("total_out_dbm").get<double>();
  if (j.contains("voa_in_dbm")) r.voa_in_dbm = j["voa_in_dbm"].get<double>();
  if (j.contains("voa_out_dbm")) r.voa_out_dbm = j["voa_out_dbm"].get<double>();
  if (j.contains("voa_attn_db")) r.voa_attn_db = j["voa_attn_db"].get<double>();
  const auto p_in = j.at("p_in").get<std::vector<double>>();
  const auto p_out = j.at("p_out").get<std::vector<double>>();
  const auto mask = j.at("mask").get<std::vector<int>>();
  if (p_in.size() != kNumChannels || p_out.size() != kNumChannels ||
      mask.size() != kNumChannels)
    throw ParseError("row " + std::to_string(row) + ": bad spectrum length");
  r.p_in_dbm = Eigen::Map<const Eigen::VectorXd>(p_in.data(), kNumChannels);
  r.p_out_dbm = Eigen::Map<const Eigen::VectorXd>(p_out.data(), kNumChannels);
  for (int i = 0; i < kNumChannels; ++i) r.mask.set(i, mask[static_cast<std::size_t>(i)] != 0);
  check_record_or_throw(r, row);
  return r;
}

}  // namespace

FileFormat format_from_string(const std::string& s) {
  if (s == "csv") return FileFormat::Csv;
  if (s == "jsonl") return FileFormat::Jsonl;
  throw std::invalid_argument("unknown format: " + s);
}

void write_records(const std::filesystem::path& path, FileFormat format,
                   const std::vector<MeasurementRecord>& records) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot open " + path.string() + " for writing");
  if (format == FileFormat::Jsonl) {
    for (const auto& r : records) f << record_to_json(r).dump() << '\n';
    return;
  }
  const auto header = csv_header();
  for (std::size_t i = 0; i < header.size(); ++i)
    f << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& r : records) {
    f << kSchemaVersion << ',' << r.device_id << ',' << to_string(r.kind) << ','
      << to_string(r.direction) << ',' << fmt_double(r.gain_target_db) << ','
      << fmt_double(r.tilt_db) << ',' << to_string(r.config_class) << ','
      << fmt_double(r.total_in_dbm) << ',' << fmt_double(r.total_out_dbm) << ','
      << (r.voa_in_dbm ? fmt_double(*r.voa_in_dbm) : "") << ','
      << (r.voa_out_dbm ? fmt_double(*r.voa_out_dbm) : "") << ','
      << (r.voa_attn_db ? fmt_double(*r.voa_attn_db) : "");
    for (int i = 0; i < kNumChannels; ++i) f << ',' << fmt_double(r.p_in_dbm[i]);
    for (int i = 0; i < kNumChannels; ++i) f << ',' << fmt_double(r.p_out_dbm[i]);
    for (int i = 0; i < kNumChannels; ++i) f << ',' << (r.mask.active(i) ? 1 : 0);
    f << '\n';
  }
}

std::vector<MeasurementRecord> ingest(const std::filesystem::path& path,
                                      FileFormat format) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path.string());
  std::vector<MeasurementRecord> out;
  std::string line;
  int row = 0;

  if (format == FileFormat::Jsonl) {
    while (std::getline(f, line)) {
      ++row;
      if (line.empty()) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::exception& e) {
        throw ParseError("row " + std::to_string(row) + ": " + e.what());
      }
      out.push_back(record_from_json(j, row));
    }
    return out;
  }

  if (!std::getline(f, line)) throw ParseError("empty CSV: " + path.string());
  if (split_csv_line(line) != csv_header())
    throw SchemaMismatch("CSV header mismatch in " + path.string());
  while (std::getline(f, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 12 + 3 * kNumChannels)
      throw ParseError("row " + std::to_string(row) + ": wrong column count");
    if (parse_double(cells[0], row) != kSchemaVersion)
      throw SchemaMismatch("row " + std::to_string(row) + ": schema_version mismatch");
    MeasurementRecord r;
    r.device_id = cells[1];
    r.kind = kind_from_string(cells[2]);
    r.direction = direction_from_string(cells[3]);
    r.gain_target_db = parse_double(cells[4], row);
    r.tilt_db = parse_double(cells[5], row);
    r.config_class = config_class_from_string(cells[6]);
    r.total_in_dbm = parse_double(cells[7], row);
    r.total_out_dbm = parse_double(cells[8], row);
    if (!cells[9].empty()) r.voa_in_dbm = parse_double(cells[9], row);
    if (!cells[10].empty()) r.voa_out_dbm = parse_double(cells[10], row);
    if (!cells[11].empty()) r.voa_attn_db = parse_double(cells[11], row);
    r.p_in_dbm.resize(kNumChannels);
    r.p_out_dbm.resize(kNumChannels);
    for (int i = 0; i < kNumChannels; ++i) {
      r.p_in_dbm[i] = parse_double(cells[12 + static_cast<std::size_t>(i)], row);
      r.p_out_dbm[i] = parse_double(cells[12 + kNumChannels + static_cast<std::size_t>(i)], row);
      r.mask.set(i, parse_double(cells[12 + 2 * kNumChannels + static_cast<std::size_t>(i)], row) != 0.0);
    }
    check_record_or_throw(r, row);
    out.push_back(std::move(r));
  }
  return out;
}

void write_ila_raw(const std::filesystem::path& path,
                   const std::vector<IlaRawRecord>& records) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot open " + path.string() + " for writing");
  f << "schema_version,device_id,direction,gain_target_db,config_class,"
       "p_in_aux_total_mw,p_out_aux_total_mw,p_in_ila_total_mw,p_out_ila_total_mw";
  for (int i = 1; i <= kNumChannels; ++i) f << ",aux_in_" << i;
  for (int i = 1; i <= kNumChannels; ++i) f << ",aux_out_" << i;
  for (int i = 1; i <= kNumChannels; ++i) f << ",mask_" << i;
  f << '\n';
  for (const auto& r : records) {
    f << kSchemaVersion << ',' << r.device_id << ',' << to_string(r.direction) << ','
      << fmt_double(r.gain_target_db) << ',' << to_string(r.config_class) << ','
      << fmt_double(r.p_in_aux_total_mw) << ',' << fmt_double(r.p_out_aux_total_mw)
      << ',' << fmt_double(r.p_in_ila_total_mw) << ','
      << fmt_double(r.p_out_ila_total_mw);
    for (int i = 0; i < kNumChannels; ++i) f << ',' << fmt_double(r.aux_in_spectrum_dbm[i]);
    for (int i = 0; i < kNumChannels; ++i) f << ',' << fmt_double(r.aux_out_spectrum_dbm[i]);
    for (int i = 0; i < kNumChannels; ++i) f << ',' << (r.mask.active(i) ? 1 : 0);
    f << '\n';
  }
}

std::vector<IlaRawRecord> ingest_ila_raw(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw ParseError("empty CSV: " + path.string());
  std::vector<IlaRawRecord> out;
  int row = 0;
  while (std::getline(f, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 9 + 3 * kNumChannels)
      throw ParseError("row " + std::to_string(row) + ": wrong column count");
    IlaRawRecord r;
    r.device_id = cells[1];
    r.direction = direction_from_string(cells[2]);
    r.gain_target_db = parse_double(cells[3], row);
    r.config_class = config_class_from_string(cells[4]);
    r.p_in_aux_total_mw = parse_double(cells[5], row);
    r.p_out_aux_total_mw = parse_double(cells[6], row);
    r.p_in_ila_total_mw = parse_double(cells[7], row);
    r.p_out_ila_total_mw = parse_double(cells[8], row);
    r.aux_in_spectrum_dbm.resize(kNumChannels);
    r.aux_out_spectrum_dbm.resize(kNumChannels);
    for (int i = 0; i < kNumChannels; ++i) {
      r.aux_in_spectrum_dbm[i] = parse_double(cells[9 + static_cast<std::size_t>(i)], row);
      r.aux_out_spectrum_dbm[i] =
          parse_double(cells[9 + kNumChannels + static_cast<std::size_t>(i)], row);
      r.mask.set(i, parse_double(cells[9 + 2 * kNumChannels + static_cast<std::size_t>(i)], row) != 0.0);
    }
    out.push_back(std::move(r));
  }
  return out;
}

MeasurementRecord normalize_ila_record(const IlaRawRecord& raw, double* sigma_in,
                                       double* sigma_out) {
  if (!(raw.p_in_ila_total_mw > 0.0)) throw NonPositivePower(raw.p_in_ila_total_mw);
  if (!(raw.p_out_ila_total_mw > 0.0)) throw NonPositivePower(raw.p_out_ila_total_mw);

  double sum_in = 0.0, sum_out = 0.0;
  for (int i = 0; i < kNumChannels; ++i) {
    if (!raw.mask.active(i)) continue;
    sum_in += dbm_to_mw(raw.aux_in_spectrum_dbm[i]);
    sum_out += dbm_to_mw(raw.aux_out_spectrum_dbm[i]);
  }
  if (!(sum_in > 0.0)) throw NonPositivePower(sum_in);
  if (!(sum_out > 0.0)) throw NonPositivePower(sum_out);

  const double s_in = raw.p_in_ila_total_mw / sum_in;
  const double s_out = raw.p_out_ila_total_mw / sum_out;
  if (sigma_in) *sigma_in = s_in;
  if (sigma_out) *sigma_out = s_out;

  MeasurementRecord r;
  r.device_id = raw.device_id;
  r.kind = EdfaKind::Ila;
  r.direction = raw.direction;
  r.gain_target_db = raw.gain_target_db;
  r.config_class = raw.config_class;
  r.mask = raw.mask;
  r.p_in_dbm = PowerSpectrum::Constant(kNumChannels, kDarkChannelFloorDbm);
  r.p_out_dbm = PowerSpectrum::Constant(kNumChannels, kDarkChannelFloorDbm);
  for (int i = 0; i < kNumChannels; ++i) {
    if (!raw.mask.active(i)) continue;
    r.p_in_dbm[i] = mw_to_dbm(s_in * dbm_to_mw(raw.aux_in_spectrum_dbm[i]));
    r.p_out_dbm[i] = mw_to_dbm(s_out * dbm_to_mw(raw.aux_out_spectrum_dbm[i]));
  }
  r.total_in_dbm = mw_to_dbm(raw.p_in_ila_total_mw);
  r.total_out_dbm = mw_to_dbm(raw.p_out_ila_total_mw);
  return r;
}

Split split(const std::vector<MeasurementRecord>& records, const SplitSpec& spec) {
  std::map<double, std::vector<std::size_t>> eligible;  // gain -> test pool
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].config_class != ConfigClass::Fixed)
      eligible[records[i].gain_target_db].push_back(i);

  std::mt19937_64 rng(spec.seed);
  std::vector<char> is_test(records.size(), 0);
  for (auto& [gain, pool] : eligible) {
    if (static_cast<int>(pool.size()) < spec.test_count_per_gain_setting)
      throw InsufficientRecords("gain setting " + std::to_string(gain) + ": only " +
                                std::to_string(pool.size()) +
                                " random/goalpost records for test draw");
    std::shuffle(pool.begin(), pool.end(), rng);
    for (int k = 0; k < spec.test_count_per_gain_setting; ++k)
      is_test[pool[static_cast<std::size_t>(k)]] = 1;
  }

  Split out;
  for (std::size_t i = 0; i < records.size(); ++i)
    (is_test[i] ? out.test : out.train).push_back(records[i]);
  return out;
}

}  // namespace edfa
