#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <map>
#include <random>

#include "edfa/configs.hpp"
#include "edfa/dataset.hpp"
#include "edfa/features.hpp"
#include "edfa/synth.hpp"
#include "edfa/units.hpp"

using namespace edfa;

namespace {

std::filesystem::path tmp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

std::vector<MeasurementRecord> small_campaign(EdfaKind kind = EdfaKind::Booster) {
  const DeviceProfile p = device_from_seed(4, kind);
  CampaignConfig cfg;
  cfg.n_fixed = 5;
  cfg.n_random = 10;
  cfg.n_goalpost = 10;
  std::mt19937_64 rng(9);
  return generate_campaign(p, cfg, rng);
}

bool records_equal(const MeasurementRecord& a, const MeasurementRecord& b) {
  return a.device_id == b.device_id && a.kind == b.kind &&
         a.direction == b.direction && a.gain_target_db == b.gain_target_db &&
         a.tilt_db == b.tilt_db && a.config_class == b.config_class &&
         a.total_in_dbm == b.total_in_dbm && a.total_out_dbm == b.total_out_dbm &&
         a.voa_in_dbm == b.voa_in_dbm && a.voa_out_dbm == b.voa_out_dbm &&
         a.voa_attn_db == b.voa_attn_db && a.mask == b.mask &&
         a.p_in_dbm.cwiseEqual(b.p_in_dbm).all() &&
         a.p_out_dbm.cwiseEqual(b.p_out_dbm).all();
}

}  // namespace

TEST_CASE("fixed config family") {
  const auto masks = gen_fixed_configs();
  CHECK(masks.size() == 194);
  CHECK(masks[0] == ChannelMask::full());

  int singles = 0;
  for (const auto& m : masks)
    if (m.popcount() == 1) ++singles;
  CHECK(singles == 95);

  // even/odd partition the grid
  const ChannelMask& even = masks[3];
  const ChannelMask& odd = masks[4];
  for (int i = 0; i < kNumChannels; ++i) CHECK(even.active(i) != odd.active(i));
}

TEST_CASE("random configs popcount roughly uniform") {
  std::mt19937_64 rng(3);
  const int n = 100000;
  const auto masks = gen_random_configs(n, rng);
  CHECK(gen_random_configs(0, rng).empty());
  std::vector<int> hist(kNumChannels + 1, 0);
  for (const auto& m : masks) {
    CHECK_FALSE(m.empty());
    ++hist[static_cast<std::size_t>(m.popcount())];
  }
  // chi-squared against uniform over [1,95]
  const double expected = static_cast<double>(n) / kNumChannels;
  double chi2 = 0.0;
  for (int k = 1; k <= kNumChannels; ++k) {
    const double d = hist[static_cast<std::size_t>(k)] - expected;
    chi2 += d * d / expected;
  }
  // 94 dof: p > 0.01 iff chi2 < 128.8
  CHECK(chi2 < 128.8);
}

TEST_CASE("goalpost configs") {
  std::mt19937_64 rng(6);
  const auto masks = gen_goalpost_configs(200, rng);
  for (const auto& m : masks) {
    CHECK_FALSE(m.empty());
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < kNumChannels; ++i) {
      if (!m.active(i)) continue;
      const int ch = i + 1;
      ++counts[ch <= 32 ? 0 : ch <= 64 ? 1 : 2];
    }
    // contiguous from each band edge
    const int lo[3] = {1, 33, 65};
    for (int b = 0; b < 3; ++b)
      for (int k = 0; k < counts[b]; ++k) CHECK(m.active(lo[b] - 1 + k));
  }
}

TEST_CASE("csv/jsonl round trip and cross-format equality") {
  const auto records = small_campaign();
  const auto csv = tmp_file("edfa_rt.csv");
  const auto jsonl = tmp_file("edfa_rt.jsonl");
  write_records(csv, FileFormat::Csv, records);
  write_records(jsonl, FileFormat::Jsonl, records);

  const auto from_csv = ingest(csv, FileFormat::Csv);
  const auto from_jsonl = ingest(jsonl, FileFormat::Jsonl);
  REQUIRE(from_csv.size() == records.size());
  REQUIRE(from_jsonl.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records_equal(records[i], from_csv[i]));
    CHECK(records_equal(from_csv[i], from_jsonl[i]));
  }
  std::filesystem::remove(csv);
  std::filesystem::remove(jsonl);
}

TEST_CASE("ingest rejects an all-zero mask row") {
  auto records = small_campaign();
  // forge an empty mask on the first record
  MeasurementRecord bad = records[0];
  bad.mask = ChannelMask();
  const auto path = tmp_file("edfa_bad.jsonl");
  write_records(path, FileFormat::Jsonl, {bad});
  CHECK_THROWS_WITH_AS(static_cast<void>(ingest(path, FileFormat::Jsonl)),
                       doctest::Contains("empty_mask"), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("ILA renormalization") {
  IlaRawRecord raw;
  raw.device_id = "ila-1";
  raw.gain_target_db = 15.0;
  raw.mask.set(0);
  raw.mask.set(1);
  raw.aux_in_spectrum_dbm = PowerSpectrum::Constant(kNumChannels, 0.0);  // 1 mW each
  raw.aux_out_spectrum_dbm = PowerSpectrum::Constant(kNumChannels, 0.0);
  raw.p_in_aux_total_mw = 2.0;
  raw.p_out_aux_total_mw = 2.0;

  SUBCASE("sigma = 1 leaves spectra unchanged") {
    raw.p_in_ila_total_mw = 2.0;
    raw.p_out_ila_total_mw = 2.0;
    double s_in = 0.0, s_out = 0.0;
    const MeasurementRecord r = normalize_ila_record(raw, &s_in, &s_out);
    CHECK(s_in == doctest::Approx(1.0));
    CHECK(s_out == doctest::Approx(1.0));
    CHECK(r.p_in_dbm[0] == doctest::Approx(0.0));
    CHECK(r.kind == EdfaKind::Ila);
    CHECK_FALSE(r.voa_in_dbm.has_value());
  }

  SUBCASE("{1,1} mW against a 1 mW PM total halves each channel") {
    raw.p_in_ila_total_mw = 1.0;
    raw.p_out_ila_total_mw = 1.0;
    const MeasurementRecord r = normalize_ila_record(raw);
    CHECK(dbm_to_mw(r.p_in_dbm[0]) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(dbm_to_mw(r.p_in_dbm[1]) == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("conservation of PM totals on random records") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> pw(-20.0, 0.0);
    std::uniform_real_distribution<double> tot(0.1, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
      IlaRawRecord rr = raw;
      rr.mask = gen_random_configs(1, rng)[0];
      for (int i = 0; i < kNumChannels; ++i) {
        rr.aux_in_spectrum_dbm[i] = pw(rng);
        rr.aux_out_spectrum_dbm[i] = pw(rng);
      }
      rr.p_in_ila_total_mw = tot(rng);
      rr.p_out_ila_total_mw = tot(rng);
      const MeasurementRecord r = normalize_ila_record(rr);
      double sum_in = 0.0, sum_out = 0.0;
      for (int i = 0; i < kNumChannels; ++i) {
        if (!rr.mask.active(i)) continue;
        sum_in += dbm_to_mw(r.p_in_dbm[i]);
        sum_out += dbm_to_mw(r.p_out_dbm[i]);
      }
      CHECK(sum_in == doctest::Approx(rr.p_in_ila_total_mw).epsilon(1e-9));
      CHECK(sum_out == doctest::Approx(rr.p_out_ila_total_mw).epsilon(1e-9));
    }
  }

  SUBCASE("non-positive PM total is rejected") {
    raw.p_in_ila_total_mw = 0.0;
    raw.p_out_ila_total_mw = 1.0;
    CHECK_THROWS_AS(static_cast<void>(normalize_ila_record(raw)), NonPositivePower);
  }
}

TEST_CASE("ila raw csv round trip") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> pw(-20.0, 0.0);
  std::vector<IlaRawRecord> raws;
  for (int k = 0; k < 5; ++k) {
    IlaRawRecord r;
    r.device_id = "ila-7";
    r.gain_target_db = 15.0;
    r.mask = gen_random_configs(1, rng)[0];
    r.aux_in_spectrum_dbm.resize(kNumChannels);
    r.aux_out_spectrum_dbm.resize(kNumChannels);
    for (int i = 0; i < kNumChannels; ++i) {
      r.aux_in_spectrum_dbm[i] = pw(rng);
      r.aux_out_spectrum_dbm[i] = pw(rng);
    }
    r.p_in_aux_total_mw = 1.5;
    r.p_out_aux_total_mw = 2.5;
    r.p_in_ila_total_mw = 1.2;
    r.p_out_ila_total_mw = 2.2;
    raws.push_back(std::move(r));
  }
  const auto path = tmp_file("edfa_ila_raw.csv");
  write_ila_raw(path, raws);
  const auto back = ingest_ila_raw(path);
  REQUIRE(back.size() == raws.size());
  for (std::size_t i = 0; i < raws.size(); ++i) {
    CHECK(back[i].aux_in_spectrum_dbm.cwiseEqual(raws[i].aux_in_spectrum_dbm).all());
    CHECK(back[i].p_in_ila_total_mw == raws[i].p_in_ila_total_mw);
    CHECK(back[i].mask == raws[i].mask);
  }
  std::filesystem::remove(path);
}

TEST_CASE("split fidelity") {
  const DeviceProfile p = device_from_seed(12, EdfaKind::Booster);
  CampaignConfig cfg;  // 3168 per gain setting
  std::mt19937_64 rng(14);
  const auto records = generate_campaign(p, cfg, rng);
  REQUIRE(records.size() == 9504);

  SplitSpec spec;
  spec.seed = 99;
  const Split s = split(records, spec);
  CHECK(s.train.size() == 3 * 2732);
  CHECK(s.test.size() == 3 * 436);
  for (const auto& r : s.test) CHECK(r.config_class != ConfigClass::Fixed);

  std::map<double, int> per_gain;
  for (const auto& r : s.test) ++per_gain[r.gain_target_db];
  for (const auto& [g, n] : per_gain) CHECK(n == 436);

  // determinism
  const Split s2 = split(records, spec);
  REQUIRE(s2.test.size() == s.test.size());
  for (std::size_t i = 0; i < s.test.size(); ++i)
    CHECK(records_equal(s.test[i], s2.test[i]));
}

TEST_CASE("feature assembly") {
  const auto records = small_campaign();
  const FeatureVector v = assemble_features(records[0]);
  REQUIRE(v.size() == kFeatureDim);
  CHECK(v[0] == records[0].gain_target_db);
  CHECK(v[3] == *records[0].voa_in_dbm);

  const auto ila = small_campaign(EdfaKind::Ila);
  const FeatureVector vi = assemble_features(ila[0]);
  CHECK(vi[3] == kSentinel);
  CHECK(vi[4] == kSentinel);
  CHECK(vi[5] == kSentinel);
  for (int i = 0; i < kNumChannels; ++i)
    CHECK(vi[6 + kNumChannels + i] == (ila[0].mask.active(i) ? 1.0 : 0.0));
}

TEST_CASE("standardizer") {
  const auto booster = small_campaign();
  const auto ila = small_campaign(EdfaKind::Ila);
  std::vector<FeatureVector> vecs;
  for (const auto& r : booster) vecs.push_back(assemble_features(r));
  for (const auto& r : ila) vecs.push_back(assemble_features(r));

  const Standardizer s = fit_standardizer(vecs);
  for (int j = 0; j < kFeatureDim; ++j) CHECK(s.std[j] > 0.0);

  // standardized non-sentinel columns have mean ~0, std ~1
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(kFeatureDim);
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(kFeatureDim);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(kFeatureDim);
  for (const auto& v : vecs) {
    const FeatureVector z = s.apply(v);
    for (int j = 0; j < kFeatureDim; ++j) {
      if (v[j] == kSentinel) {
        CHECK(z[j] == kSentinel);  // pass-through
        continue;
      }
      sum[j] += z[j];
      sumsq[j] += z[j] * z[j];
      count[j] += 1.0;
    }
  }
  for (int j = 0; j < kFeatureDim; ++j) {
    if (count[j] < 2) continue;
    const double mean = sum[j] / count[j];
    const double var = sumsq[j] / count[j] - mean * mean;
    CHECK(std::abs(mean) < 1e-9);
    if (var > 1e-20) CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(1e-6));
  }

  // constant feature maps to 0
  std::vector<FeatureVector> constant(3, vecs[0]);
  const Standardizer cs = fit_standardizer(constant);
  const FeatureVector z = cs.apply(vecs[0]);
  for (int j = 0; j < kFeatureDim; ++j)
    if (vecs[0][j] != kSentinel) CHECK(z[j] == doctest::Approx(0.0));
}
