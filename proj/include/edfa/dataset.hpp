#ifndef EDFA_DATASET_HPP
#define EDFA_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "edfa/record.hpp"

namespace edfa {

inline constexpr int kSchemaVersion = 1;

enum class FileFormat { Csv, Jsonl };

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SchemaMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientRecords : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// ILA capture before renormalization: OCM spectra from the two auxiliary
/// ROADMs plus the four photodiode power-monitor totals (in mW).
struct IlaRawRecord {
  std::string device_id;
  Direction direction = Direction::AB;
  double gain_target_db = 0.0;
  PowerSpectrum aux_in_spectrum_dbm;
  PowerSpectrum aux_out_spectrum_dbm;
  ChannelMask mask;
  double p_in_aux_total_mw = 0.0;
  double p_out_aux_total_mw = 0.0;
  double p_in_ila_total_mw = 0.0;
  double p_out_ila_total_mw = 0.0;
  ConfigClass config_class = ConfigClass::Random;
};

void write_records(const std::filesystem::path& path, FileFormat format,
                   const std::vector<MeasurementRecord>& records);
std::vector<MeasurementRecord> ingest(const std::filesystem::path& path,
                                      FileFormat format);

void write_ila_raw(const std::filesystem::path& path,
                   const std::vector<IlaRawRecord>& records);
std::vector<IlaRawRecord> ingest_ila_raw(const std::filesystem::path& path);

/// Rescales the OCM spectra in the mW domain so the per-channel sums match
/// the ILA photodiode totals on both sides, then converts back to dBm.
/// The applied scale factors are reported through sigma_in/sigma_out when
/// non-null.
MeasurementRecord normalize_ila_record(const IlaRawRecord& raw,
                                       double* sigma_in = nullptr,
                                       double* sigma_out = nullptr);

struct SplitSpec {
  double train_fraction = 0.86;
  double test_fraction = 0.14;
  int test_count_per_gain_setting = 436;
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<MeasurementRecord> train;
  std::vector<MeasurementRecord> test;
};

/// Per gain setting, exactly spec.test_count_per_gain_setting records drawn
/// from the Random and Goalpost classes form the test set; everything else
/// trains. Deterministic under spec.seed.
Split split(const std::vector<MeasurementRecord>& records, const SplitSpec& spec);

FileFormat format_from_string(const std::string& s);

}  // namespace edfa

#endif
