// edfa_twin: command-line front end for the EDFA gain-spectrum toolkit.
//
// Subcommands: synth, ingest, train, transfer, eval, matrix, sweep.
// Configuration comes from a flat TOML file (sections mirroring the library
// config structs); command-line flags override file values, and the
// EDFA_TWIN_SEED environment variable is the last-resort seed default.
// Every artifact records the resolved configuration and its FNV-1a hash.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "edfa/dataset.hpp"
#include "edfa/eval.hpp"
#include "edfa/synth.hpp"
#include "edfa/train.hpp"
#include "edfa/transfer.hpp"

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Run configuration: flat TOML with [section] headers and key = value lines.
// Unknown sections or keys are rejected.

struct RunConfig {
  std::uint64_t seed = 0;
  bool seed_set = false;
  edfa::CampaignConfig campaign;
  edfa::SplitSpec split;
  edfa::PretrainConfig pretrain;
  edfa::FinetuneConfig finetune;
  edfa::HomoTlConfig homo;
  edfa::HeteroTlConfig hetero;
  double hetero_lambda_override = -1.0;  // <0: keep struct default
};

std::string strip(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

void apply_kv(RunConfig& cfg, const std::string& section, const std::string& key,
              const std::string& raw) {
  std::string value = raw;
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
    value = value.substr(1, value.size() - 2);
  const auto as_int = [&] { return std::stoll(value); };
  const auto as_real = [&] { return std::stod(value); };

  if (section.empty()) {
    if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(as_int());
      cfg.seed_set = true;
      return;
    }
  } else if (section == "campaign") {
    if (key == "n_fixed") { cfg.campaign.n_fixed = static_cast<int>(as_int()); return; }
    if (key == "n_random") { cfg.campaign.n_random = static_cast<int>(as_int()); return; }
    if (key == "n_goalpost") { cfg.campaign.n_goalpost = static_cast<int>(as_int()); return; }
    if (key == "launch_dbm_per_ch") { cfg.campaign.launch_dbm_per_ch = as_real(); return; }
  } else if (section == "split") {
    if (key == "test_count_per_gain_setting") {
      cfg.split.test_count_per_gain_setting = static_cast<int>(as_int());
      return;
    }
    if (key == "seed") { cfg.split.seed = static_cast<std::uint64_t>(as_int()); return; }
  } else if (section == "pretrain") {
    if (key == "samples_per_gain_setting") {
      cfg.pretrain.samples_per_gain_setting = static_cast<int>(as_int());
      return;
    }
    if (key == "epochs_per_layer") { cfg.pretrain.epochs_per_layer = static_cast<int>(as_int()); return; }
    if (key == "lr") { cfg.pretrain.lr = as_real(); return; }
    if (key == "noise_std") { cfg.pretrain.noise_std = as_real(); return; }
    if (key == "batch_size") { cfg.pretrain.batch_size = static_cast<int>(as_int()); return; }
    if (key == "voa_immunize") { cfg.pretrain.voa_immunize = (value == "true" || value == "1"); return; }
  } else if (section == "finetune") {
    if (key == "labeled_count") { cfg.finetune.labeled_count = static_cast<int>(as_int()); return; }
    if (key == "epochs") { cfg.finetune.epochs = static_cast<int>(as_int()); return; }
    if (key == "lr") { cfg.finetune.lr = as_real(); return; }
    if (key == "batch_size") { cfg.finetune.batch_size = static_cast<int>(as_int()); return; }
    if (key == "clip") { cfg.finetune.clip = as_real(); return; }
    if (key == "channel_dropout") { cfg.finetune.channel_dropout = as_real(); return; }
    if (key == "ls_readout") { cfg.finetune.ls_readout = (value == "true" || value == "1"); return; }
    if (key == "ls_ridge") { cfg.finetune.ls_ridge = as_real(); return; }
    if (key == "ls_replicas") { cfg.finetune.ls_replicas = static_cast<int>(as_int()); return; }
    if (key == "voa_immunize") { cfg.finetune.voa_immunize = (value == "true" || value == "1"); return; }
  } else if (section == "tl_homo") {
    if (key == "shots_per_gain_setting") { cfg.homo.shots_per_gain_setting = static_cast<int>(as_int()); return; }
    if (key == "epochs") { cfg.homo.epochs = static_cast<int>(as_int()); return; }
    if (key == "alpha0") { cfg.homo.alpha0 = as_real(); return; }
    if (key == "theta") { cfg.homo.theta = as_real(); return; }
    if (key == "clip") { cfg.homo.clip = as_real(); return; }
  } else if (section == "tl_hetero") {
    if (key == "shots_per_gain_setting") { cfg.hetero.shots_per_gain_setting = static_cast<int>(as_int()); return; }
    if (key == "epochs") { cfg.hetero.epochs = static_cast<int>(as_int()); return; }
    if (key == "output_lr") { cfg.hetero.output_lr = as_real(); return; }
    if (key == "layer_ratio") { cfg.hetero.layer_ratio = as_real(); return; }
    if (key == "halving_period") { cfg.hetero.halving_period = static_cast<int>(as_int()); return; }
    if (key == "lambda_coral") { cfg.hetero.lambda_coral = as_real(); return; }
    if (key == "reference_batch") { cfg.hetero.reference_batch = static_cast<int>(as_int()); return; }
  }
  throw std::runtime_error("unknown config key '" + key + "' in section [" +
                           section + "]");
}

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file " + path);
  std::string line, section;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("malformed section header at line " +
                                 std::to_string(line_no));
      section = strip(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("expected key = value at line " +
                               std::to_string(line_no));
    apply_kv(cfg, section, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
  }
  return cfg;
}

void finalize_seed(RunConfig& cfg) {
  if (cfg.seed_set) return;
  if (const char* env = std::getenv("EDFA_TWIN_SEED")) {
    cfg.seed = static_cast<std::uint64_t>(std::stoull(env));
    cfg.seed_set = true;
  }
}

json resolved_config(const RunConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["campaign"] = {{"n_fixed", cfg.campaign.n_fixed},
                   {"n_random", cfg.campaign.n_random},
                   {"n_goalpost", cfg.campaign.n_goalpost},
                   {"launch_dbm_per_ch", cfg.campaign.launch_dbm_per_ch}};
  j["split"] = {{"test_count_per_gain_setting", cfg.split.test_count_per_gain_setting},
                {"seed", cfg.split.seed}};
  j["pretrain"] = {{"samples_per_gain_setting", cfg.pretrain.samples_per_gain_setting},
                   {"epochs_per_layer", cfg.pretrain.epochs_per_layer},
                   {"lr", cfg.pretrain.lr},
                   {"noise_std", cfg.pretrain.noise_std},
                   {"batch_size", cfg.pretrain.batch_size},
                   {"voa_immunize", cfg.pretrain.voa_immunize}};
  j["finetune"] = {{"labeled_count", cfg.finetune.labeled_count},
                   {"epochs", cfg.finetune.epochs},
                   {"lr", cfg.finetune.lr},
                   {"batch_size", cfg.finetune.batch_size},
                   {"clip", cfg.finetune.clip},
                   {"channel_dropout", cfg.finetune.channel_dropout},
                   {"ls_readout", cfg.finetune.ls_readout},
                   {"ls_ridge", cfg.finetune.ls_ridge},
                   {"ls_replicas", cfg.finetune.ls_replicas},
                   {"voa_immunize", cfg.finetune.voa_immunize}};
  j["tl_homo"] = {{"shots_per_gain_setting", cfg.homo.shots_per_gain_setting},
                  {"epochs", cfg.homo.epochs},
                  {"alpha0", cfg.homo.alpha0},
                  {"theta", cfg.homo.theta},
                  {"clip", cfg.homo.clip}};
  j["tl_hetero"] = {{"shots_per_gain_setting", cfg.hetero.shots_per_gain_setting},
                    {"epochs", cfg.hetero.epochs},
                    {"output_lr", cfg.hetero.output_lr},
                    {"layer_ratio", cfg.hetero.layer_ratio},
                    {"halving_period", cfg.hetero.halving_period},
                    {"lambda_coral", cfg.hetero.lambda_coral},
                    {"reference_batch", cfg.hetero.reference_batch}};
  return j;
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_resolved(const std::filesystem::path& next_to, const json& cfg,
                    const std::string& command) {
  json out;
  out["schema_version"] = edfa::kSchemaVersion;
  out["command"] = command;
  out["config"] = cfg;
  out["config_hash"] = fnv1a_hex(cfg.dump());
  std::filesystem::path p = next_to;
  p += ".config.json";
  std::ofstream f(p);
  f << out.dump(2) << "\n";
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(strip(tok)));
  return out;
}

std::vector<std::string> parse_str_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(strip(tok));
  return out;
}

edfa::FileFormat detect_format(const std::filesystem::path& p,
                               const std::string& requested) {
  if (!requested.empty()) return edfa::format_from_string(requested);
  return p.extension() == ".jsonl" ? edfa::FileFormat::Jsonl
                                   : edfa::FileFormat::Csv;
}

// Loads a device directory written by `synth` + `train`: campaign.csv and
// checkpoint.json.
edfa::DeviceBundle load_bundle(const std::filesystem::path& dir,
                               const RunConfig& cfg) {
  edfa::DeviceBundle b;
  b.net = edfa::load_checkpoint(dir / "checkpoint.json");
  const auto records = edfa::ingest(dir / "campaign.csv", edfa::FileFormat::Csv);
  edfa::Split s = edfa::split(records, cfg.split);
  b.device_id = records.empty() ? dir.string() : records.front().device_id;
  b.train = std::move(s.train);
  b.test = std::move(s.test);
  return b;
}

int cmd_synth(const RunConfig& cfg, std::uint64_t seed, const std::string& kind,
              const std::string& gains, const std::string& out_dir) {
  edfa::DeviceProfile profile =
      edfa::device_from_seed(seed, edfa::kind_from_string(kind));
  if (!gains.empty()) {
    profile.gain_settings.clear();
    for (int g : parse_int_list(gains)) profile.gain_settings.push_back(g);
  }
  std::mt19937_64 rng(seed);
  const auto records = edfa::generate_campaign(profile, cfg.campaign, rng);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path path = std::filesystem::path(out_dir) / "campaign.csv";
  edfa::write_records(path, edfa::FileFormat::Csv, records);
  write_resolved(path, resolved_config(cfg), "synth");
  json summary = {{"command", "synth"},
                  {"records", records.size()},
                  {"gain_settings", profile.gain_settings},
                  {"out", path.string()}};
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_ingest(const RunConfig& cfg, const std::string& in,
               const std::string& format, bool ila_normalize,
               const std::string& out) {
  std::vector<edfa::MeasurementRecord> records;
  if (ila_normalize) {
    for (const auto& raw : edfa::ingest_ila_raw(in))
      records.push_back(edfa::normalize_ila_record(raw));
  } else {
    records = edfa::ingest(in, detect_format(in, format));
  }
  for (const auto& r : records) {
    const auto violations = edfa::validate_record(r);
    if (!violations.empty())
      throw std::runtime_error("record for device " + r.device_id +
                               " failed validation: " + violations.front());
  }
  edfa::write_records(out, detect_format(out, ""), records);
  write_resolved(out, resolved_config(cfg), "ingest");
  json summary = {{"command", "ingest"}, {"records", records.size()}, {"out", out}};
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_train(RunConfig cfg, const std::string& data_dir, const std::string& out,
              bool skip_pretrain) {
  const auto records =
      edfa::ingest(std::filesystem::path(data_dir) / "campaign.csv",
                   edfa::FileFormat::Csv);
  edfa::Split s = edfa::split(records, cfg.split);
  std::mt19937_64 rng(cfg.seed);
  edfa::Network net = edfa::train_direct(
      s.train, cfg.pretrain, cfg.finetune, rng, skip_pretrain,
      [](const edfa::TrainEvent& e) {
        json ev = {{"stage", e.stage}, {"layer", e.layer}, {"epoch", e.epoch},
                   {"loss", e.loss}};
        std::cerr << ev.dump() << "\n";
      });

  // Stash the CORAL reference so this checkpoint can act as a hetero-TL source.
  std::vector<edfa::FeatureVector> vecs;
  vecs.reserve(s.train.size());
  for (const auto& r : s.train) vecs.push_back(edfa::assemble_features(r));
  std::mt19937_64 cov_rng(cfg.seed ^ 0x5bf03635ULL);
  net.coral_reference = edfa::reference_covariance(
      net, vecs, cfg.hetero.reference_batch, cov_rng);

  const json rc = resolved_config(cfg);
  net.metadata["config_hash"] = fnv1a_hex(rc.dump());
  edfa::save_checkpoint(net, out);
  write_resolved(out, rc, "train");
  json summary = {{"command", "train"},
                  {"train_records", s.train.size()},
                  {"test_records", s.test.size()},
                  {"out", out}};
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_transfer(RunConfig cfg, const std::string& source,
                 const std::string& target_data, const std::string& mode,
                 int shots, const std::string& out) {
  const edfa::Network src = edfa::load_checkpoint(source);
  const auto records =
      edfa::ingest(std::filesystem::path(target_data) / "campaign.csv",
                   edfa::FileFormat::Csv);
  edfa::Split s = edfa::split(records, cfg.split);
  std::mt19937_64 rng(cfg.seed);
  edfa::Network tuned;
  if (mode == "homo") {
    if (shots > 0) cfg.homo.shots_per_gain_setting = shots;
    const auto picked = edfa::tl_shot_sampler(
        s.train, edfa::TlMode::Homogeneous, cfg.homo.shots_per_gain_setting, rng);
    tuned = edfa::homogeneous_transfer(src, picked, cfg.homo, rng);
  } else if (mode == "hetero") {
    if (shots > 0) cfg.hetero.shots_per_gain_setting = shots;
    const auto picked = edfa::tl_shot_sampler(
        s.train, edfa::TlMode::Heterogeneous, cfg.hetero.shots_per_gain_setting,
        rng);
    tuned = edfa::heterogeneous_transfer(src, picked, cfg.hetero, rng);
  } else {
    throw std::runtime_error("mode must be homo or hetero");
  }
  const json rc = resolved_config(cfg);
  tuned.metadata["config_hash"] = fnv1a_hex(rc.dump());
  edfa::save_checkpoint(tuned, out);
  write_resolved(out, rc, "transfer");
  json summary = {{"command", "transfer"}, {"mode", mode}, {"out", out}};
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& ckpt,
             const std::string& data, bool use_test_split,
             const std::string& report_path, const std::string& cdf,
             const std::string& svg) {
  const edfa::Network net = edfa::load_checkpoint(ckpt);
  std::filesystem::path data_path = data;
  if (std::filesystem::is_directory(data_path)) data_path /= "campaign.csv";
  auto records = edfa::ingest(data_path, detect_format(data_path, ""));
  if (use_test_split) records = edfa::split(records, cfg.split).test;
  const edfa::EvalReport report = edfa::evaluate(net, records);

  json j = report.to_json();
  j["schema_version"] = edfa::kSchemaVersion;
  j["config_hash"] = fnv1a_hex(resolved_config(cfg).dump());
  std::ofstream f(report_path);
  f << j.dump(2) << "\n";
  write_resolved(report_path, resolved_config(cfg), "eval");
  if (!cdf.empty()) edfa::export_cdf(report, cdf);
  if (!svg.empty()) edfa::export_cdf_svg(report, svg);
  json summary = {{"command", "eval"},
                  {"mae_db", report.overall.mae_db},
                  {"p95_db", report.overall.p95_db},
                  {"samples", report.overall.count},
                  {"report", report_path}};
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_matrix(const RunConfig& cfg, const std::string& devices,
               const std::string& mode, const std::string& out) {
  std::vector<edfa::DeviceBundle> bundles;
  for (const auto& dir : parse_str_list(devices))
    bundles.push_back(load_bundle(dir, cfg));
  edfa::TlRunConfig run;
  run.mode = mode == "hetero" ? edfa::TlMode::Heterogeneous
                              : edfa::TlMode::Homogeneous;
  run.homo = cfg.homo;
  run.hetero = cfg.hetero;
  run.seed = cfg.seed;
  const edfa::TlMatrix m = edfa::tl_matrix(bundles, run);
  json j = m.to_json();
  j["schema_version"] = edfa::kSchemaVersion;
  j["config_hash"] = fnv1a_hex(resolved_config(cfg).dump());
  std::ofstream f(out);
  f << j.dump(2) << "\n";
  write_resolved(out, resolved_config(cfg), "matrix");
  json summary = {{"command", "matrix"}, {"devices", m.device_ids}, {"out", out}};
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& source,
              const std::string& target, const std::string& shots,
              const std::string& seeds, const std::string& mode,
              const std::string& out) {
  const edfa::DeviceBundle src = load_bundle(source, cfg);
  const edfa::DeviceBundle tgt = load_bundle(target, cfg);
  edfa::TlRunConfig run;
  run.mode = mode == "homo" ? edfa::TlMode::Homogeneous
                            : edfa::TlMode::Heterogeneous;
  run.homo = cfg.homo;
  run.hetero = cfg.hetero;
  run.seed = cfg.seed;
  std::vector<std::uint64_t> seed_list;
  for (int s : parse_int_list(seeds))
    seed_list.push_back(static_cast<std::uint64_t>(s));
  const edfa::SweepTable table =
      edfa::shot_sweep(src, tgt, parse_int_list(shots), run, seed_list);
  edfa::write_sweep_csv(table, out);
  write_resolved(out, resolved_config(cfg), "sweep");
  json summary = {{"command", "sweep"},
                  {"shots", table.shots},
                  {"mean_mae_db", table.mean_mae_per_shots},
                  {"out", out}};
  std::cout << summary.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EDFA gain-spectrum digital twin"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "TOML run configuration");
  std::uint64_t seed_flag = 0;
  bool seed_flag_set = false;
  app.add_option_function<std::uint64_t>(
         "--seed",
         [&](std::uint64_t v) {
           seed_flag = v;
           seed_flag_set = true;
         },
         "Seed override");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic campaign");
  std::string kind = "booster", gains, out_dir;
  synth->add_option("--kind", kind, "booster|preamp|ila");
  synth->add_option("--gains", gains, "Comma-separated gain settings (dB)");
  synth->add_option("--out", out_dir, "Output directory")->required();

  // ingest
  auto* ing = app.add_subcommand("ingest", "Validate and convert a record file");
  std::string in_path, in_format, out_path;
  bool ila_normalize = false;
  ing->add_option("--in", in_path)->required();
  ing->add_option("--format", in_format, "csv|jsonl");
  ing->add_flag("--ila-normalize", ila_normalize,
                "Input is raw ILA captures; renormalize to PM totals");
  ing->add_option("--out", out_path)->required();

  // train
  auto* train = app.add_subcommand("train", "Pretrain + fine-tune on a campaign");
  std::string data_dir, ckpt_out;
  bool skip_pretrain = false;
  train->add_option("--data", data_dir)->required();
  train->add_option("--out", ckpt_out)->required();
  train->add_flag("--skip-pretrain", skip_pretrain);

  // transfer
  auto* tr = app.add_subcommand("transfer", "Few-shot transfer to a target");
  std::string source_ckpt, target_data, tl_mode = "homo", tl_out;
  int tl_shots = 0;
  tr->add_option("--source", source_ckpt)->required();
  tr->add_option("--target-data", target_data)->required();
  tr->add_option("--mode", tl_mode, "homo|hetero");
  tr->add_option("--shots", tl_shots, "Shots per gain setting");
  tr->add_option("--out", tl_out)->required();

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint");
  std::string eval_ckpt, eval_data, report_path, cdf_path, svg_path;
  bool use_test_split = false;
  ev->add_option("--ckpt", eval_ckpt)->required();
  ev->add_option("--data", eval_data)->required();
  ev->add_flag("--use-test-split", use_test_split,
               "Evaluate on the held-out split of the data");
  ev->add_option("--report", report_path)->required();
  ev->add_option("--cdf", cdf_path);
  ev->add_option("--svg", svg_path);

  // matrix
  auto* mx = app.add_subcommand("matrix", "All-pairs transfer matrix");
  std::string mx_devices, mx_mode = "homo", mx_out;
  mx->add_option("--devices", mx_devices, "Comma-separated device directories")
      ->required();
  mx->add_option("--mode", mx_mode, "homo|hetero");
  mx->add_option("--out", mx_out)->required();

  // sweep
  auto* sw = app.add_subcommand("sweep", "MAE vs shots for one pair");
  std::string sw_source, sw_target, sw_shots = "8,16,32,48", sw_seeds = "1,2,3",
              sw_mode = "hetero", sw_out;
  sw->add_option("--source", sw_source)->required();
  sw->add_option("--target", sw_target)->required();
  sw->add_option("--shots", sw_shots);
  sw->add_option("--seeds", sw_seeds);
  sw->add_option("--mode", sw_mode, "homo|hetero");
  sw->add_option("--out", sw_out)->required();

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_config(config_path);
    if (seed_flag_set) {
      cfg.seed = seed_flag;
      cfg.seed_set = true;
    }
    finalize_seed(cfg);

    if (synth->parsed()) return cmd_synth(cfg, cfg.seed, kind, gains, out_dir);
    if (ing->parsed())
      return cmd_ingest(cfg, in_path, in_format, ila_normalize, out_path);
    if (train->parsed()) return cmd_train(cfg, data_dir, ckpt_out, skip_pretrain);
    if (tr->parsed())
      return cmd_transfer(cfg, source_ckpt, target_data, tl_mode, tl_shots, tl_out);
    if (ev->parsed())
      return cmd_eval(cfg, eval_ckpt, eval_data, use_test_split, report_path,
                      cdf_path, svg_path);
    if (mx->parsed()) return cmd_matrix(cfg, mx_devices, mx_mode, mx_out);
    if (sw->parsed())
      return cmd_sweep(cfg, sw_source, sw_target, sw_shots, sw_seeds, sw_mode,
                       sw_out);
  } catch (const std::exception& e) {
    nlohmann::json err = {{"error", true}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 2;
}
