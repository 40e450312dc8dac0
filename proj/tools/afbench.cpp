// Copyright (c) 2026 afbench authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "af/attack_spec.hpp"
#include "af/common.hpp"
#include "af/corpus.hpp"
#include "af/detector.hpp"
#include "af/eval.hpp"
#include "af/kernels.hpp"
#include "af/metrics.hpp"
#include "af/opt_attacks.hpp"
#include "af/report.hpp"
#include "af/rng.hpp"
#include "af/train.hpp"

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "afbench 1.0.0";

std::string fmtd(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// The only place wall-clock time is recorded; the report files themselves
// stay byte-stable across runs.
void write_run_meta(const std::string& dir, const std::string& command,
                    const std::vector<std::string>& argv, uint64_t seed) {
  std::error_code ec;
  fs::create_directories(dir.empty() ? "." : dir, ec);
  nlohmann::ordered_json meta;
  meta["tool"] = kVersion;
  meta["command"] = command;
  meta["argv"] = argv;
  meta["seed"] = seed;
  meta["kernel_backend"] = af::kernels::active_backend();
  auto now = std::chrono::system_clock::now();
  meta["unix_time"] =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  std::ofstream out(fs::path(dir.empty() ? "." : dir) / "run_meta.json", std::ios::trunc);
  if (out) out << meta.dump(2) << '\n';
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
        c == '_' || c == '-') {
      out.push_back(c);
    } else if (c == '.') {
      out.push_back('p');
    } else {
      out.push_back('-');
    }
  }
  return out;
}

struct SynthArgs {
  int n = 50;
  double duration = 1.0;
  int rate = 16000;
  uint64_t seed = 0;
  std::string artifact = "hf_hiss";
  std::string out;
};

int cmd_synth(const SynthArgs& a, const std::vector<std::string>& argv) {
  af::corpus::SynthSpec spec;
  spec.n_per_class = a.n;
  spec.duration = a.duration;
  spec.sample_rate = a.rate;
  spec.rng_seed = a.seed;
  spec.artifact = af::corpus::artifact_from_string(a.artifact);
  af::corpus::Manifest m = af::corpus::synth_corpus(spec, a.out);
  write_run_meta(a.out, "synth", argv, a.seed);
  std::cout << "wrote " << (fs::path(a.out) / "manifest.csv").string() << " (" << m.entries.size()
            << " entries)\n";
  return 0;
}

struct TrainArgs {
  std::string manifest;
  std::string detector = "raw";
  int input_samples = 16000;
  int epochs = 10;
  int batch = 64;
  double lr = 1e-4;
  double wd = 1e-4;
  uint64_t seed = 0;
  std::string out;
};

af::nn::Detector fresh_detector(const std::string& kind, int input_samples, uint64_t seed) {
  if (af::nn::detector_kind_from_string(kind) == af::nn::DetectorKind::raw) {
    return af::nn::make_raw_tiny(input_samples, seed);
  }
  return af::nn::make_spec_tiny(input_samples, seed);
}

void write_loss_csv(const std::string& path, const af::nn::TrainResult& res) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw af::IoError("cannot write loss curve: " + path);
  out << "epoch,loss\n";
  for (size_t i = 0; i < res.epoch_loss.size(); ++i) {
    out << (i + 1) << ',' << fmtd("%.17g", res.epoch_loss[i]) << '\n';
  }
}

int cmd_train(const TrainArgs& a, const std::vector<std::string>& argv) {
  af::corpus::Manifest m = af::corpus::load_manifest(a.manifest);
  af::eval::SplitData data =
      af::eval::load_split(m, "train", static_cast<size_t>(a.input_samples));

  af::nn::Detector det = fresh_detector(a.detector, a.input_samples, a.seed);
  af::nn::TrainConfig cfg;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.lr = a.lr;
  cfg.weight_decay = a.wd;
  cfg.seed = a.seed;

  std::vector<std::vector<double>> waves;
  waves.reserve(data.clips.size());
  for (auto& c : data.clips) waves.push_back(std::move(c.samples));

  af::nn::TrainResult res = af::nn::train(det, waves, data.labels, cfg);
  std::error_code ec;
  fs::create_directories(fs::path(a.out).parent_path(), ec);
  af::nn::save_checkpoint(a.out, det);
  write_loss_csv(a.out + ".loss.csv", res);
  write_run_meta(fs::path(a.out).parent_path().string(), "train", argv, a.seed);

  std::cout << "wrote " << a.out << " (" << det.param_count() << " parameters)\n";
  std::cout << "final train loss " << fmtd("%.6f", res.epoch_loss.back()) << " after "
            << res.steps << " steps\n";
  return 0;
}

struct AttackArgs {
  std::string ckpt;
  std::string manifest;
  std::string kind;
  std::string split;  // empty = all entries
  int semitones = -1;
  int kernel = 3;
  double sigma = 0.01;
  int bits = 4;
  double eps = 0.01;
  int pgd_steps = 20;
  double pgd_alpha = -1.0;
  double cw_c = 10.0;
  double cw_kappa = 0.0;
  int cw_iters = 100;
  double cw_lr = 0.005;
  double df_overshoot = 0.02;
  int df_max_iters = 50;
  uint64_t seed = 0;
  std::string out;
};

af::attacks::AttackSpec spec_from_args(const AttackArgs& a) {
  af::attacks::AttackSpec s;
  s.kind = af::attacks::attack_kind_from_string(a.kind);
  s.semitones = a.semitones;
  s.kernel = a.kernel;
  s.sigma = a.sigma;
  s.bits = a.bits;
  s.eps = a.eps;
  s.pgd_steps = a.pgd_steps;
  s.pgd_alpha = a.pgd_alpha;
  s.cw_c = a.cw_c;
  s.cw_kappa = a.cw_kappa;
  s.cw_iters = a.cw_iters;
  s.cw_lr = a.cw_lr;
  s.df_overshoot = a.df_overshoot;
  s.df_max_iters = a.df_max_iters;
  s.seed = a.seed;
  return s;
}

int cmd_attack(const AttackArgs& a, const std::vector<std::string>& argv) {
  af::attacks::AttackSpec spec = spec_from_args(a);
  af::corpus::Manifest src = af::corpus::load_manifest(a.manifest);
  if (!a.split.empty()) {
    af::corpus::Manifest sub;
    sub.root = src.root;
    for (const auto* e : src.split_view(a.split)) sub.entries.push_back(*e);
    if (sub.entries.empty()) {
      throw af::DataError("manifest has no '" + a.split + "' entries");
    }
    src = std::move(sub);
  }

  af::nn::Detector det;
  const af::nn::GradModel* model = nullptr;
  if (!a.ckpt.empty()) {
    det = af::nn::load_checkpoint(a.ckpt);
    model = &det;
  } else if (af::attacks::is_gradient_attack(spec.kind)) {
    throw af::ParamError("attack '" + a.kind + "' needs --ckpt");
  }

  af::corpus::CacheResult cached = af::corpus::cache_attacked(src, spec, a.out, model);

  std::string stem = sanitize(std::string(af::attacks::to_string(spec.kind)) + "_" +
                              spec.param_label());
  std::string attacked_csv = (fs::path(a.out) / ("attacked_" + stem + ".csv")).string();
  af::corpus::save_manifest(cached.manifest, attacked_csv);

  std::string quality_csv = (fs::path(a.out) / ("quality_" + stem + ".csv")).string();
  std::ofstream q(quality_csv, std::ios::trunc);
  if (!q) throw af::IoError("cannot write quality table: " + quality_csv);
  q << "id,label,split,wave_mse,spec_mse,ssim\n";
  for (size_t i = 0; i < src.entries.size(); ++i) {
    af::audio::AudioClip orig = af::audio::read_wav(src.resolve(src.entries[i]));
    af::audio::AudioClip att =
        af::audio::read_wav(cached.manifest.resolve(cached.manifest.entries[i]));
    if (orig.len() != att.len()) orig = af::audio::normalize_length(orig, att.len());
    af::metrics::QualityPair pair = af::metrics::make_quality_pair(orig, att, {});
    q << orig.id << ',' << af::corpus::label_name(src.entries[i].label) << ','
      << src.entries[i].split << ',' << fmtd("%.17g", pair.waveform_mse) << ','
      << fmtd("%.17g", af::metrics::spec_mse(pair)) << ','
      << fmtd("%.17g", af::metrics::ssim(pair)) << '\n';
  }
  q.close();

  write_run_meta(a.out, "attack", argv, a.seed);
  std::cout << "attacked " << src.entries.size() << " clips (" << cached.hits << " cached, "
            << cached.misses << " computed)\n";
  std::cout << "wrote " << attacked_csv << "\n";
  std::cout << "wrote " << quality_csv << "\n";
  return 0;
}

struct EvalArgs {
  std::string ckpt;
  std::vector<std::string> manifests;
  std::vector<std::string> attacks;  // kind names; default all
  std::string split = "test";
  double threshold = 0.5;
  int workers = 1;
  bool no_images = false;
  bool no_cache = false;
  uint64_t seed = 0;
  std::string out;
};

int cmd_eval(const EvalArgs& a, const std::vector<std::string>& argv) {
  af::nn::Detector det = af::nn::load_checkpoint(a.ckpt);
  std::string name = std::string(af::nn::to_string(det.kind)) + (det.defended ? "-defended" : "");

  std::vector<af::attacks::AttackSpec> specs;
  if (a.attacks.empty()) {
    specs = af::eval::default_attack_sweep(a.seed);
  } else {
    for (const std::string& kind_name : a.attacks) {
      for (af::attacks::AttackSpec s :
           af::attacks::grid_for(af::attacks::attack_kind_from_string(kind_name))) {
        s.seed = a.seed;
        specs.push_back(std::move(s));
      }
    }
  }

  af::eval::EvalOptions opt;
  opt.split = a.split;
  opt.threshold = a.threshold;
  opt.workers = a.workers;
  if (!a.no_cache) opt.cache_dir = (fs::path(a.out) / "cache").string();
  if (!a.no_images) opt.images_dir = (fs::path(a.out) / "images").string();

  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) throw af::IoError("cannot create output directory: " + a.out);

  af::report::Report rep;
  for (const std::string& mp : a.manifests) {
    af::corpus::Manifest m = af::corpus::load_manifest(mp);
    af::report::Report part = af::eval::evaluate(det, name, m, specs, opt);
    for (auto& row : part.rows) rep.rows.push_back(std::move(row));
  }
  af::report::append_family_averages(rep);

  af::report::write_csv(rep, (fs::path(a.out) / "report.csv").string());
  af::report::write_json(rep, (fs::path(a.out) / "report.json").string());
  af::report::write_markdown(rep, (fs::path(a.out) / "report.md").string());
  write_run_meta(a.out, "eval", argv, a.seed);

  for (const auto& row : rep.rows) {
    if (row.is_clean()) {
      std::cout << name << " " << row.dataset_id << " clean AUC " << fmtd("%.4f", row.auc)
                << " EER " << fmtd("%.4f", row.eer) << "\n";
    }
  }
  std::cout << "wrote " << (fs::path(a.out) / "report.csv").string() << " (" << rep.rows.size()
            << " rows)\n";
  return 0;
}

struct DefendArgs {
  std::string ckpt;
  std::string manifest;
  std::vector<std::string> kinds;  // empty = all eight
  bool no_attacks = false;
  double fraction = 0.5;
  int epochs = 10;
  int batch = 64;
  double lr = 1e-4;
  double wd = 1e-4;
  uint64_t seed = 0;
  std::string out;
};

int cmd_defend(const DefendArgs& a, const std::vector<std::string>& argv) {
  af::nn::Detector base = af::nn::load_checkpoint(a.ckpt);
  af::nn::Detector det;
  if (base.kind == af::nn::DetectorKind::raw) {
    det = af::nn::make_raw_tiny(base.input_samples, base.init_seed, base.sample_rate);
  } else {
    det = af::nn::make_spec_tiny(base.input_samples, base.init_seed, base.sample_rate,
                                 base.front);
  }

  af::corpus::Manifest m = af::corpus::load_manifest(a.manifest);
  af::eval::SplitData data = af::eval::load_split(m, "train", det.input_len());
  std::vector<std::vector<double>> waves;
  waves.reserve(data.clips.size());
  for (auto& c : data.clips) waves.push_back(std::move(c.samples));

  af::nn::TrainConfig cfg;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.lr = a.lr;
  cfg.weight_decay = a.wd;
  cfg.seed = a.seed;

  std::vector<af::attacks::AttackKind> kinds;
  if (!a.no_attacks) {
    if (a.kinds.empty()) {
      kinds = af::attacks::all_attack_kinds();
    } else {
      for (const std::string& k : a.kinds) {
        kinds.push_back(af::attacks::attack_kind_from_string(k));
      }
    }
  }

  af::nn::TrainResult res;
  if (kinds.empty()) {
    res = af::nn::train(det, waves, data.labels, cfg);
  } else {
    af::nn::AdvCrafter crafter = af::nn::random_attack_crafter(kinds, a.fraction);
    res = af::nn::train(det, waves, data.labels, cfg, &crafter);
    det.defended = 1;
  }

  std::error_code ec;
  fs::create_directories(fs::path(a.out).parent_path(), ec);
  af::nn::save_checkpoint(a.out, det);
  write_loss_csv(a.out + ".loss.csv", res);
  write_run_meta(fs::path(a.out).parent_path().string(), "defend", argv, a.seed);
  std::cout << "wrote " << a.out << "\n";
  std::cout << "final train loss " << fmtd("%.6f", res.epoch_loss.back()) << " after "
            << res.steps << " steps\n";
  return 0;
}

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string out;
};

int cmd_report(const ReportArgs& a, const std::vector<std::string>& argv) {
  std::vector<af::report::Report> parts;
  parts.reserve(a.inputs.size());
  for (const std::string& p : a.inputs) parts.push_back(af::report::load_json(p));
  af::report::Report merged = af::report::merge(parts);

  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) throw af::IoError("cannot create output directory: " + a.out);
  af::report::write_csv(merged, (fs::path(a.out) / "combined.csv").string());
  af::report::write_json(merged, (fs::path(a.out) / "combined.json").string());
  af::report::write_markdown(merged, (fs::path(a.out) / "combined.md").string());
  write_run_meta(a.out, "report", argv, 0);
  std::cout << "merged " << parts.size() << " reports into " << a.out << " ("
            << merged.rows.size() << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> raw_args(argv, argv + argc);

  CLI::App app{"Anti-forensic attack benchmark for audio deepfake detectors"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "Read options from an INI file (sections per subcommand)");
  app.require_subcommand(1);

  SynthArgs sa;
  CLI::App* synth = app.add_subcommand("synth", "Generate the synthetic corpus");
  synth->add_option("--n", sa.n, "Clips per class")->check(CLI::PositiveNumber);
  synth->add_option("--duration", sa.duration, "Clip length in seconds");
  synth->add_option("--rate", sa.rate, "Sample rate in Hz");
  synth->add_option("--seed", sa.seed, "RNG seed");
  synth->add_option("--artifact", sa.artifact, "spectral_notch, hf_hiss or phase_jitter");
  synth->add_option("--out", sa.out, "Output directory")->required();

  TrainArgs ta;
  CLI::App* train = app.add_subcommand("train", "Train a detector");
  train->add_option("--manifest", ta.manifest, "Corpus manifest CSV")->required();
  train->add_option("--detector", ta.detector, "raw or spec");
  train->add_option("--input-samples", ta.input_samples, "Detector input length");
  train->add_option("--epochs", ta.epochs, "Training epochs");
  train->add_option("--batch", ta.batch, "Batch size");
  train->add_option("--lr", ta.lr, "Learning rate");
  train->add_option("--wd", ta.wd, "Weight decay");
  train->add_option("--seed", ta.seed, "RNG seed");
  train->add_option("--out", ta.out, "Checkpoint output path")->required();

  AttackArgs aa;
  CLI::App* atk = app.add_subcommand("attack", "Apply one attack setting to a corpus");
  atk->add_option("--ckpt", aa.ckpt, "Detector checkpoint (needed for gradient attacks)");
  atk->add_option("--manifest", aa.manifest, "Corpus manifest CSV")->required();
  atk->add_option("--kind", aa.kind, "Attack kind")->required();
  atk->add_option("--split", aa.split, "Restrict to one split");
  atk->add_option("--semitones", aa.semitones, "Pitch shift amount");
  atk->add_option("--kernel", aa.kernel, "Median filter width");
  atk->add_option("--sigma", aa.sigma, "Noise standard deviation");
  atk->add_option("--bits", aa.bits, "Quantization bit depth");
  atk->add_option("--eps", aa.eps, "L-inf budget");
  atk->add_option("--steps", aa.pgd_steps, "PGD iterations");
  atk->add_option("--alpha", aa.pgd_alpha, "PGD step size (default 2.5*eps/steps)");
  atk->add_option("--c", aa.cw_c, "CW trade-off constant");
  atk->add_option("--kappa", aa.cw_kappa, "CW confidence margin");
  atk->add_option("--iters", aa.cw_iters, "CW iterations");
  atk->add_option("--attack-lr", aa.cw_lr, "CW learning rate");
  atk->add_option("--overshoot", aa.df_overshoot, "DeepFool overshoot");
  atk->add_option("--max-iters", aa.df_max_iters, "DeepFool iteration cap");
  atk->add_option("--seed", aa.seed, "RNG seed");
  atk->add_option("--out", aa.out, "Cache directory")->required();

  EvalArgs ea;
  CLI::App* ev = app.add_subcommand("eval", "Evaluate a detector under attack sweeps");
  ev->add_option("--ckpt", ea.ckpt, "Detector checkpoint")->required();
  ev->add_option("--manifest", ea.manifests, "Corpus manifest CSV (repeatable)")->required();
  ev->add_option("--attacks", ea.attacks, "Attack kinds to sweep (default: all)");
  ev->add_option("--split", ea.split, "Manifest split to score");
  ev->add_option("--threshold", ea.threshold, "Fake-probability decision threshold");
  ev->add_option("--workers", ea.workers, "Worker threads");
  ev->add_flag("--no-images", ea.no_images, "Skip PNG rendering");
  ev->add_flag("--no-cache", ea.no_cache, "Attack in memory instead of caching WAVs");
  ev->add_option("--seed", ea.seed, "RNG seed");
  ev->add_option("--out", ea.out, "Output directory")->required();

  DefendArgs da;
  CLI::App* def = app.add_subcommand("defend", "Adversarially train a detector");
  def->add_option("--ckpt", da.ckpt, "Checkpoint fixing architecture and init seed")
      ->required();
  def->add_option("--manifest", da.manifest, "Corpus manifest CSV")->required();
  def->add_option("--kinds", da.kinds, "Attack kinds to sample from (default: all)");
  def->add_flag("--no-attacks", da.no_attacks, "Disable augmentation (plain training)");
  def->add_option("--fraction", da.fraction, "Share of each batch replaced");
  def->add_option("--epochs", da.epochs, "Training epochs");
  def->add_option("--batch", da.batch, "Batch size");
  def->add_option("--lr", da.lr, "Learning rate");
  def->add_option("--wd", da.wd, "Weight decay");
  def->add_option("--seed", da.seed, "RNG seed");
  def->add_option("--out", da.out, "Hardened checkpoint output path")->required();

  ReportArgs ra;
  CLI::App* rep = app.add_subcommand("report", "Merge evaluation reports");
  rep->add_option("--in", ra.inputs, "Report JSON files")->required();
  rep->add_option("--out", ra.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(synth)) return cmd_synth(sa, raw_args);
    if (app.got_subcommand(train)) return cmd_train(ta, raw_args);
    if (app.got_subcommand(atk)) return cmd_attack(aa, raw_args);
    if (app.got_subcommand(ev)) return cmd_eval(ea, raw_args);
    if (app.got_subcommand(def)) return cmd_defend(da, raw_args);
    if (app.got_subcommand(rep)) return cmd_report(ra, raw_args);
  } catch (const af::ParamError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const af::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const af::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
