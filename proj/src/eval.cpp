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

#include "af/eval.hpp"

#include <atomic>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

#include "af/common.hpp"
#include "af/metrics.hpp"
#include "af/model.hpp"
#include "af/opt_attacks.hpp"
#include "af/png.hpp"

namespace fs = std::filesystem;

namespace af::eval {

namespace {

void parallel_for(size_t n, int workers, const std::function<void(size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  size_t pool_size = std::min(static_cast<size_t>(workers), n);
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(pool_size);
  for (size_t w = 0; w < pool_size; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string sanitize(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

struct QualityTriple {
  double wave = 0.0;
  double spec = 0.0;
  double ssim = 1.0;
};

}  // namespace

SplitData load_split(const corpus::Manifest& m, const std::string& split, size_t target_len) {
  auto entries = m.split_view(split);
  if (entries.empty()) {
    throw DataError("manifest " + m.root + " has no '" + split + "' entries");
  }
  SplitData data;
  data.clips.reserve(entries.size());
  for (const corpus::ManifestEntry* e : entries) {
    audio::AudioClip clip = audio::read_wav(m.resolve(*e));
    data.clips.push_back(audio::normalize_length(clip, target_len));
    data.labels.push_back(e->label);
    data.dataset_ids.push_back(e->dataset_id);
  }
  return data;
}

std::vector<double> score_clips(const nn::Detector& det,
                                const std::vector<audio::AudioClip>& clips, int workers) {
  std::vector<double> scores(clips.size());
  parallel_for(clips.size(), workers, [&](size_t i) {
    scores[i] = nn::fake_score(det.logits(clips[i].samples));
  });
  return scores;
}

std::vector<attacks::AttackSpec> default_attack_sweep(uint64_t seed) {
  std::vector<attacks::AttackSpec> specs;
  for (attacks::AttackKind k : attacks::all_attack_kinds()) {
    for (attacks::AttackSpec s : attacks::grid_for(k)) {
      s.seed = seed;
      specs.push_back(std::move(s));
    }
  }
  return specs;
}

namespace {

std::vector<audio::AudioClip> attacked_clips(const nn::Detector& det, const SplitData& data,
                                             const corpus::Manifest& manifest,
                                             const attacks::AttackSpec& spec,
                                             const EvalOptions& opt) {
  std::vector<audio::AudioClip> out(data.clips.size());
  if (opt.cache_dir.empty()) {
    parallel_for(data.clips.size(), opt.workers, [&](size_t i) {
      out[i] = attacks::apply_attack(&det, data.clips[i], data.labels[i], spec);
    });
    return out;
  }

  corpus::Manifest sub;
  sub.root = manifest.root;
  for (const corpus::ManifestEntry* e : manifest.split_view(opt.split)) {
    sub.entries.push_back(*e);
  }
  corpus::CacheResult cached = corpus::cache_attacked(sub, spec, opt.cache_dir, &det);
  for (size_t i = 0; i < cached.manifest.entries.size(); ++i) {
    audio::AudioClip clip = audio::read_wav(cached.manifest.resolve(cached.manifest.entries[i]));
    out[i] = audio::normalize_length(clip, det.input_len());
    out[i].id = data.clips[i].id;  // cache names clips by key
  }
  return out;
}

}  // namespace

report::Report evaluate(const nn::Detector& det, const std::string& detector_name,
                        const corpus::Manifest& manifest,
                        const std::vector<attacks::AttackSpec>& attacks,
                        const EvalOptions& opt) {
  SplitData data = load_split(manifest, opt.split, det.input_len());
  const size_t n = data.clips.size();

  std::map<std::string, std::vector<size_t>> groups;
  for (size_t i = 0; i < n; ++i) groups[data.dataset_ids[i]].push_back(i);

  bool images = !opt.images_dir.empty();
  if (images) {
    std::error_code ec;
    fs::create_directories(opt.images_dir, ec);
    if (ec) throw IoError("cannot create image directory: " + opt.images_dir);
  }

  report::Report rep;

  auto emit_rows = [&](const std::vector<double>& scores, const std::string& attack_name,
                       const std::string& param, const std::vector<QualityTriple>* quality,
                       const std::vector<audio::AudioClip>* attacked) {
    for (const auto& [dataset, idx] : groups) {
      report::Row row;
      row.detector = detector_name;
      row.dataset_id = dataset;
      row.attack = attack_name;
      row.param = param;
      row.n_clips = static_cast<long long>(idx.size());

      std::vector<double> s;
      std::vector<int> l;
      s.reserve(idx.size());
      l.reserve(idx.size());
      for (size_t i : idx) {
        s.push_back(scores[i]);
        l.push_back(data.labels[i]);
      }
      try {
        row.auc = metrics::roc_auc(s, l);
        row.eer = metrics::eer(s, l);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " (dataset '" + dataset + "' in " +
                           manifest.root + ")");
      }
      metrics::Confusion c = metrics::confusion(s, l, opt.threshold);
      row.tn = c.tn;
      row.fp = c.fp;
      row.fn = c.fn;
      row.tp = c.tp;
      row.accuracy = metrics::accuracy(c);

      if (quality != nullptr) {
        row.wave_mse = row.spec_mse = row.ssim = 0.0;
        for (size_t i : idx) {
          row.wave_mse += (*quality)[i].wave;
          row.spec_mse += (*quality)[i].spec;
          row.ssim += (*quality)[i].ssim;
        }
        double inv = 1.0 / static_cast<double>(idx.size());
        row.wave_mse *= inv;
        row.spec_mse *= inv;
        row.ssim *= inv;
      }

      if (images) {
        std::string stem = sanitize(detector_name) + "_" + sanitize(dataset) + "_" +
                           sanitize(attack_name) + "_" + sanitize(param);
        png::write_png((fs::path(opt.images_dir) / ("confusion_" + stem + ".png")).string(),
                       png::render_confusion(c));
        if (attacked != nullptr) {
          size_t pick = idx[0];
          for (size_t i : idx) {
            if (data.labels[i] == nn::kClassFake) {
              pick = i;
              break;
            }
          }
          metrics::QualityPair pair =
              metrics::make_quality_pair(data.clips[pick], (*attacked)[pick], opt.front);
          png::write_png((fs::path(opt.images_dir) / ("triptych_" + stem + ".png")).string(),
                         png::render_triptych(pair.original_view, pair.attacked_view));
        }
      }
      rep.rows.push_back(std::move(row));
    }
  };

  std::vector<double> clean_scores = score_clips(det, data.clips, opt.workers);
  emit_rows(clean_scores, "clean", "-", nullptr, nullptr);

  for (const attacks::AttackSpec& given : attacks) {
    attacks::AttackSpec spec = given;
    if (attacks::is_gradient_attack(spec.kind) && spec.model_tag.empty()) {
      spec.model_tag = det.param_fingerprint();
    }
    std::vector<audio::AudioClip> attacked = attacked_clips(det, data, manifest, spec, opt);
    std::vector<double> scores = score_clips(det, attacked, opt.workers);

    std::vector<QualityTriple> quality(n);
    parallel_for(n, opt.workers, [&](size_t i) {
      metrics::QualityPair pair =
          metrics::make_quality_pair(data.clips[i], attacked[i], opt.front);
      quality[i] = {pair.waveform_mse, metrics::spec_mse(pair), metrics::ssim(pair)};
    });

    emit_rows(scores, attacks::to_string(spec.kind), spec.param_label(), &quality, &attacked);
  }
  return rep;
}

}  // namespace af::eval
