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

#include "af/report.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>

#include <json.hpp>

#include "af/attack_spec.hpp"
#include "af/common.hpp"

namespace af::report {

namespace {

constexpr const char* kSchema = "afbench-report-v1";

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

int attack_rank(const std::string& attack) {
  if (attack == "clean") return -1;
  for (attacks::AttackKind k : attacks::all_attack_kinds()) {
    if (attack == attacks::to_string(k)) return static_cast<int>(k);
  }
  return 1000;  // unknown kinds sort last, then by name
}

bool is_defended(const std::string& detector) {
  constexpr std::string_view kSuffix = "-defended";
  return detector.size() >= kSuffix.size() &&
         detector.compare(detector.size() - kSuffix.size(), kSuffix.size(), kSuffix) == 0;
}

// Numeric part of labels like "eps=0.05", so grids stated out of order in the
// source material still report sorted. Average rows sort last.
bool param_value(const std::string& param, double* out) {
  size_t eq = param.find('=');
  if (eq == std::string::npos || eq + 1 >= param.size()) return false;
  char* end = nullptr;
  double v = std::strtod(param.c_str() + eq + 1, &end);
  if (end == param.c_str() + eq + 1) return false;
  *out = v;
  return true;
}

bool is_stat_attack_name(const std::string& attack) {
  int r = attack_rank(attack);
  if (r < 0 || r >= 1000) return false;
  return !attacks::is_gradient_attack(static_cast<attacks::AttackKind>(r));
}

bool is_grad_attack_name(const std::string& attack) {
  int r = attack_rank(attack);
  if (r < 0 || r >= 1000) return false;
  return attacks::is_gradient_attack(static_cast<attacks::AttackKind>(r));
}

struct GroupKey {
  std::string detector, dataset, attack;
  bool operator==(const GroupKey& o) const {
    return detector == o.detector && dataset == o.dataset && attack == o.attack;
  }
};

}  // namespace

void sort_rows(Report& r) {
  std::stable_sort(r.rows.begin(), r.rows.end(), [](const Row& a, const Row& b) {
    if (a.detector != b.detector) return a.detector < b.detector;
    if (a.dataset_id != b.dataset_id) return a.dataset_id < b.dataset_id;
    int ra = attack_rank(a.attack), rb = attack_rank(b.attack);
    if (ra != rb) return ra < rb;
    if (a.attack != b.attack) return a.attack < b.attack;
    if (a.is_avg() != b.is_avg()) return !a.is_avg();
    double va = 0.0, vb = 0.0;
    if (param_value(a.param, &va) && param_value(b.param, &vb) && va != vb) return va < vb;
    return false;  // otherwise keep insertion order
  });
}

void append_family_averages(Report& r) {
  std::vector<Row> rows;
  rows.reserve(r.rows.size());
  for (Row& row : r.rows) {
    if (!row.is_avg()) rows.push_back(std::move(row));
  }
  r.rows = std::move(rows);
  sort_rows(r);

  std::vector<Row> out;
  out.reserve(r.rows.size() + 8);
  size_t i = 0;
  while (i < r.rows.size()) {
    GroupKey key{r.rows[i].detector, r.rows[i].dataset_id, r.rows[i].attack};
    size_t j = i;
    while (j < r.rows.size() &&
           GroupKey{r.rows[j].detector, r.rows[j].dataset_id, r.rows[j].attack} == key) {
      out.push_back(r.rows[j]);
      ++j;
    }
    size_t members = j - i;
    if (members >= 2 && key.attack != "clean") {
      Row avg;
      avg.detector = key.detector;
      avg.dataset_id = key.dataset;
      avg.attack = key.attack;
      avg.param = "Avg.";
      avg.ssim = 0.0;
      double inv = 1.0 / static_cast<double>(members);
      for (size_t k = i; k < j; ++k) {
        const Row& m = r.rows[k];
        avg.n_clips += m.n_clips;
        avg.auc += m.auc * inv;
        avg.eer += m.eer * inv;
        avg.accuracy += m.accuracy * inv;
        avg.tn += m.tn;
        avg.fp += m.fp;
        avg.fn += m.fn;
        avg.tp += m.tp;
        avg.wave_mse += m.wave_mse * inv;
        avg.spec_mse += m.spec_mse * inv;
        avg.ssim += m.ssim * inv;
      }
      out.push_back(std::move(avg));
    }
    i = j;
  }
  r.rows = std::move(out);
}

Report merge(const std::vector<Report>& reports) {
  Report out;
  for (const Report& r : reports) {
    for (const Row& row : r.rows) {
      if (!row.is_avg()) out.rows.push_back(row);
    }
  }
  append_family_averages(out);
  return out;
}

namespace {

constexpr const char* kCsvHeader =
    "detector,dataset_id,attack,param,n_clips,auc,eer,accuracy,tn,fp,fn,tp,"
    "wave_mse,spec_mse,ssim";

}  // namespace

void write_csv(const Report& r, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write report: " + path);
  out << kCsvHeader << '\n';
  for (const Row& row : r.rows) {
    out << row.detector << ',' << row.dataset_id << ',' << row.attack << ',' << row.param << ','
        << row.n_clips << ',' << fmt("%.17g", row.auc) << ',' << fmt("%.17g", row.eer) << ','
        << fmt("%.17g", row.accuracy) << ',' << row.tn << ',' << row.fp << ',' << row.fn << ','
        << row.tp << ',' << fmt("%.17g", row.wave_mse) << ',' << fmt("%.17g", row.spec_mse)
        << ',' << fmt("%.17g", row.ssim) << '\n';
  }
  if (!out) throw IoError("short write on report: " + path);
}

void write_json(const Report& r, const std::string& path) {
  nlohmann::ordered_json doc;
  doc["schema"] = kSchema;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const Row& row : r.rows) {
    nlohmann::ordered_json j;
    j["detector"] = row.detector;
    j["dataset_id"] = row.dataset_id;
    j["attack"] = row.attack;
    j["param"] = row.param;
    j["n_clips"] = row.n_clips;
    j["auc"] = row.auc;
    j["eer"] = row.eer;
    j["accuracy"] = row.accuracy;
    j["tn"] = row.tn;
    j["fp"] = row.fp;
    j["fn"] = row.fn;
    j["tp"] = row.tp;
    j["wave_mse"] = row.wave_mse;
    j["spec_mse"] = row.spec_mse;
    j["ssim"] = row.ssim;
    doc["rows"].push_back(std::move(j));
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write report: " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("short write on report: " + path);
}

Report load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("report " + path + ": " + e.what());
  }
  if (!doc.is_object() || doc.value("schema", "") != kSchema) {
    throw FormatError("report " + path + ": missing or wrong schema (want " +
                      std::string(kSchema) + ")");
  }
  if (!doc.contains("rows") || !doc["rows"].is_array()) {
    throw FormatError("report " + path + ": rows array missing");
  }
  Report r;
  try {
    for (const auto& j : doc["rows"]) {
      Row row;
      row.detector = j.at("detector").get<std::string>();
      row.dataset_id = j.at("dataset_id").get<std::string>();
      row.attack = j.at("attack").get<std::string>();
      row.param = j.at("param").get<std::string>();
      row.n_clips = j.at("n_clips").get<long long>();
      row.auc = j.at("auc").get<double>();
      row.eer = j.at("eer").get<double>();
      row.accuracy = j.at("accuracy").get<double>();
      row.tn = j.at("tn").get<long long>();
      row.fp = j.at("fp").get<long long>();
      row.fn = j.at("fn").get<long long>();
      row.tp = j.at("tp").get<long long>();
      row.wave_mse = j.at("wave_mse").get<double>();
      row.spec_mse = j.at("spec_mse").get<double>();
      row.ssim = j.at("ssim").get<double>();
      r.rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("report " + path + ": bad row: " + e.what());
  }
  return r;
}

namespace {

void markdown_header(std::ofstream& out, const std::vector<std::string>& cols) {
  out << '|';
  for (const std::string& c : cols) out << ' ' << c << " |";
  out << "\n|";
  for (size_t i = 0; i < cols.size(); ++i) out << "---|";
  out << '\n';
}

std::string auc_eer_cell(const Row& r) {
  return fmt("%.3f", r.auc) + " / " + fmt("%.3f", r.eer);
}

}  // namespace

void write_markdown(const Report& r, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write report: " + path);

  out << "# Detection under anti-forensic attacks\n";

  auto section = [&](const char* title, auto pred, bool quality) {
    std::vector<const Row*> rows;
    for (const Row& row : r.rows) {
      if (pred(row)) rows.push_back(&row);
    }
    if (rows.empty()) return;
    out << "\n## " << title << "\n\n";
    if (quality) {
      markdown_header(out, {"Detector", "Dataset", "Attack", "Setting", "Waveform MSE",
                            "Spectrogram MSE", "SSIM"});
      for (const Row* row : rows) {
        out << "| " << row->detector << " | " << row->dataset_id << " | " << row->attack
            << " | " << row->param << " | " << fmt("%.3g", row->wave_mse) << " | "
            << fmt("%.3g", row->spec_mse) << " | " << fmt("%.4f", row->ssim) << " |\n";
      }
    } else {
      markdown_header(out,
                      {"Detector", "Dataset", "Attack", "Setting", "AUC / EER", "Accuracy",
                       "Clips"});
      for (const Row* row : rows) {
        out << "| " << row->detector << " | " << row->dataset_id << " | " << row->attack
            << " | " << row->param << " | " << auc_eer_cell(*row) << " | "
            << fmt("%.3f", row->accuracy) << " | " << row->n_clips << " |\n";
      }
    }
  };

  section("Baseline", [](const Row& x) { return x.is_clean(); }, false);
  section(
      "Statistical attacks",
      [](const Row& x) { return is_stat_attack_name(x.attack) && !is_defended(x.detector); },
      false);
  section(
      "Optimization attacks",
      [](const Row& x) { return is_grad_attack_name(x.attack) && !is_defended(x.detector); },
      false);
  section(
      "Defense",
      [](const Row& x) { return !x.is_clean() && is_defended(x.detector); }, false);
  section(
      "Perceptual quality", [](const Row& x) { return !x.is_clean(); }, true);

  if (!out) throw IoError("short write on report: " + path);
}

}  // namespace af::report
