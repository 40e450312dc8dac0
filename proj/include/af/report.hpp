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

#pragma once

#include <string>
#include <vector>

namespace af::report {

// One evaluated condition. Attack "clean" with param "-" is the unattacked
// baseline; param "Avg." marks a family-average row.
struct Row {
  std::string detector;
  std::string dataset_id;
  std::string attack = "clean";
  std::string param = "-";
  long long n_clips = 0;
  double auc = 0.0;
  double eer = 0.0;
  double accuracy = 0.0;
  long long tn = 0, fp = 0, fn = 0, tp = 0;
  double wave_mse = 0.0;
  double spec_mse = 0.0;
  double ssim = 1.0;

  bool is_avg() const { return param == "Avg."; }
  bool is_clean() const { return attack == "clean"; }
};

struct Report {
  std::vector<Row> rows;
};

// Deterministic writers: no timestamps, doubles printed with %.17g so equal
// values give equal bytes.
void write_csv(const Report& r, const std::string& path);
void write_json(const Report& r, const std::string& path);
void write_markdown(const Report& r, const std::string& path);

Report load_json(const std::string& path);

// Canonical row order: detector, dataset, attack kind, then numeric
// parameter value, with average rows trailing their group.
void sort_rows(Report& r);

// Inserts one "Avg." row after every (detector, dataset, attack) group with
// at least two members. Existing average rows are dropped first.
void append_family_averages(Report& r);

// Union of member rows with averages recomputed.
Report merge(const std::vector<Report>& reports);

}  // namespace af::report
