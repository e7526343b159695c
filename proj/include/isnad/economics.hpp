// Copyright 2026 The isnad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Effort/accuracy model.
//
// Remaining error decays exponentially with expert effort H:
//   q(H) = q0 * exp(-k H)
// Calibration: H_tot hours bring the error down to epsilon, so
//   k = ln(q0 / epsilon) / H_tot.
// Reaching accuracy a (remaining error 1 - a) therefore takes
//   H(a) = ln(q0 / (1 - a)) / k
// and the share of the full effort is
//   H(a) / H_tot = ln(q0 / (1 - a)) / ln(q0 / epsilon),
// independent of H_tot. A machine-produced layer at accuracy a is valued at
// H_tot * H(a) / H_tot person-hours.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace isnad::economics {

struct EffortModel {
  double q0 = 1.0;
  double epsilon = 1e-3;
};

/// 0 < epsilon < q0 <= 1; throws ValidationError otherwise.
void validate(const EffortModel& m);

/// Decay constant k for a task of h_tot hours.
double decay_rate(double h_tot, const EffortModel& m);

/// q0 * exp(-k H). Requires H >= 0 and h_tot > 0.
double remaining_error(double hours, double h_tot, const EffortModel& m);

/// Hours to reach accuracy a.
double effort_hours(double accuracy, double h_tot, const EffortModel& m);

/// ln(q0 / (1 - a)) / ln(q0 / epsilon). Throws Error(validation) with
/// "beyond operational maximum" when a > 1 - epsilon, and when 1 - a > q0
/// (accuracy below the starting point).
double effort_ratio(double accuracy, const EffortModel& m);

/// Rounds half away from zero to the nearest integer.
std::int64_t round_half_up(double x);

struct TaskInput {
  std::string name;
  double h_tot = 0.0;
  std::optional<double> accuracy;  // fraction in [0,1); absent when machine_only
  bool machine_only = false;
  bool assumed = false;  // accuracy is an assumption, not a measurement
  std::string group;     // rows sharing a non-empty group get a subtotal
};

struct TaskValuation {
  TaskInput input;
  std::optional<double> effort_ratio;
  std::optional<std::int64_t> valuation;  // person-hours, none for machine_only
};

struct Subtotal {
  std::string group;
  double h_tot = 0.0;
  std::int64_t valuation = 0;
};

struct ValuationTable {
  std::vector<TaskValuation> rows;
  std::vector<Subtotal> subtotals;  // in order of first appearance
  double total_h_tot = 0.0;
  std::int64_t total_valuation = 0;  // sum of rounded rows
};

/// valuation = round_half_up(h_tot * effort_ratio(a)) per row; subtotals and
/// the grand total sum the rounded rows.
ValuationTable build_valuation_table(const std::vector<TaskInput>& tasks, const EffortModel& m);

/// CSV with header task,h_tot,accuracy[,group][,assumed]. accuracy is a
/// fraction (0.934), a percentage (93.4%) or MACHINE; h_tot may contain
/// thousands separators when quoted and may be empty for MACHINE rows;
/// assumed is true/false/yes/no/1/0. Throws Error(config) on bad rows.
std::vector<TaskInput> parse_tasks_csv(std::string_view csv);
std::vector<TaskInput> load_tasks_csv(const std::string& path);

/// Fixed-width table; ratios with three decimals, hours with thousands
/// separators, assumed accuracies marked "(assumed)".
std::string render_table(const ValuationTable& t, const EffortModel& m);

}  // namespace isnad::economics
