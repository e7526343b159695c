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

#include "isnad/economics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "isnad/error.hpp"

namespace isnad::economics {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Splits one CSV line; double quotes group fields and "" escapes a quote.
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back().push_back(c);
    }
  }
  for (auto& f : out) f = trim(f);
  return out;
}

double parse_number(const std::string& field, std::size_t line_no, const char* what) {
  std::string digits;
  for (char c : field) {
    if (c != ',' && c != '_' && c != ' ') digits.push_back(c);
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(digits, &used);
    if (used != digits.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::config, fmt::format("line {}: bad {} '{}'", line_no, what, field));
  }
}

std::string thousands(std::int64_t v) {
  std::string digits = std::to_string(v < 0 ? -v : v);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return v < 0 ? "-" + out : out;
}

}  // namespace

void validate(const EffortModel& m) {
  if (!(m.epsilon > 0.0 && m.epsilon < m.q0 && m.q0 <= 1.0)) {
    throw ValidationError("0 < epsilon < q0 <= 1", fmt::format("q0={}, epsilon={}", m.q0, m.epsilon));
  }
}

double decay_rate(double h_tot, const EffortModel& m) {
  validate(m);
  if (!(h_tot > 0.0)) throw ValidationError("h_tot > 0");
  return std::log(m.q0 / m.epsilon) / h_tot;
}

double remaining_error(double hours, double h_tot, const EffortModel& m) {
  if (!(hours >= 0.0)) throw ValidationError("hours >= 0");
  return m.q0 * std::exp(-decay_rate(h_tot, m) * hours);
}

double effort_hours(double accuracy, double h_tot, const EffortModel& m) {
  return effort_ratio(accuracy, m) * h_tot;
}

double effort_ratio(double accuracy, const EffortModel& m) {
  validate(m);
  if (!(accuracy >= 0.0 && accuracy < 1.0) || accuracy > 1.0 - m.epsilon) {
    throw ValidationError("beyond operational maximum",
                          fmt::format("accuracy {} exceeds 1 - epsilon = {}", accuracy, 1.0 - m.epsilon));
  }
  if (1.0 - accuracy > m.q0) {
    throw ValidationError("accuracy >= 1 - q0", fmt::format("accuracy {} below the starting point", accuracy));
  }
  return std::log(m.q0 / (1.0 - accuracy)) / std::log(m.q0 / m.epsilon);
}

std::int64_t round_half_up(double x) { return static_cast<std::int64_t>(std::llround(x)); }

ValuationTable build_valuation_table(const std::vector<TaskInput>& tasks, const EffortModel& m) {
  validate(m);
  ValuationTable t;
  for (const auto& task : tasks) {
    TaskValuation row{task, std::nullopt, std::nullopt};
    if (!task.machine_only) {
      if (!task.accuracy) throw ValidationError("accuracy set unless machine_only", task.name);
      row.effort_ratio = effort_ratio(*task.accuracy, m);
      row.valuation = round_half_up(task.h_tot * *row.effort_ratio);
      t.total_h_tot += task.h_tot;
      t.total_valuation += *row.valuation;
      if (!task.group.empty()) {
        auto it = std::find_if(t.subtotals.begin(), t.subtotals.end(),
                               [&](const Subtotal& s) { return s.group == task.group; });
        if (it == t.subtotals.end()) it = t.subtotals.insert(t.subtotals.end(), Subtotal{task.group, 0.0, 0});
        it->h_tot += task.h_tot;
        it->valuation += *row.valuation;
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<TaskInput> parse_tasks_csv(std::string_view csv) {
  std::vector<TaskInput> out;
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    auto fields = split_csv(line);
    if (header.empty()) {
      for (auto& f : fields) f = lower(f);
      header = fields;
      if (header.size() < 3 || header[0] != "task" || header[1] != "h_tot" || header[2] != "accuracy") {
        throw Error(ErrorKind::config, "task CSV header must start with task,h_tot,accuracy");
      }
      continue;
    }
    if (fields.size() > header.size()) throw Error(ErrorKind::config, fmt::format("line {}: too many fields", line_no));
    fields.resize(header.size());
    TaskInput t;
    for (std::size_t i = 0; i < header.size(); ++i) {
      const auto& col = header[i];
      const auto& f = fields[i];
      if (col == "task") {
        t.name = f;
      } else if (col == "h_tot") {
        if (!f.empty()) t.h_tot = parse_number(f, line_no, "h_tot");
      } else if (col == "accuracy") {
        if (lower(f) == "machine") {
          t.machine_only = true;
        } else if (!f.empty() && f.back() == '%') {
          t.accuracy = parse_number(f.substr(0, f.size() - 1), line_no, "accuracy") / 100.0;
        } else {
          t.accuracy = parse_number(f, line_no, "accuracy");
        }
      } else if (col == "group") {
        t.group = f;
      } else if (col == "assumed") {
        const auto v = lower(f);
        if (v == "true" || v == "yes" || v == "1") {
          t.assumed = true;
        } else if (!(v.empty() || v == "false" || v == "no" || v == "0")) {
          throw Error(ErrorKind::config, fmt::format("line {}: bad assumed flag '{}'", line_no, f));
        }
      } else {
        throw Error(ErrorKind::config, "unknown task CSV column: " + col);
      }
    }
    if (t.name.empty()) throw Error(ErrorKind::config, fmt::format("line {}: empty task name", line_no));
    if (!t.machine_only && !t.accuracy) throw Error(ErrorKind::config, fmt::format("line {}: missing accuracy", line_no));
    if (!t.machine_only && !(t.h_tot > 0.0)) throw Error(ErrorKind::config, fmt::format("line {}: h_tot must be > 0", line_no));
    out.push_back(std::move(t));
  }
  if (header.empty()) throw Error(ErrorKind::config, "task CSV is empty");
  return out;
}

std::vector<TaskInput> load_tasks_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_tasks_csv(ss.str());
}

std::string render_table(const ValuationTable& t, const EffortModel& m) {
  std::string out = fmt::format("effort model: q0 = {}, epsilon = {}\n\n", m.q0, m.epsilon);
  const auto rule = std::string(96, '-') + "\n";
  out += fmt::format("{:<32} {:>12} {:>20} {:>12} {:>16}\n", "task", "H_tot", "accuracy", "effort ratio",
                     "person-hours");
  out += rule;
  std::string current_group = t.rows.empty() ? "" : t.rows.front().input.group;
  auto flush_group = [&](const std::string& group) {
    for (const auto& s : t.subtotals) {
      if (s.group != group) continue;
      out += rule;
      out += fmt::format("{:<32} {:>12} {:>20} {:>12} {:>16}\n", "Subtotal (" + s.group + ")",
                         thousands(round_half_up(s.h_tot)), "", "", thousands(s.valuation));
      out += rule;
    }
  };
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    if (r.input.group != current_group) {
      flush_group(current_group);
      current_group = r.input.group;
    }
    if (r.input.machine_only) {
      out += fmt::format("{:<32} {:>12} {:>20} {:>12} {:>16}\n", r.input.name,
                         r.input.h_tot > 0 ? thousands(round_half_up(r.input.h_tot)) : "-", "machine-only", "-", "-");
      continue;
    }
    const auto acc = fmt::format("{:.1f}%{}", *r.input.accuracy * 100.0, r.input.assumed ? " (assumed)" : "");
    out += fmt::format("{:<32} {:>12} {:>20} {:>12.3f} {:>16}\n", r.input.name, thousands(round_half_up(r.input.h_tot)),
                       acc, *r.effort_ratio, thousands(*r.valuation));
  }
  flush_group(current_group);
  if (!out.ends_with(rule)) out += rule;
  out += fmt::format("{:<32} {:>12} {:>20} {:>12} {:>16}\n", "Grand total", thousands(round_half_up(t.total_h_tot)), "",
                     "", thousands(t.total_valuation));
  return out;
}

}  // namespace isnad::economics
