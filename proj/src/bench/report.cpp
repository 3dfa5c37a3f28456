/*
 * Copyright 2026 The ctxbench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ctxbench/bench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>

#include "ctxbench/model/fusion.hpp"
#include "ctxbench/train/train.hpp"

namespace ctxbench::bench {

namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string method_label(const ResultRow& r) {
  return r.technique == "NoContext" ? r.technique : r.technique + " (" + r.features + ")";
}

template <typename T>
void add_unique(std::vector<T>& list, const T& v) {
  if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
}

struct Mean {
  double sum = 0.0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    ++n;
  }
  double value() const { return sum / static_cast<double>(n); }
};

// Bold every entry equal to the column minimum.
std::vector<std::string> column_cells(const std::vector<std::optional<double>>& column) {
  double best = INFINITY;
  for (const auto& v : column)
    if (v) best = std::min(best, *v);
  std::vector<std::string> out;
  for (const auto& v : column) {
    if (!v) out.emplace_back("-");
    else out.push_back(*v == best ? "**" + fixed(*v) + "**" : fixed(*v));
  }
  return out;
}

}  // namespace

std::vector<ReportTable> summarize(const std::vector<ResultRow>& rows) {
  std::set<int> intervals;
  for (const auto& r : rows) intervals.insert(r.interval);

  std::vector<ReportTable> tables;
  for (int interval : intervals) {
    ReportTable t;
    t.interval = interval;
    std::map<std::pair<std::string, std::string>, Mean> rmse, mae;
    for (const auto& r : rows) {
      if (r.interval != interval) continue;
      const std::string m = method_label(r);
      add_unique(t.methods, m);
      add_unique(t.datasets, r.dataset);
      rmse[{m, r.dataset}].add(r.rmse);
      mae[{m, r.dataset}].add(r.mae);
    }
    std::stable_partition(t.methods.begin(), t.methods.end(), [](const std::string& m) { return m == "NoContext"; });

    std::vector<std::size_t> complete;
    for (std::size_t i = 0; i < t.methods.size(); ++i) {
      std::vector<std::optional<double>> row_rmse, row_mae;
      for (const auto& ds : t.datasets) {
        const auto it = rmse.find({t.methods[i], ds});
        row_rmse.push_back(it == rmse.end() ? std::nullopt : std::optional<double>(it->second.value()));
        row_mae.push_back(it == rmse.end() ? std::nullopt : std::optional<double>(mae.at({t.methods[i], ds}).value()));
      }
      if (std::all_of(row_rmse.begin(), row_rmse.end(), [](const auto& v) { return v.has_value(); }))
        complete.push_back(i);
      t.rmse.push_back(std::move(row_rmse));
      t.mae.push_back(std::move(row_mae));
    }
    t.has_baseline = !complete.empty() && complete[0] == 0 && t.methods[0] == "NoContext";

    auto averages = [&](const std::vector<std::vector<std::optional<double>>>& metric) {
      std::vector<std::optional<double>> out(t.methods.size());
      if (complete.empty()) return out;
      std::vector<std::vector<double>> matrix;
      for (std::size_t i : complete) {
        std::vector<double> row;
        for (const auto& v : metric[i]) row.push_back(*v);
        matrix.push_back(std::move(row));
      }
      const auto avg = train::avg_normalized(matrix);
      for (std::size_t k = 0; k < complete.size(); ++k) out[complete[k]] = avg[k];
      return out;
    };
    t.avg_rmse = averages(t.rmse);
    t.avg_mae = averages(t.mae);
    tables.push_back(std::move(t));
  }
  return tables;
}

Report emit_report(const std::vector<ResultRow>& rows) {
  Report report;
  for (const ReportTable& t : summarize(rows)) {
    std::vector<std::vector<std::string>> cells(t.methods.size());
    auto add_column = [&](const std::vector<std::optional<double>>& column, bool star) {
      auto text = column_cells(column);
      if (star) {
        for (std::size_t i = 1; i < column.size(); ++i)
          if (column[i] && *column[i] < *column[0]) text[i] += "*";
      }
      for (std::size_t i = 0; i < text.size(); ++i) cells[i].push_back(std::move(text[i]));
    };
    for (std::size_t d = 0; d < t.datasets.size(); ++d) {
      for (const auto* metric : {&t.rmse, &t.mae}) {
        std::vector<std::optional<double>> column;
        for (const auto& row : *metric) column.push_back(row[d]);
        add_column(column, false);
      }
    }
    add_column(t.avg_rmse, t.has_baseline);
    add_column(t.avg_mae, t.has_baseline);
    if (!t.has_baseline) {
      report.warnings.push_back(std::to_string(t.interval) +
                                "-minute table: no NoContext result on every dataset; '*' marks omitted");
    }

    std::string& md = report.markdown;
    md += "### " + std::to_string(t.interval) + "-minute interval\n\n| Method |";
    for (const auto& ds : t.datasets) md += " " + ds + " RMSE | " + ds + " MAE |";
    md += " avgNRMSE | avgNMAE |\n|---|";
    for (std::size_t c = 0; c < 2 * t.datasets.size() + 2; ++c) md += "---:|";
    md += "\n";
    for (std::size_t i = 0; i < t.methods.size(); ++i) {
      md += "| " + t.methods[i] + " |";
      for (const auto& c : cells[i]) md += " " + c + " |";
      md += "\n";
    }
    md += "\n";
  }
  return report;
}

std::vector<OverheadRow> measure_overhead(const std::vector<ResultRow>& rows) {
  std::map<std::string, double> baseline;  // dataset|interval|seed -> seconds
  for (const auto& r : rows) {
    if (r.technique == "NoContext") baseline[r.dataset + "|" + std::to_string(r.interval) + "|" + std::to_string(r.seed)] = r.train_seconds;
  }
  if (baseline.empty()) throw std::invalid_argument("overhead: no NoContext baseline in the results");

  std::vector<std::string> order{"NoContext"};
  std::map<std::string, Mean> seconds, ratio;
  for (const auto& r : rows) {
    const auto it = baseline.find(r.dataset + "|" + std::to_string(r.interval) + "|" + std::to_string(r.seed));
    if (it == baseline.end() || !(it->second > 0.0)) continue;
    add_unique(order, r.technique);
    seconds[r.technique].add(r.train_seconds);
    ratio[r.technique].add(r.train_seconds / it->second);
  }
  std::vector<OverheadRow> out;
  for (const auto& t : order) {
    if (!ratio.count(t)) continue;
    out.push_back({t, ratio[t].n, seconds[t].value(), ratio[t].value()});
  }
  return out;
}

std::string format_overhead(const std::vector<OverheadRow>& table) {
  std::string md = "| Technique | Runs | Mean train seconds | Ratio vs NoContext |\n|---|---:|---:|---:|\n";
  for (const auto& r : table) {
    md += "| " + r.technique + " | " + std::to_string(r.pairs) + " | " + fixed(r.mean_seconds) + " | " + fixed(r.ratio) +
          " |\n";
  }
  return md;
}

std::string emit_sweep_table(const std::vector<ResultRow>& rows) {
  struct Key {
    std::string dataset;
    int interval;
    bool operator<(const Key& o) const { return std::tie(dataset, interval) < std::tie(o.dataset, o.interval); }
  };
  // (dataset, interval) -> technique -> width label -> mean rmse
  std::map<Key, std::map<std::string, std::map<std::string, Mean>>> data;
  std::map<std::string, std::size_t> width_rank;  // label -> leading width for column order
  for (const auto& r : rows) {
    model::FusionSpec spec;
    try {
      spec = model::FusionSpec::parse(r.technique);
    } catch (const model::UnknownTechnique&) {
      continue;
    }
    if (spec.stage != model::Stage::late || spec.representation == model::Representation::raw) continue;
    std::string width;
    std::size_t rank = 0;
    if (spec.representation == model::Representation::multi_embed) {
      for (std::size_t i = 0; i < 4; ++i) width += (i ? "-" : "") + std::to_string(spec.family_dims[i]);
      rank = spec.family_dims[0];
    } else {
      rank = spec.representation == model::Representation::embed ? spec.embed_dim : spec.lstm_hidden;
      width = std::to_string(rank);
    }
    width_rank[width] = rank;
    data[{r.dataset, r.interval}][spec.name() + " (" + r.features + ")"][width].add(r.rmse);
  }

  std::string md;
  for (const auto& [key, techniques] : data) {
    std::vector<std::string> swept;
    std::set<std::string> widths;
    for (const auto& [t, by_width] : techniques) {
      if (by_width.size() < 2) continue;
      swept.push_back(t);
      for (const auto& [w, _] : by_width) widths.insert(w);
    }
    if (swept.empty()) continue;
    std::vector<std::string> cols(widths.begin(), widths.end());
    std::sort(cols.begin(), cols.end(), [&](const std::string& a, const std::string& b) {
      return std::pair(width_rank[a], a) < std::pair(width_rank[b], b);
    });
    md += "### Context width sweep: " + key.dataset + ", " + std::to_string(key.interval) + "-minute RMSE\n\n| Technique |";
    for (const auto& c : cols) md += " " + c + " |";
    md += "\n|---|";
    for (std::size_t i = 0; i < cols.size(); ++i) md += "---:|";
    md += "\n";
    for (const auto& t : swept) {
      md += "| " + t + " |";
      for (const auto& c : cols) {
        const auto& by_width = techniques.at(t);
        const auto it = by_width.find(c);
        md += " " + (it == by_width.end() ? std::string("-") : fixed(it->second.value())) + " |";
      }
      md += "\n";
    }
    md += "\n";
  }
  return md;
}

}  // namespace ctxbench::bench
