// Copyright 2026 The lanetopo Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "lanetopo/sweep.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "lanetopo/errors.hpp"
#include "lanetopo/rng.hpp"

namespace lanetopo::sweep {

namespace {

std::string level_name(double ctrl_sigma, double drop_prob) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "ctrl=%.2f,drop=%.2f", ctrl_sigma, drop_prob);
  return buf;
}

NoiseLevel make_level(double ctrl_sigma, double drop_prob, const synthgen::NoiseModel& base) {
  NoiseLevel level{level_name(ctrl_sigma, drop_prob), base};
  level.noise.ctrl_sigma = ctrl_sigma;
  level.noise.drop_prob = drop_prob;
  return level;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::vector<NoiseLevel> default_levels(const synthgen::NoiseModel& base) {
  return {make_level(0.0, 0.0, base), make_level(0.25, 0.1, base), make_level(0.5, 0.3, base),
          make_level(1.0, 0.3, base)};
}

std::vector<NoiseLevel> grid_levels(const std::vector<double>& ctrl_sigmas,
                                    const std::vector<double>& drop_probs,
                                    const synthgen::NoiseModel& base) {
  if (ctrl_sigmas.empty() || drop_probs.empty()) throw ConfigError("sweep grid axes must be nonempty");
  std::vector<NoiseLevel> out;
  for (double c : ctrl_sigmas) {
    for (double d : drop_probs) out.push_back(make_level(c, d, base));
  }
  return out;
}

std::vector<SweepRow> run_sweep(const std::vector<dataio::SceneRecord>& scenes,
                                const topoheads::TopoHeadParams& params,
                                const std::vector<NoiseLevel>& levels, std::size_t seeds,
                                std::uint64_t seed, const metrics::DetMatchConfig& cfg) {
  if (levels.empty()) throw ConfigError("sweep needs at least one noise level");
  if (seeds == 0) throw ConfigError("sweep needs at least one seed");
  for (const auto& level : levels) synthgen::validate(level.noise);
  metrics::validate(cfg);
  topoheads::check_params(params);

  std::vector<SweepRow> rows;
  for (const auto& level : levels) {
    SweepRow row{level, {}, {}};
    for (std::size_t k = 0; k < seeds; ++k) {
      const auto dets = synthgen::corrupt_scenes(scenes, level.noise, derive_seed(seed, {k}));
      std::vector<dataio::PredictionRecord> preds;
      preds.reserve(dets.size());
      for (const auto& det : dets) preds.push_back(topoheads::predict_record(det, params));
      row.per_seed.push_back(metrics::evaluate(preds, scenes, cfg));
    }
    const double n = static_cast<double>(seeds);
    for (const auto& r : row.per_seed) {
      row.mean.det_l += r.det_l / n;
      row.mean.det_t += r.det_t / n;
      row.mean.top_ll += r.top_ll / n;
      row.mean.top_lt += r.top_lt / n;
    }
    auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
    row.mean.det_l = clamp01(row.mean.det_l);
    row.mean.det_t = clamp01(row.mean.det_t);
    row.mean.top_ll = clamp01(row.mean.top_ll);
    row.mean.top_lt = clamp01(row.mean.top_lt);
    row.mean.ols = metrics::ols(row.mean.det_l, row.mean.det_t, row.mean.top_ll, row.mean.top_lt);
    row.mean.scene_count = scenes.size();
    rows.push_back(std::move(row));
  }
  return rows;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("spearman needs two equal series of length >= 2");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(rx.size());
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(ry.size());
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::string sweep_to_json(const std::vector<SweepRow>& rows) {
  nlohmann::ordered_json doc;
  doc["format"] = "lanetopo.sweep";
  auto& levels = doc["levels"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    nlohmann::ordered_json level;
    level["index"] = i;
    level["name"] = row.level.name;
    level["noise"] = {{"ctrl_sigma", row.level.noise.ctrl_sigma},
                      {"box_sigma", row.level.noise.box_sigma},
                      {"drop_prob", row.level.noise.drop_prob},
                      {"spurious_rate", row.level.noise.spurious_rate},
                      {"confusion_prob", row.level.noise.confusion_prob},
                      {"conf_noise", row.level.noise.conf_noise}};
    level["mean"] = nlohmann::ordered_json::parse(dataio::report_to_json(row.mean));
    auto& seeds = level["per_seed"] = nlohmann::ordered_json::array();
    for (const auto& r : row.per_seed) {
      seeds.push_back({{"det_l", r.det_l}, {"det_t", r.det_t}, {"top_ll", r.top_ll},
                       {"top_lt", r.top_lt}, {"ols", r.ols}});
    }
    levels.push_back(std::move(level));
  }
  return doc.dump(2);
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "level,name,ctrl_sigma,drop_prob,det_l,det_t,top_ll,top_lt,ols\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << i << ',' << '"' << r.level.name << '"' << ',' << r.level.noise.ctrl_sigma << ','
        << r.level.noise.drop_prob << ',' << r.mean.det_l << ',' << r.mean.det_t << ','
        << r.mean.top_ll << ',' << r.mean.top_lt << ',' << r.mean.ols << '\n';
  }
  return out.str();
}

std::string format_sweep_table(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "noise level          | DET_l (%) | DET_t (%) | TOP_ll (%) | TOP_lt (%) | OLS (%)\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(20) << r.level.name << std::right << " | " << std::setw(9)
        << r.mean.det_l * 100.0 << " | " << std::setw(9) << r.mean.det_t * 100.0 << " | "
        << std::setw(10) << r.mean.top_ll * 100.0 << " | " << std::setw(10) << r.mean.top_lt * 100.0
        << " | " << std::setw(7) << r.mean.ols * 100.0 << '\n';
  }
  return out.str();
}

}  // namespace lanetopo::sweep
