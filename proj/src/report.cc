//
// Copyright 2026 The Synthbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "synthbench/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace synthbench {
namespace {

using nlohmann::json;

constexpr double kCanvas = 720.0;
constexpr double kRadius = 230.0;

std::string Fixed(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.2f", v);
  // Avoid "-0.00".
  if (std::string_view(buffer) == "-0.00") return "0.00";
  return buffer;
}

std::pair<double, double> Point(int axis, int num_axes, double r) {
  const double angle =
      -std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * axis / num_axes;
  return {kCanvas / 2.0 + r * kRadius * std::cos(angle),
          kCanvas / 2.0 + r * kRadius * std::sin(angle)};
}

std::string PolygonPoints(const std::vector<double>& radii) {
  std::string out;
  const int k = static_cast<int>(radii.size());
  for (int a = 0; a < k; ++a) {
    const auto [x, y] = Point(a, k, radii[a]);
    absl::StrAppend(&out, a == 0 ? "" : " ", Fixed(x), ",", Fixed(y));
  }
  return out;
}

std::string Escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

absl::StatusOr<RadarSpec> NormalizeScores(
    const NineScores& scores, const std::optional<NineScores>& anchor,
    double rmse_floor, double coverage_level) {
  const std::array<double, kNumScores> ideals = {
      0.0, 1.0, 0.0, 1.0, coverage_level, 0.0, rmse_floor, 1.0, 0.0};
  const std::array<double, kNumScores> observed = scores.AsArray();
  const std::array<double, kNumScores> base = anchor.value_or(scores).AsArray();
  RadarSpec spec;
  for (int k = 0; k < kNumScores; ++k) {
    if (!std::isfinite(observed[k]) || !std::isfinite(base[k])) {
      return absl::InvalidArgumentError(absl::StrCat(
          "score '", std::string(NineScores::Keys()[k]), "' is not finite"));
    }
    RadarAxis axis;
    axis.label = std::string(NineScores::Labels()[k]);
    axis.ideal = ideals[k];
    axis.observed = observed[k];
    axis.deviation = std::abs(observed[k] - ideals[k]);
    axis.worst_deviation = kAnchorSlack * std::abs(base[k] - ideals[k]);
    if (axis.worst_deviation > 0.0) {
      axis.radius =
          1.0 - std::clamp(axis.deviation / axis.worst_deviation, 0.0, 1.0);
    } else {
      axis.radius = axis.deviation == 0.0 ? 1.0 : 0.0;
    }
    spec.axes.push_back(axis);
  }
  return spec;
}

std::string RenderRadarSvg(const RadarSpec& spec) {
  const int k = static_cast<int>(spec.axes.size());
  std::string out;
  absl::StrAppend(&out,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"",
                  Fixed(kCanvas), "\" height=\"", Fixed(kCanvas),
                  "\" viewBox=\"0 0 ", Fixed(kCanvas), " ", Fixed(kCanvas),
                  "\">\n");
  absl::StrAppend(&out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
  if (!spec.title.empty()) {
    absl::StrAppend(&out, "<text x=\"", Fixed(kCanvas / 2.0),
                    "\" y=\"28.00\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                    "font-size=\"16\">",
                    Escape(spec.title), "</text>\n");
  }
  for (double ring : {0.25, 0.5, 0.75, 1.0}) {
    absl::StrAppend(&out, "<polygon points=\"",
                    PolygonPoints(std::vector<double>(k, ring)),
                    "\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n");
  }
  for (int a = 0; a < k; ++a) {
    const auto [x, y] = Point(a, k, 1.0);
    absl::StrAppend(&out, "<line x1=\"", Fixed(kCanvas / 2.0), "\" y1=\"",
                    Fixed(kCanvas / 2.0), "\" x2=\"", Fixed(x), "\" y2=\"",
                    Fixed(y), "\" stroke=\"#888888\" stroke-width=\"1\"/>\n");
  }
  std::vector<double> radii;
  for (const RadarAxis& axis : spec.axes) radii.push_back(axis.radius);
  absl::StrAppend(&out, "<polygon points=\"", PolygonPoints(radii),
                  "\" fill=\"#3366cc\" fill-opacity=\"0.35\" stroke=\"#3366cc\" "
                  "stroke-width=\"2\"/>\n");
  for (int a = 0; a < k; ++a) {
    const auto [x, y] = Point(a, k, 1.13);
    const double dx = x - kCanvas / 2.0;
    const char* anchor =
        std::abs(dx) < 1.0 ? "middle" : (dx > 0 ? "start" : "end");
    absl::StrAppend(&out, "<text x=\"", Fixed(x), "\" y=\"", Fixed(y),
                    "\" text-anchor=\"", anchor,
                    "\" font-family=\"sans-serif\" font-size=\"13\">",
                    Escape(spec.axes[a].label), " (",
                    Fixed(spec.axes[a].observed), ")</text>\n");
  }
  out += "</svg>\n";
  return out;
}

absl::Status WriteRadar(const RadarSpec& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  out << RenderRadarSvg(spec);
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<ScoresFile> ParseScoresJson(std::string_view text) {
  try {
    const json j = json::parse(text);
    ScoresFile file;
    file.synthesizer = j.at("synthesizer").get<std::string>();
    file.rmse_floor = j.at("rmse_floor").get<double>();
    for (const json& s : j.at("sub_plans")) {
      ScoresFileEntry e;
      e.n_train = s.at("n_train").get<int64_t>();
      e.epsilon = s.at("epsilon").get<double>();
      std::array<double, kNumScores> v{};
      for (int k = 0; k < kNumScores; ++k) {
        v[k] = s.at("scores").at(std::string(NineScores::Keys()[k])).get<double>();
      }
      e.scores = NineScores::FromArray(v);
      file.entries.push_back(e);
    }
    return file;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed scores file: ", e.what()));
  }
}

absl::StatusOr<ScoresFile> LoadScoresJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  absl::StatusOr<ScoresFile> file = ParseScoresJson(buffer.str());
  if (!file.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": ", file.status().message()));
  }
  return file;
}

std::string FormatScoresTable(const ScoresFile& file) {
  std::string out = "| n_train | epsilon |";
  for (std::string_view label : NineScores::Labels()) {
    absl::StrAppend(&out, " ", std::string(label), " |");
  }
  out += "\n|---|---|";
  for (int k = 0; k < kNumScores; ++k) out += "---|";
  out += "\n";
  for (const ScoresFileEntry& e : file.entries) {
    char eps[32];
    std::snprintf(eps, sizeof(eps), "%g", e.epsilon);
    absl::StrAppend(&out, "| ", e.n_train, " | ", eps, " |");
    for (double v : e.scores.AsArray()) absl::StrAppend(&out, " ", Fixed(v), " |");
    out += "\n";
  }
  return out;
}

}  // namespace synthbench
