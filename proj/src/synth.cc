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

#include "synthbench/synth.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace synthbench {
namespace {

using nlohmann::json;

constexpr int kModelFormatVersion = 1;

bool IsDp(SynthesizerKind kind) { return kind != SynthesizerKind::kResampler; }

// ---------------------------------------------------------------------------
// DpMarginal

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int Find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void Join(int a, int b) { parent[Find(a)] = Find(b); }
};

// Mixed-radix cell index over the levels of `columns`; the first column
// varies fastest.
int64_t CellCount(const Schema& schema, const std::vector<int>& columns) {
  int64_t cells = 1;
  for (int c : columns) cells *= schema.column(c).kind.level_count;
  return cells;
}

std::vector<int> CellLevels(const Schema& schema,
                            const std::vector<int>& columns, int64_t cell) {
  std::vector<int> levels(columns.size());
  for (size_t k = 0; k < columns.size(); ++k) {
    const int count = schema.column(columns[k]).kind.level_count;
    levels[k] = static_cast<int>(cell % count);
    cell /= count;
  }
  return levels;
}

// True if the joint cell breaks a rule whose columns both lie in the factor.
bool CellForbidden(const Schema& schema, const std::vector<int>& columns,
                   const std::vector<int>& levels) {
  auto level_of = [&](int column) -> int {
    for (size_t k = 0; k < columns.size(); ++k) {
      if (columns[k] == column) return levels[k];
    }
    return -1;
  };
  for (const StructuralZeroRule& r : schema.zero_rules()) {
    const int g = level_of(r.guard_column);
    const int f = level_of(r.forced_column);
    if (g < 0 || f < 0) continue;
    if (g == r.guard_level && f != r.forced_level) return true;
  }
  return false;
}

int BinOf(double value, const MarginalFactor& factor) {
  if (!(factor.hi > factor.lo)) return 0;
  const double width = (factor.hi - factor.lo) / factor.bins;
  const int b = static_cast<int>(std::floor((value - factor.lo) / width));
  return std::clamp(b, 0, factor.bins - 1);
}

double SampleLaplace(double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  double v = u(rng);
  while (v == -0.5) v = u(rng);
  const double sign = v < 0.0 ? -1.0 : 1.0;
  return -scale * sign * std::log1p(-2.0 * std::abs(v));
}

absl::StatusOr<MarginalState> FitMarginal(const MarginalConfig& config,
                                          const PrivacyBudget& budget,
                                          const Dataset& train,
                                          std::mt19937_64& rng) {
  const Schema& schema = train.schema();
  const int num_columns = schema.num_columns();
  UnionFind groups(num_columns);
  if (config.joint_zero_rules) {
    for (const StructuralZeroRule& r : schema.zero_rules()) {
      groups.Join(r.guard_column, r.forced_column);
    }
  }
  MarginalState state;
  std::vector<int> factor_of_root(num_columns, -1);
  for (int c = 0; c < num_columns; ++c) {
    const int root = groups.Find(c);
    if (factor_of_root[root] < 0) {
      factor_of_root[root] = static_cast<int>(state.factors.size());
      state.factors.emplace_back();
    }
    state.factors[factor_of_root[root]].columns.push_back(c);
  }

  // Each factor is one sensitivity-1 histogram; the budget is split evenly.
  const double scale =
      static_cast<double>(state.factors.size()) / budget.epsilon;
  for (MarginalFactor& f : state.factors) {
    const ColumnKind& kind = schema.column(f.columns.front()).kind;
    std::vector<double> counts;
    std::vector<bool> allowed;
    if (kind.type == ColumnType::kCategorical) {
      const int64_t cells = CellCount(schema, f.columns);
      counts.assign(cells, 0.0);
      allowed.assign(cells, true);
      for (int64_t cell = 0; cell < cells; ++cell) {
        allowed[cell] =
            !CellForbidden(schema, f.columns, CellLevels(schema, f.columns, cell));
      }
      for (int64_t i = 0; i < train.num_rows(); ++i) {
        int64_t cell = 0;
        int64_t stride = 1;
        for (int c : f.columns) {
          cell += static_cast<int64_t>(train.at(i, c)) * stride;
          stride *= schema.column(c).kind.level_count;
        }
        counts[cell] += 1.0;
      }
    } else {
      // Only categorical columns carry zero rules, so this factor is single.
      std::span<const double> values = train.column(f.columns.front());
      const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
      f.lo = *lo;
      f.hi = *hi;
      f.bins = config.bins;
      counts.assign(f.bins, 0.0);
      allowed.assign(f.bins, true);
      for (double v : values) counts[BinOf(v, f)] += 1.0;
    }
    double total = 0.0;
    for (size_t k = 0; k < counts.size(); ++k) {
      counts[k] = std::max(0.0, counts[k] + SampleLaplace(scale, rng));
      if (!allowed[k]) counts[k] = 0.0;
      total += counts[k];
    }
    if (total <= 0.0) {
      for (size_t k = 0; k < counts.size(); ++k) counts[k] = allowed[k];
      total = std::count(allowed.begin(), allowed.end(), true);
    }
    for (double& c : counts) c /= total;
    f.probabilities = std::move(counts);
  }
  return state;
}

int64_t DrawCell(const std::vector<double>& probabilities,
                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng);
  double acc = 0.0;
  int64_t last_positive = 0;
  for (size_t k = 0; k < probabilities.size(); ++k) {
    if (probabilities[k] > 0.0) last_positive = static_cast<int64_t>(k);
    acc += probabilities[k];
    if (x < acc) return static_cast<int64_t>(k);
  }
  return last_positive;
}

Dataset SampleMarginal(const Schema& schema, const MarginalState& state,
                       int64_t n, std::mt19937_64& rng) {
  std::vector<std::vector<double>> columns(schema.num_columns(),
                                           std::vector<double>(n));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const MarginalFactor& f : state.factors) {
    const ColumnKind& kind = schema.column(f.columns.front()).kind;
    for (int64_t i = 0; i < n; ++i) {
      const int64_t cell = DrawCell(f.probabilities, rng);
      if (kind.type == ColumnType::kCategorical) {
        std::vector<int> levels = CellLevels(schema, f.columns, cell);
        for (size_t k = 0; k < f.columns.size(); ++k) {
          columns[f.columns[k]][i] = levels[k];
        }
        continue;
      }
      const double width = (f.hi - f.lo) / f.bins;
      double v = f.lo + (static_cast<double>(cell) + unit(rng)) * width;
      if (kind.type == ColumnType::kCount) v = std::max(0.0, std::round(v));
      columns[f.columns.front()][i] = v;
    }
  }
  return *Dataset::Create(schema, std::move(columns));
}

// ---------------------------------------------------------------------------
// JSON

const char* ActivationName(Activation a) {
  switch (a) {
    case Activation::kIdentity:
      return "identity";
    case Activation::kLeakyRelu:
      return "leaky_relu";
    case Activation::kSigmoid:
      return "sigmoid";
  }
  return "identity";
}

absl::StatusOr<Activation> ParseActivation(const std::string& name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "leaky_relu") return Activation::kLeakyRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  return absl::InvalidArgumentError(absl::StrCat("unknown activation ", name));
}

const char* ColumnTypeName(ColumnType t) {
  switch (t) {
    case ColumnType::kContinuous:
      return "continuous";
    case ColumnType::kCategorical:
      return "categorical";
    case ColumnType::kCount:
      return "count";
  }
  return "continuous";
}

absl::StatusOr<ColumnType> ParseColumnType(const std::string& name) {
  if (name == "continuous") return ColumnType::kContinuous;
  if (name == "categorical") return ColumnType::kCategorical;
  if (name == "count") return ColumnType::kCount;
  return absl::InvalidArgumentError(absl::StrCat("unknown column type ", name));
}

json MlpToJson(const Mlp& net) {
  json layers = json::array();
  for (const LayerConfig& l : net.layer_configs()) {
    layers.push_back({{"units", l.units},
                      {"activation", ActivationName(l.activation)},
                      {"dropout", l.dropout}});
  }
  const Eigen::VectorXd& p = net.parameters();
  return {{"input_dim", net.input_dim()},
          {"layers", layers},
          {"parameters", std::vector<double>(p.data(), p.data() + p.size())}};
}

absl::StatusOr<Mlp> MlpFromJson(const json& j) {
  std::vector<LayerConfig> layers;
  for (const json& l : j.at("layers")) {
    absl::StatusOr<Activation> a =
        ParseActivation(l.at("activation").get<std::string>());
    if (!a.ok()) return a.status();
    layers.push_back({l.at("units").get<int>(), *a,
                      l.at("dropout").get<double>()});
  }
  std::vector<double> p = j.at("parameters").get<std::vector<double>>();
  return Mlp::FromParameters(
      j.at("input_dim").get<int>(), layers,
      Eigen::Map<Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size())));
}

json EncoderToJson(const OneHotEncoder& encoder) {
  json blocks = json::array();
  for (const EncodedBlock& b : encoder.blocks()) {
    blocks.push_back({{"column", b.column},
                      {"offset", b.offset},
                      {"width", b.width},
                      {"type", ColumnTypeName(b.type)},
                      {"mean", b.mean},
                      {"scale", b.scale}});
  }
  return blocks;
}

absl::StatusOr<OneHotEncoder> EncoderFromJson(const Schema& schema,
                                              const json& j) {
  std::vector<EncodedBlock> blocks;
  for (const json& b : j) {
    absl::StatusOr<ColumnType> t = ParseColumnType(b.at("type"));
    if (!t.ok()) return t.status();
    blocks.push_back({b.at("column").get<int>(), b.at("offset").get<int>(),
                      b.at("width").get<int>(), *t, b.at("mean").get<double>(),
                      b.at("scale").get<double>()});
  }
  return OneHotEncoder::FromBlocks(schema, std::move(blocks));
}

absl::StatusOr<SynthesizerModel> ModelFromJson(const json& j) {
  if (j.at("format_version").get<int>() != kModelFormatVersion) {
    return absl::InvalidArgumentError("unsupported model format version");
  }
  SynthesizerModel model;
  absl::StatusOr<SynthesizerKind> kind =
      ParseSynthesizerKind(j.at("kind").get<std::string>());
  if (!kind.ok()) return kind.status();
  model.kind = *kind;
  absl::StatusOr<Schema> schema =
      Schema::Parse(j.at("schema").get<std::string>());
  if (!schema.ok()) return schema.status();
  model.schema = *schema;

  const json& s = j.at("state");
  switch (model.kind) {
    case SynthesizerKind::kResampler: {
      auto columns = s.at("columns").get<std::vector<std::vector<double>>>();
      absl::StatusOr<Dataset> table =
          Dataset::Create(model.schema, std::move(columns));
      if (!table.ok()) return table.status();
      model.state = ResamplerState{std::move(*table)};
      break;
    }
    case SynthesizerKind::kDpMarginal: {
      MarginalState state;
      for (const json& f : s.at("factors")) {
        state.factors.push_back({f.at("columns").get<std::vector<int>>(),
                                 f.at("lo").get<double>(),
                                 f.at("hi").get<double>(),
                                 f.at("bins").get<int>(),
                                 f.at("probabilities").get<std::vector<double>>()});
      }
      model.state = std::move(state);
      break;
    }
    case SynthesizerKind::kDpGan: {
      absl::StatusOr<Mlp> generator = MlpFromJson(s.at("generator"));
      if (!generator.ok()) return generator.status();
      absl::StatusOr<OneHotEncoder> encoder =
          EncoderFromJson(model.schema, s.at("encoder"));
      if (!encoder.ok()) return encoder.status();
      model.state = GanState{std::move(*generator), std::move(*encoder),
                             s.at("latent_dim").get<int>(),
                             s.at("temperature").get<double>()};
      break;
    }
  }
  if (j.contains("realized")) {
    model.realized = PrivacyBudget{j["realized"].at("epsilon").get<double>(),
                                   j["realized"].at("delta").get<double>()};
  }
  if (j.contains("accountant")) {
    const json& a = j["accountant"];
    absl::StatusOr<AccountantState> acc = AccountantState::Create(
        a.at("sampling_rate").get<double>(),
        a.at("noise_multiplier").get<double>(),
        a.at("orders").get<std::vector<double>>());
    if (!acc.ok()) return acc.status();
    model.accountant = Compose(*acc, a.at("steps").get<int64_t>());
  }
  const json& m = j.at("metadata");
  model.metadata = {m.at("steps").get<int64_t>(),
                    m.at("noise_multiplier").get<double>(),
                    m.at("clip_norm").get<double>(),
                    m.at("sampling_rate").get<double>(),
                    m.at("rdp_order").get<double>()};
  return model;
}

}  // namespace

absl::StatusOr<SynthesizerKind> ParseSynthesizerKind(std::string_view name) {
  if (name == "resampler") return SynthesizerKind::kResampler;
  if (name == "dp_marginal") return SynthesizerKind::kDpMarginal;
  if (name == "dp_gan") return SynthesizerKind::kDpGan;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown synthesizer '", std::string(name),
                   "' (expected resampler, dp_marginal or dp_gan)"));
}

std::string_view SynthesizerKindName(SynthesizerKind kind) {
  switch (kind) {
    case SynthesizerKind::kResampler:
      return "resampler";
    case SynthesizerKind::kDpMarginal:
      return "dp_marginal";
    case SynthesizerKind::kDpGan:
      return "dp_gan";
  }
  return "resampler";
}

absl::Status SynthesizerSpec::Check() const {
  if (IsDp(kind)) {
    if (!(budget.epsilon > 0.0) || !std::isfinite(budget.epsilon)) {
      return absl::InvalidArgumentError(
          absl::StrCat("epsilon must be positive, got ", budget.epsilon));
    }
    if (!(budget.delta > 0.0 && budget.delta < 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("delta must lie in (0, 1), got ", budget.delta));
    }
  }
  if (kind == SynthesizerKind::kDpMarginal && marginal.bins < 1) {
    return absl::InvalidArgumentError("marginal bins must be >= 1");
  }
  return absl::OkStatus();
}

absl::StatusOr<SynthesizerModel> Fit(const SynthesizerSpec& spec,
                                     const Dataset& train) {
  if (absl::Status s = spec.Check(); !s.ok()) return s;
  if (train.num_rows() == 0) {
    return absl::InvalidArgumentError("empty training data");
  }
  if (std::vector<Violation> v = Validate(train); !v.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("training data is invalid: ",
                     ViolationToString(v.front(), train.schema())));
  }
  SynthesizerModel model;
  model.kind = spec.kind;
  model.schema = train.schema();
  std::mt19937_64 rng(spec.seed);
  switch (spec.kind) {
    case SynthesizerKind::kResampler:
      model.state = ResamplerState{train};
      break;
    case SynthesizerKind::kDpMarginal: {
      absl::StatusOr<MarginalState> state =
          FitMarginal(spec.marginal, spec.budget, train, rng);
      if (!state.ok()) return state.status();
      model.state = std::move(*state);
      // Pure epsilon-DP; delta is not spent.
      model.realized = PrivacyBudget{spec.budget.epsilon, 0.0};
      break;
    }
    case SynthesizerKind::kDpGan: {
      absl::StatusOr<gan::FitResult> fit =
          gan::Train(spec.gan, spec.budget, train, spec.seed);
      if (!fit.ok()) return fit.status();
      absl::StatusOr<EpsilonResult> eps =
          ToEpsilon(fit->accountant, spec.budget.delta);
      if (!eps.ok()) return eps.status();
      model.state = GanState{std::move(fit->generator), std::move(fit->encoder),
                             spec.gan.latent_dim, spec.gan.temperature};
      model.realized = PrivacyBudget{eps->epsilon, spec.budget.delta};
      model.metadata = {fit->accountant.steps(), fit->noise_multiplier,
                        spec.gan.clip_norm, fit->accountant.sampling_rate(),
                        eps->order};
      model.accountant = std::move(fit->accountant);
      break;
    }
  }
  return model;
}

absl::StatusOr<Dataset> SampleRaw(const SynthesizerModel& model, int64_t n,
                                  uint64_t seed) {
  if (n < 0) return absl::InvalidArgumentError("sample size must be >= 0");
  if (n == 0) return Dataset::Empty(model.schema);
  std::mt19937_64 rng(seed);
  switch (model.kind) {
    case SynthesizerKind::kResampler: {
      const Dataset& table = std::get<ResamplerState>(model.state).table;
      std::uniform_int_distribution<int64_t> pick(0, table.num_rows() - 1);
      std::vector<int64_t> rows(n);
      for (int64_t& r : rows) r = pick(rng);
      return table.SelectRows(rows);
    }
    case SynthesizerKind::kDpMarginal:
      return SampleMarginal(model.schema,
                            std::get<MarginalState>(model.state), n, rng);
    case SynthesizerKind::kDpGan: {
      const GanState& g = std::get<GanState>(model.state);
      Eigen::MatrixXd encoded =
          gan::Generate(g.generator, g.encoder, g.latent_dim, g.temperature, n,
                        Mode::kEvaluation, rng);
      return g.encoder.Decode(encoded);
    }
  }
  return absl::InternalError("unknown synthesizer kind");
}

absl::StatusOr<Dataset> Sample(const SynthesizerModel& model, int64_t n,
                               uint64_t seed) {
  absl::StatusOr<Dataset> raw = SampleRaw(model, n, seed);
  if (!raw.ok()) return raw.status();
  return EnforceStructuralZeros(*raw);
}

Dataset EnforceStructuralZeros(const Dataset& data) {
  const Schema& schema = data.schema();
  Dataset out = data;
  for (const StructuralZeroRule& r : schema.zero_rules()) {
    std::span<const double> guard = out.column(r.guard_column);
    std::span<const double> forced = out.column(r.forced_column);
    bool changed = false;
    std::vector<double> values(forced.begin(), forced.end());
    for (int64_t i = 0; i < out.num_rows(); ++i) {
      if (guard[i] == r.guard_level && values[i] != r.forced_level) {
        values[i] = r.forced_level;
        changed = true;
      }
    }
    if (changed) out = out.WithColumn(r.forced_column, std::move(values));
  }
  return out;
}

std::string SerializeModel(const SynthesizerModel& model) {
  json j;
  j["format_version"] = kModelFormatVersion;
  j["kind"] = std::string(SynthesizerKindName(model.kind));
  j["schema"] = model.schema.Serialize();
  json state;
  switch (model.kind) {
    case SynthesizerKind::kResampler: {
      const Dataset& t = std::get<ResamplerState>(model.state).table;
      json columns = json::array();
      for (int c = 0; c < t.num_columns(); ++c) {
        std::span<const double> v = t.column(c);
        columns.push_back(std::vector<double>(v.begin(), v.end()));
      }
      state["columns"] = columns;
      break;
    }
    case SynthesizerKind::kDpMarginal: {
      json factors = json::array();
      for (const MarginalFactor& f :
           std::get<MarginalState>(model.state).factors) {
        factors.push_back({{"columns", f.columns},
                           {"lo", f.lo},
                           {"hi", f.hi},
                           {"bins", f.bins},
                           {"probabilities", f.probabilities}});
      }
      state["factors"] = factors;
      break;
    }
    case SynthesizerKind::kDpGan: {
      const GanState& g = std::get<GanState>(model.state);
      state["generator"] = MlpToJson(g.generator);
      state["encoder"] = EncoderToJson(g.encoder);
      state["latent_dim"] = g.latent_dim;
      state["temperature"] = g.temperature;
      break;
    }
  }
  j["state"] = state;
  if (model.realized) {
    j["realized"] = {{"epsilon", model.realized->epsilon},
                     {"delta", model.realized->delta}};
  }
  if (model.accountant) {
    j["accountant"] = {{"sampling_rate", model.accountant->sampling_rate()},
                       {"noise_multiplier",
                        model.accountant->noise_multiplier()},
                       {"steps", model.accountant->steps()},
                       {"orders", model.accountant->orders()}};
  }
  j["metadata"] = {{"steps", model.metadata.steps},
                   {"noise_multiplier", model.metadata.noise_multiplier},
                   {"clip_norm", model.metadata.clip_norm},
                   {"sampling_rate", model.metadata.sampling_rate},
                   {"rdp_order", model.metadata.rdp_order}};
  return j.dump();
}

absl::StatusOr<SynthesizerModel> ParseModel(std::string_view text) {
  try {
    return ModelFromJson(json::parse(text));
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed model file: ", e.what()));
  }
}

absl::Status SaveModel(const SynthesizerModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  out << SerializeModel(model) << "\n";
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<SynthesizerModel> LoadModel(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseModel(buffer.str());
}

}  // namespace synthbench
