// Copyright 2026 The dmlab Authors
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

#include "dmlab/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace dmlab {

namespace {

// Tracks which keys of an object were read so leftovers can be rejected.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) throw ConfigError(context_ + ": expected a JSON object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const Json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(context_ + ": missing key \"" + key + "\"");
    return j_.at(key);
  }

  void mark(const std::string& key) { seen_.insert(key); }

  template <typename T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    return convert<T>(j_.at(key), key);
  }

  template <typename T>
  std::optional<T> optional(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return std::nullopt;
    return convert<T>(j_.at(key), key);
  }

  template <typename T>
  T required(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) throw ConfigError(context_ + ": missing key \"" + key + "\"");
    return convert<T>(j_.at(key), key);
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(context_ + ": unknown key \"" + item.key() + "\"");
    }
  }

  const std::string& context() const { return context_; }

 private:
  template <typename T>
  T convert(const Json& v, const std::string& key) const {
    const std::string where = context_ + "." + key;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where + ": expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where + ": expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(where + ": expected a number");
      return v.get<T>();
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
        throw ConfigError(where + ": expected a nonnegative integer");
      }
      return v.get<T>();
    } else {
      if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
      const long long x = v.get<long long>();
      if (x < std::numeric_limits<T>::min() || x > std::numeric_limits<T>::max()) {
        throw ConfigError(where + ": integer out of range");
      }
      return static_cast<T>(x);
    }
  }

  const Json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

Json optional_json(const auto& value) {
  if (value) return Json(*value);
  return Json(nullptr);
}

std::string_view to_string(GammaMode mode) { return mode == GammaMode::kIdentity ? "identity" : "random"; }

std::string_view to_string(DStorage storage) {
  switch (storage) {
    case DStorage::kMaterialized: return "materialized";
    case DStorage::kRegenerated: return "regenerated";
    default: return "auto";
  }
}

}  // namespace

DistributionSpec distribution_from_json(const Json& j) {
  ObjectReader in(j, "distribution");
  DistributionSpec spec;
  try {
    spec.kind = parse_distribution_kind(in.required<std::string>("kind"));
    spec.tail_family = parse_tail_family(in.get<std::string>("tail_family", "symmetrized-pareto"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("distribution: ") + e.what());
  }
  spec.tail_index = in.get<double>("tail_index", 7.5);
  spec.dim = in.get<int>("dim", 1);
  in.finish();
  spec.validate();
  return spec;
}

Json to_json(const DistributionSpec& spec) {
  return Json{{"kind", std::string(to_string(spec.kind))},
              {"tail_family", std::string(to_string(spec.tail_family))},
              {"tail_index", spec.tail_index},
              {"dim", spec.dim}};
}

SpaceSpec space_from_json(const Json& j, const std::string& base_dir) {
  ObjectReader in(j, "space");
  SpaceSpec spec;
  const std::string family = in.required<std::string>("family");
  if (family == "lp") {
    spec.family = NormFamily::kLp;
    const Json& p = in.raw("p");
    if (p.is_string()) {
      const std::string text = p.get<std::string>();
      if (text != "inf") throw ConfigError("space.p: expected a number or \"inf\"");
      spec.p = std::numeric_limits<double>::infinity();
    } else if (p.is_number()) {
      spec.p = p.get<double>();
    } else {
      throw ConfigError("space.p: expected a number or \"inf\"");
    }
    if (!(spec.p >= 1.0)) throw ConfigError("space.p must be >= 1");
    spec.n = in.required<int>("n");
    if (spec.n < 1) throw ConfigError("space.n must be >= 1");
  } else if (family == "max-dot") {
    spec.family = NormFamily::kMaxDot;
    std::filesystem::path rows = in.required<std::string>("rows");
    if (rows.is_relative() && !base_dir.empty()) rows = std::filesystem::path(base_dir) / rows;
    spec.rows_path = rows.lexically_normal().string();
  } else {
    throw ConfigError("space.family: expected \"lp\" or \"max-dot\", got \"" + family + "\"");
  }
  in.finish();
  return spec;
}

Json to_json(const SpaceSpec& spec) {
  if (spec.family == NormFamily::kMaxDot) return Json{{"family", "max-dot"}, {"rows", spec.rows_path}};
  Json p = std::isinf(spec.p) ? Json("inf") : Json(spec.p);
  return Json{{"family", "lp"}, {"p", p}, {"n", spec.n}};
}

CertifyConfig config_from_json(const Json& j, const std::string& base_dir) {
  ObjectReader in(j, "config");
  CertifyConfig c;
  c.space = space_from_json(in.raw("space"), base_dir);
  c.d = in.required<int>("d");
  c.m = in.required<int>("m");
  c.epsilon = in.get<double>("epsilon", c.epsilon);
  c.xspec = in.has("xspec") ? distribution_from_json(in.raw("xspec")) : DistributionSpec::rotinv(c.d);
  in.mark("xspec");
  c.zspec = in.has("zspec") ? distribution_from_json(in.raw("zspec")) : DistributionSpec::rademacher(1);
  in.mark("zspec");

  const std::string gamma = in.get<std::string>("gamma", "random");
  if (gamma == "random") {
    c.gamma = GammaMode::kRandom;
  } else if (gamma == "identity") {
    c.gamma = GammaMode::kIdentity;
  } else {
    throw ConfigError("config.gamma: expected \"random\" or \"identity\"");
  }

  c.s = in.optional<int>("s");
  c.r = in.optional<long>("r");
  c.c1 = in.get<double>("c1", c.c1);
  c.c2 = in.get<double>("c2", c.c2);
  c.lambda_samples = in.get<long>("lambda_samples", c.lambda_samples);
  c.spread_draws = in.get<long>("spread_draws", c.spread_draws);
  c.probe_count = in.get<int>("probe_count", c.probe_count);
  c.net_max_points = in.get<int>("net_max_points", c.net_max_points);
  c.gauss_samples = in.get<long>("gauss_samples", c.gauss_samples);
  c.profile_samples = in.optional<long>("profile_samples");
  c.phi_scale = in.get<double>("phi_scale", c.phi_scale);
  c.anchor = in.get<int>("anchor", c.anchor);
  c.h_ascent = in.get<bool>("h_ascent", c.h_ascent);
  c.trials = in.get<int>("trials", c.trials);
  c.seed = in.get<std::uint64_t>("seed", c.seed);

  if (in.has("small_ball")) {
    ObjectReader sb(in.raw("small_ball"), "small_ball");
    c.sb_eta = sb.get<double>("eta", c.sb_eta);
    c.sb_delta = sb.get<double>("delta", c.sb_delta);
    sb.finish();
  }
  in.mark("small_ball");

  if (in.has("baseline")) {
    ObjectReader b(in.raw("baseline"), "baseline");
    c.baseline = b.get<bool>("enabled", true);
    c.baseline_m = b.get<int>("m", c.baseline_m);
    b.finish();
  }
  in.mark("baseline");

  const std::string storage = in.get<std::string>("d_storage", "auto");
  if (storage == "auto") {
    c.storage = DStorage::kAuto;
  } else if (storage == "materialized") {
    c.storage = DStorage::kMaterialized;
  } else if (storage == "regenerated") {
    c.storage = DStorage::kRegenerated;
  } else {
    throw ConfigError("config.d_storage: expected \"auto\", \"materialized\" or \"regenerated\"");
  }

  if (in.has("thresholds")) {
    ObjectReader t(in.raw("thresholds"), "thresholds");
    Thresholds& th = c.thresholds;
    th.osc_max = t.get<double>("osc_max", th.osc_max);
    th.cond3_max = t.get<double>("cond3_max", th.cond3_max);
    th.lambda_ratio_min = t.get<double>("lambda_ratio_min", th.lambda_ratio_min);
    th.lambda_ratio_max = t.get<double>("lambda_ratio_max", th.lambda_ratio_max);
    th.rho_max = t.get<double>("rho_max", th.rho_max);
    th.beta = t.get<double>("beta", th.beta);
    th.rearr_max = t.optional<double>("rearr_max");
    th.theta = t.optional<double>("theta");
    t.finish();
  }
  in.mark("thresholds");
  in.finish();
  c.validate();
  return c;
}

Json to_json(const CertifyConfig& c) {
  const Thresholds& t = c.thresholds;
  return Json{
      {"space", to_json(c.space)},
      {"d", c.d},
      {"m", c.m},
      {"epsilon", c.epsilon},
      {"xspec", to_json(c.xspec)},
      {"zspec", to_json(c.zspec)},
      {"gamma", std::string(to_string(c.gamma))},
      {"s", optional_json(c.s)},
      {"r", optional_json(c.r)},
      {"c1", c.c1},
      {"c2", c.c2},
      {"lambda_samples", c.lambda_samples},
      {"spread_draws", c.spread_draws},
      {"probe_count", c.probe_count},
      {"net_max_points", c.net_max_points},
      {"gauss_samples", c.gauss_samples},
      {"profile_samples", optional_json(c.profile_samples)},
      {"phi_scale", c.phi_scale},
      {"small_ball", Json{{"eta", c.sb_eta}, {"delta", c.sb_delta}}},
      {"anchor", c.anchor},
      {"h_ascent", c.h_ascent},
      {"baseline", Json{{"enabled", c.baseline}, {"m", c.baseline_m}}},
      {"d_storage", std::string(to_string(c.storage))},
      {"thresholds", Json{{"osc_max", t.osc_max},
                          {"cond3_max", t.cond3_max},
                          {"lambda_ratio_min", t.lambda_ratio_min},
                          {"lambda_ratio_max", t.lambda_ratio_max},
                          {"rho_max", t.rho_max},
                          {"beta", t.beta},
                          {"rearr_max", optional_json(t.rearr_max)},
                          {"theta", optional_json(t.theta)}}},
      {"trials", c.trials},
      {"seed", c.seed},
  };
}

CertifyConfig load_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot read config file " + path);
  Json j;
  try {
    j = Json::parse(file);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  const std::string base_dir = std::filesystem::path(path).parent_path().string();
  return config_from_json(j, base_dir);
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const CertifyConfig& config) { return fnv1a_hex(to_json(config).dump()); }

}  // namespace dmlab
