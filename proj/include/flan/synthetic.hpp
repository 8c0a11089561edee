// Copyright 2026 The FLAN Graph Authors
// SPDX-License-Identifier: Apache-2.0
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

// Seeded generator of claim sets with a planted label.
//
// Claim 1 lists a few components; exactly one of them is "made of" a
// material. Materials fall into two groups and the group decides the label of
// every claim in the application. Dependent claims only add generic
// refinements, so their own text carries no label signal; a model can
// recover it only through the ancestor structure.

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "flan/core.hpp"

namespace flan {

struct SyntheticOptions {
  int applications = 300;
  std::uint64_t seed = 0;
  double positive_rate = 0.6;
  double label_noise = 0.0;  // probability of flipping a claim label
  int min_dependents = 3;
  int max_dependents = 8;
  std::string first_date = "2018-01-01";
};

namespace synth_detail {

inline const std::vector<std::string>& positive_materials() {
  static const std::vector<std::string> v = {"titanium", "ceramic", "graphene", "sapphire",
                                              "tungsten", "zirconia"};
  return v;
}
inline const std::vector<std::string>& negative_materials() {
  static const std::vector<std::string> v = {"steel", "plastic", "rubber", "aluminum", "wood",
                                              "nylon"};
  return v;
}
inline const std::vector<std::string>& devices() {
  static const std::vector<std::string> v = {"device", "apparatus", "assembly", "system", "tool"};
  return v;
}
inline const std::vector<std::string>& parts() {
  static const std::vector<std::string> v = {"housing", "frame",     "shaft",  "lever",
                                              "panel",   "bracket",   "sleeve", "cover",
                                              "spring",  "connector", "handle", "plate"};
  return v;
}
inline const std::vector<std::string>& purposes() {
  static const std::vector<std::string> v = {"cutting fabric",   "storing energy",
                                              "measuring torque", "cooling a processor",
                                              "lifting a load",   "filtering water"};
  return v;
}
inline const std::vector<std::string>& actions() {
  static const std::vector<std::string> v = {"rotate", "secure", "support", "guide", "release",
                                              "align"};
  return v;
}
inline const std::vector<std::string>& refinements() {
  static const std::vector<std::string> v = {"groove", "flange", "notch", "recess", "rib",
                                              "aperture", "slot", "ridge"};
  return v;
}
inline const std::vector<std::string>& extras() {
  static const std::vector<std::string> v = {"sensor", "latch", "gasket", "hinge", "magnet",
                                              "display"};
  return v;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  std::size_t index(std::size_t n) {
    const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }
  int between(int lo, int hi) { return lo + static_cast<int>(index(static_cast<std::size_t>(hi - lo + 1))); }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[index(v.size())]; }

 private:
  std::mt19937_64 gen_;
};

inline std::string add_days(const std::string& iso, int days) {
  using namespace std::chrono;
  const year_month_day ymd{year{std::stoi(iso.substr(0, 4))},
                           month{static_cast<unsigned>(std::stoi(iso.substr(5, 2)))},
                           day{static_cast<unsigned>(std::stoi(iso.substr(8, 2)))}};
  const year_month_day out{sys_days{ymd} + std::chrono::days{days}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(out.year()),
                static_cast<unsigned>(out.month()), static_cast<unsigned>(out.day()));
  return buf;
}

}  // namespace synth_detail

inline Application synthetic_application(synth_detail::Rng& rng, const SyntheticOptions& opt,
                                         int index) {
  using namespace synth_detail;
  const bool positive = rng.uniform() < opt.positive_rate;
  const std::string device = rng.pick(devices());
  const std::string material = positive ? rng.pick(positive_materials()) : rng.pick(negative_materials());

  // Distinct parts for the independent claim.
  std::vector<std::string> pool = parts();
  std::vector<std::string> used;
  const int n_parts = rng.between(2, 4);
  for (int i = 0; i < n_parts; ++i) {
    const std::size_t k = rng.index(pool.size());
    used.push_back(pool[k]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
  }
  const std::size_t material_slot = rng.index(used.size());

  std::string text = "A " + device + " for " + rng.pick(purposes()) + ", the " + device +
                     " comprising: ";
  for (std::size_t i = 0; i < used.size(); ++i) {
    std::string comp;
    if (i == material_slot) {
      comp = "a " + used[i] + " made of " + material;
    } else if (i == 0) {
      comp = "a " + used[i] + " configured to " + rng.pick(actions()) + " the " + device;
    } else {
      comp = "a " + used[i] + " coupled to the " + used[i - 1];
    }
    if (i + 1 == used.size()) {
      text += (used.size() > 1 ? "and " : "") + comp + ".";
    } else {
      text += comp + "; ";
    }
  }

  std::vector<Claim> claims;
  auto label_of = [&]() {
    bool y = positive;
    if (opt.label_noise > 0 && rng.uniform() < opt.label_noise) y = !y;
    return std::optional<int>(y ? 1 : 0);
  };
  claims.emplace_back(1, text, label_of());

  const int n_dep = rng.between(opt.min_dependents, opt.max_dependents);
  std::vector<std::string> added;  // parts introduced by dependent claims
  for (int c = 2; c <= n_dep + 1; ++c) {
    const int parent = (c > 2 && rng.uniform() < 0.35) ? rng.between(2, c - 1) : 1;
    const std::string head = "The " + device + " of claim " + std::to_string(parent);
    std::string body;
    const double r = rng.uniform();
    if (r < 0.45) {
      body = ", wherein the " + rng.pick(used) + " comprises a " + rng.pick(refinements()) + ".";
    } else if (r < 0.8) {
      const std::string extra = rng.pick(extras());
      added.push_back(extra);
      body = ", further comprising a " + extra + " attached to the " + rng.pick(used) + ".";
    } else if (!added.empty()) {
      body = ", wherein the " + rng.pick(added) + " is positioned adjacent to the " +
             rng.pick(used) + ".";
    } else {
      body = ", wherein the " + rng.pick(used) + " is removable.";
    }
    claims.emplace_back(c, head + body, label_of());
  }

  char id[32];
  std::snprintf(id, sizeof id, "SYN-%06d", index);
  const int offset = rng.between(0, 3 * 365);
  return Application(id, add_days(opt.first_date, offset), std::move(claims));
}

inline std::vector<Application> synthetic_corpus(const SyntheticOptions& opt) {
  synth_detail::Rng rng(opt.seed);
  std::vector<Application> apps;
  apps.reserve(static_cast<std::size_t>(opt.applications));
  for (int i = 0; i < opt.applications; ++i) apps.push_back(synthetic_application(rng, opt, i));
  return apps;
}

}  // namespace flan
