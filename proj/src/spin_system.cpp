/* Copyright 2026 The Pulsegate Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <cmath>
#include <set>

#include "pulsegate/errors.hpp"
#include "pulsegate/spin_core.hpp"

namespace pulsegate {

SpinSystem::SpinSystem(std::vector<Spin> spins, std::vector<Coupling> couplings,
                       std::vector<Channel> channels)
    : spins_(std::move(spins)), channels_(std::move(channels)) {
  if (spins_.empty()) throw ValidationError("spin system has no spins");
  if (spins_.size() > static_cast<std::size_t>(kMaxSpins))
    throw ValidationError("spin system has more than " + std::to_string(kMaxSpins) + " spins");

  std::set<std::string> names;
  for (const auto& s : spins_) {
    if (s.name.empty()) throw ValidationError("spin with empty name");
    if (!names.insert(s.name).second) throw ValidationError("duplicate spin name '" + s.name + "'");
  }
  std::set<std::string> channel_names;
  for (const auto& c : channels_) {
    if (!channel_names.insert(c.name).second)
      throw ValidationError("duplicate channel '" + c.name + "'");
  }

  const int n = size();
  j_ = Eigen::MatrixXd::Zero(n, n);
  for (const auto& c : couplings) {
    const int a = index_of(c.a);
    const int b = index_of(c.b);
    if (a == b) throw ValidationError("coupling of spin '" + c.a + "' with itself");
    if (!std::isfinite(c.j_hz))
      throw ValidationError("coupling " + c.a + "-" + c.b + " is not finite");
    j_(a, b) = c.j_hz;
    j_(b, a) = c.j_hz;
  }
  validate();
}

void SpinSystem::validate() const {
  if (channels_.empty()) throw ValidationError("spin system has no channels");
  for (const auto& c : channels_) {
    if (!(c.max_rf_hz > 0.0) || !std::isfinite(c.max_rf_hz))
      throw ValidationError("channel '" + c.name + "' needs max_rf_hz > 0");
  }
  for (const auto& s : spins_) {
    if (!std::isfinite(s.offset_hz)) throw ValidationError("spin '" + s.name + "': offset not finite");
    if (!std::isfinite(s.weight)) throw ValidationError("spin '" + s.name + "': weight not finite");
    if (s.t1_s && !(*s.t1_s > 0.0)) throw ValidationError("spin '" + s.name + "': t1 must be > 0");
    if (s.t2star_s && !(*s.t2star_s > 0.0))
      throw ValidationError("spin '" + s.name + "': t2star must be > 0");
    bool found = false;
    for (const auto& c : channels_) found = found || c.name == s.channel;
    if (!found)
      throw ValidationError("spin '" + s.name + "' assigned to unknown channel '" + s.channel + "'");
  }
}

int SpinSystem::index_of(std::string_view spin_name) const {
  for (std::size_t i = 0; i < spins_.size(); ++i)
    if (spins_[i].name == spin_name) return static_cast<int>(i);
  throw ValidationError("unknown spin '" + std::string(spin_name) + "'");
}

int SpinSystem::channel_index(std::string_view channel_name) const {
  for (std::size_t i = 0; i < channels_.size(); ++i)
    if (channels_[i].name == channel_name) return static_cast<int>(i);
  throw ValidationError("unknown channel '" + std::string(channel_name) + "'");
}

std::vector<int> SpinSystem::spins_on(std::string_view channel_name) const {
  channel_index(channel_name);
  std::vector<int> out;
  for (std::size_t i = 0; i < spins_.size(); ++i)
    if (spins_[i].channel == channel_name) out.push_back(static_cast<int>(i));
  return out;
}

void SpinSystem::set_offset(int spin, double offset_hz) {
  if (spin < 0 || spin >= size()) throw ValidationError("spin index out of range");
  if (!std::isfinite(offset_hz)) throw ValidationError("offset not finite");
  spins_[static_cast<std::size_t>(spin)].offset_hz = offset_hz;
}

void SpinSystem::set_coupling(int a, int b, double j_hz) {
  if (a < 0 || b < 0 || a >= size() || b >= size()) throw ValidationError("spin index out of range");
  if (a == b) throw ValidationError("coupling of a spin with itself");
  if (!std::isfinite(j_hz)) throw ValidationError("coupling not finite");
  j_(a, b) = j_hz;
  j_(b, a) = j_hz;
}

void SpinSystem::set_weight(int spin, double weight) {
  if (spin < 0 || spin >= size()) throw ValidationError("spin index out of range");
  if (!std::isfinite(weight)) throw ValidationError("weight not finite");
  spins_[static_cast<std::size_t>(spin)].weight = weight;
}

}  // namespace pulsegate
