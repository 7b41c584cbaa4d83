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
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pulsegate/errors.hpp"
#include "pulsegate/io.hpp"

namespace pulsegate {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config field access with JSON-pointer diagnostics.

class Fields {
 public:
  explicit Fields(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& ptr, const std::string& what) const {
    throw ValidationError(source_ + ": " + (ptr.empty() ? "/" : ptr) + ": " + what);
  }

  const json& require(const json& obj, const std::string& key, const std::string& ptr) const {
    if (!obj.is_object()) fail(ptr, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(ptr + "/" + key, "missing required field");
    return *it;
  }

  const json* optional(const json& obj, const std::string& key, const std::string& ptr) const {
    if (!obj.is_object()) fail(ptr, "expected an object");
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }

  double number(const json& v, const std::string& ptr) const {
    if (!v.is_number()) fail(ptr, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(ptr, "expected a finite number");
    return d;
  }

  double number(const json& obj, const std::string& key, const std::string& ptr) const {
    return number(require(obj, key, ptr), ptr + "/" + key);
  }

  double number_or(const json& obj, const std::string& key, const std::string& ptr,
                   double fallback) const {
    const json* v = optional(obj, key, ptr);
    return v ? number(*v, ptr + "/" + key) : fallback;
  }

  double positive(const json& obj, const std::string& key, const std::string& ptr) const {
    const double d = number(obj, key, ptr);
    if (!(d > 0.0)) fail(ptr + "/" + key, "must be > 0");
    return d;
  }

  int integer(const json& v, const std::string& ptr) const {
    if (!v.is_number_integer()) fail(ptr, "expected an integer");
    return v.get<int>();
  }

  int integer_or(const json& obj, const std::string& key, const std::string& ptr, int fallback) const {
    const json* v = optional(obj, key, ptr);
    return v ? integer(*v, ptr + "/" + key) : fallback;
  }

  std::string string(const json& v, const std::string& ptr) const {
    if (!v.is_string()) fail(ptr, "expected a string");
    return v.get<std::string>();
  }

  std::string string(const json& obj, const std::string& key, const std::string& ptr) const {
    return string(require(obj, key, ptr), ptr + "/" + key);
  }

  const json& array(const json& obj, const std::string& key, const std::string& ptr) const {
    const json& v = require(obj, key, ptr);
    if (!v.is_array()) fail(ptr + "/" + key, "expected an array");
    return v;
  }

  std::vector<double> numbers(const json& v, const std::string& ptr) const {
    if (!v.is_array()) fail(ptr, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], ptr + "/" + std::to_string(i)));
    return out;
  }

  // Runs `fn`, re-labelling any ValidationError it throws with `ptr`.
  template <typename Fn>
  auto at(const std::string& ptr, Fn&& fn) const {
    try {
      return fn();
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      if (msg.rfind(source_ + ":", 0) == 0) throw;
      fail(ptr, msg);
    }
  }

 private:
  std::string source_;
};

json parse_json(std::string_view text, const std::string& source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError(source + ": malformed JSON (" + e.what() + ")");
  }
}

SpinSystem parse_system(const Fields& f, const json& root) {
  const std::string base = "/system";
  const json& sys = f.require(root, "system", "");

  std::vector<Spin> spins;
  const json& js = f.array(sys, "spins", base);
  for (std::size_t i = 0; i < js.size(); ++i) {
    const std::string p = base + "/spins/" + std::to_string(i);
    Spin s;
    s.name = f.string(js[i], "name", p);
    s.channel = f.string(js[i], "channel", p);
    s.offset_hz = f.number(js[i], "offset_hz", p);
    s.weight = f.number_or(js[i], "weight", p, 1.0);
    if (const json* t1 = f.optional(js[i], "t1_s", p)) {
      s.t1_s = f.number(*t1, p + "/t1_s");
      if (!(*s.t1_s > 0.0)) f.fail(p + "/t1_s", "must be > 0");
    }
    if (const json* t2 = f.optional(js[i], "t2star_s", p)) {
      s.t2star_s = f.number(*t2, p + "/t2star_s");
      if (!(*s.t2star_s > 0.0)) f.fail(p + "/t2star_s", "must be > 0");
    }
    spins.push_back(std::move(s));
  }

  std::vector<Coupling> couplings;
  if (const json* jc = f.optional(sys, "couplings", base)) {
    if (!jc->is_array()) f.fail(base + "/couplings", "expected an array");
    for (std::size_t i = 0; i < jc->size(); ++i) {
      const std::string p = base + "/couplings/" + std::to_string(i);
      couplings.push_back({f.string((*jc)[i], "a", p), f.string((*jc)[i], "b", p),
                           f.number((*jc)[i], "j_hz", p)});
    }
  }

  std::vector<Channel> channels;
  const json& jch = f.array(sys, "channels", base);
  for (std::size_t i = 0; i < jch.size(); ++i) {
    const std::string p = base + "/channels/" + std::to_string(i);
    channels.push_back({f.string(jch[i], "name", p), f.positive(jch[i], "max_rf_hz", p)});
  }

  return f.at(base, [&] { return SpinSystem(spins, couplings, channels); });
}

// "thermal", an operator expression, or {"gate": "comp"|"pe", "of": <state>, ...}.
OperatorMatrix parse_state(const Fields& f, const json& v, const std::string& ptr,
                           const SpinSystem& system) {
  if (v.is_string()) {
    const std::string text = v.get<std::string>();
    if (text == "thermal") return thermal_deviation_state(system);
    return f.at(ptr, [&] { return parse_operator_expression(text, system).as(Role::state); });
  }
  if (!v.is_object()) f.fail(ptr, "expected an operator expression or a gate object");
  const std::string gate = f.string(v, "gate", ptr);
  const OperatorMatrix of = parse_state(f, f.require(v, "of", ptr), ptr + "/of", system);
  if (gate == "comp")
    return f.at(ptr, [&] { return conjugate(ideal_comp_unitary(system.size()), of); });
  if (gate == "pe") {
    const json& pair = f.array(v, "pair", ptr);
    if (pair.size() != 2) f.fail(ptr + "/pair", "expected two spin names");
    PeVariant variant = PeVariant::phase_variant;
    if (const json* jv = f.optional(v, "variant", ptr)) {
      const std::string name = f.string(*jv, ptr + "/variant");
      if (name == "plain_swap") variant = PeVariant::plain_swap;
      else if (name != "phase_variant") f.fail(ptr + "/variant", "expected plain_swap or phase_variant");
    }
    return f.at(ptr + "/pair", [&] {
      const int a = system.index_of(f.string(pair[0], ptr + "/pair/0"));
      const int b = system.index_of(f.string(pair[1], ptr + "/pair/1"));
      return conjugate(ideal_pe_unitary(variant, a, b, system.size()), of);
    });
  }
  f.fail(ptr + "/gate", "unknown gate '" + gate + "'");
}

AscentOptions parse_ascent(const Fields& f, const json* v, const std::string& ptr, AscentOptions o) {
  if (!v) return o;
  if (!v->is_object()) f.fail(ptr, "expected an object");
  o.max_iters = f.integer_or(*v, "max_iters", ptr, o.max_iters);
  o.target_fidelity = f.number_or(*v, "target_fidelity", ptr, o.target_fidelity);
  o.initial_step = f.number_or(*v, "initial_step", ptr, o.initial_step);
  o.backtrack_factor = f.number_or(*v, "backtrack_factor", ptr, o.backtrack_factor);
  o.growth_factor = f.number_or(*v, "growth_factor", ptr, o.growth_factor);
  o.min_step = f.number_or(*v, "min_step", ptr, o.min_step);
  if (o.max_iters < 0) f.fail(ptr + "/max_iters", "must be >= 0");
  if (!(o.initial_step > 0.0)) f.fail(ptr + "/initial_step", "must be > 0");
  if (!(o.min_step > 0.0)) f.fail(ptr + "/min_step", "must be > 0");
  if (!(o.backtrack_factor > 0.0 && o.backtrack_factor < 1.0))
    f.fail(ptr + "/backtrack_factor", "must be in (0,1)");
  if (!(o.growth_factor >= 1.0)) f.fail(ptr + "/growth_factor", "must be >= 1");
  return o;
}

std::vector<EnsembleMember> parse_ensemble(const Fields& f, const json* v, const std::string& ptr,
                                           int n_channels) {
  if (!v) return nominal_ensemble(n_channels);
  if (!v->is_object()) f.fail(ptr, "expected an object");
  if (const json* scales = f.optional(*v, "rf_scales", ptr)) {
    const auto s = f.numbers(*scales, ptr + "/rf_scales");
    if (s.empty()) f.fail(ptr + "/rf_scales", "needs at least one scale");
    for (std::size_t i = 0; i < s.size(); ++i)
      if (!(s[i] > 0.0)) f.fail(ptr + "/rf_scales/" + std::to_string(i), "must be > 0");
    return rf_scale_ensemble(n_channels, s);
  }
  const json& members = f.array(*v, "members", ptr);
  std::vector<EnsembleMember> out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const std::string p = ptr + "/members/" + std::to_string(i);
    EnsembleMember m;
    if (const json* s = f.optional(members[i], "rf_scale", p)) m.rf_scale = f.numbers(*s, p + "/rf_scale");
    if (const json* s = f.optional(members[i], "carrier_shift_hz", p))
      m.carrier_shift_hz = f.numbers(*s, p + "/carrier_shift_hz");
    m.weight = f.positive(members[i], "weight", p);
    if (!m.rf_scale.empty() && m.rf_scale.size() != static_cast<std::size_t>(n_channels))
      f.fail(p + "/rf_scale", "needs one entry per channel");
    if (!m.carrier_shift_hz.empty() && m.carrier_shift_hz.size() != static_cast<std::size_t>(n_channels))
      f.fail(p + "/carrier_shift_hz", "needs one entry per channel");
    out.push_back(std::move(m));
  }
  if (out.empty()) f.fail(ptr + "/members", "needs at least one member");
  return out;
}

AcquisitionConfig parse_acquisition(const Fields& f, const json* v, const std::string& ptr,
                                    const SpinSystem& system) {
  AcquisitionConfig a;
  a.channel = system.channels().front().name;
  if (!v) return a;
  if (!v->is_object()) f.fail(ptr, "expected an object");
  a.dwell_s = f.number_or(*v, "dwell_us", ptr, a.dwell_s * 1e6) * 1e-6;
  if (!(a.dwell_s > 0.0)) f.fail(ptr + "/dwell_us", "must be > 0");
  a.points = f.integer_or(*v, "points", ptr, a.points);
  if (a.points < 2) f.fail(ptr + "/points", "must be >= 2");
  a.zero_fill = f.integer_or(*v, "zero_fill", ptr, a.zero_fill);
  if (a.zero_fill < 1) f.fail(ptr + "/zero_fill", "must be >= 1");
  a.readout_phase_deg = f.number_or(*v, "readout_phase_deg", ptr, a.readout_phase_deg);
  a.window_margin_linewidths =
      f.number_or(*v, "window_margin_linewidths", ptr, a.window_margin_linewidths);
  if (const json* ch = f.optional(*v, "channel", ptr)) {
    a.channel = f.string(*ch, ptr + "/channel");
    f.at(ptr + "/channel", [&] { return system.channel_index(a.channel); });
  }
  if (const json* ws = f.optional(*v, "windows", ptr)) {
    if (!ws->is_array()) f.fail(ptr + "/windows", "expected an array");
    for (std::size_t i = 0; i < ws->size(); ++i) {
      const std::string p = ptr + "/windows/" + std::to_string(i);
      LineWindow w{f.string((*ws)[i], "label", p), f.number((*ws)[i], "f_lo_hz", p),
                   f.number((*ws)[i], "f_hi_hz", p)};
      if (!(w.f_lo < w.f_hi)) f.fail(p, "f_lo_hz must be below f_hi_hz");
      a.windows.push_back(std::move(w));
    }
  }
  return a;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string general(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool parse_double(std::string_view s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(out);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> words(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

GrapeProblem RunConfig::problem() const {
  return GrapeProblem(system, initial, target, duration_s, steps, ensemble);
}

RunConfig parse_config(std::string_view json_text, const std::string& source) {
  const Fields f(source);
  const json root = parse_json(json_text, source);
  if (!root.is_object()) f.fail("", "expected a JSON object");

  SpinSystem system = parse_system(f, root);
  const json& prob = f.require(root, "problem", "");
  OperatorMatrix initial = parse_state(f, f.require(prob, "initial", "/problem"), "/problem/initial", system);
  OperatorMatrix target = parse_state(f, f.require(prob, "target", "/problem"), "/problem/target", system);

  double duration_s = 0.0;
  if (const json* ms = f.optional(prob, "duration_ms", "/problem"))
    duration_s = f.number(*ms, "/problem/duration_ms") * 1e-3;
  else
    duration_s = f.number(prob, "duration_s", "/problem");
  if (!(duration_s > 0.0)) f.fail("/problem/duration_ms", "must be > 0");
  const int steps = f.integer(f.require(prob, "steps", "/problem"), "/problem/steps");
  if (steps < 1 || steps > ControlPulse::kMaxSteps)
    f.fail("/problem/steps", "must be in [1, " + std::to_string(ControlPulse::kMaxSteps) + "]");

  const int nc = static_cast<int>(system.channels().size());
  std::vector<EnsembleMember> ensemble =
      parse_ensemble(f, f.optional(root, "ensemble", ""), "/ensemble", nc);

  DesignOptions options;
  double required = 0.99;
  if (const json* opt = f.optional(root, "optimizer", "")) {
    options.nominal = parse_ascent(f, f.optional(*opt, "nominal", "/optimizer"), "/optimizer/nominal",
                                   options.nominal);
    options.robust = parse_ascent(f, f.optional(*opt, "robust", "/optimizer"), "/optimizer/robust",
                                  options.robust);
    options.init_amplitude_fraction =
        f.number_or(*opt, "init_amplitude_fraction", "/optimizer", options.init_amplitude_fraction);
    if (!(options.init_amplitude_fraction > 0.0 && options.init_amplitude_fraction <= 1.0))
      f.fail("/optimizer/init_amplitude_fraction", "must be in (0,1]");
    required = f.number_or(*opt, "required_fidelity", "/optimizer", required);
    if (const json* par = f.optional(*opt, "parallel", "/optimizer")) {
      if (!par->is_boolean()) f.fail("/optimizer/parallel", "expected true or false");
      options.parallel = par->get<bool>();
    }
  }

  std::vector<std::uint64_t> seeds{1};
  if (const json* js = f.optional(root, "seeds", "")) {
    if (!js->is_array() || js->empty()) f.fail("/seeds", "expected a non-empty array of integers");
    seeds.clear();
    for (std::size_t i = 0; i < js->size(); ++i) {
      if (!(*js)[i].is_number_unsigned()) f.fail("/seeds/" + std::to_string(i), "expected a non-negative integer");
      seeds.push_back((*js)[i].get<std::uint64_t>());
    }
  }

  AcquisitionConfig acq = parse_acquisition(f, f.optional(root, "acquisition", ""), "/acquisition", system);

  RunConfig cfg{std::move(system), std::move(initial), std::move(target), duration_s, steps,
                std::move(ensemble), options, required, std::move(seeds), std::move(acq)};
  f.at("/problem", [&] { return cfg.problem(); });  // catches cross-field problems now
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path), path.string());
}

std::vector<DeviationSpec> parse_deviation_specs(std::string_view json_text, const std::string& source) {
  const Fields f(source);
  const json root = parse_json(json_text, source);
  const json& rows = root.is_object() ? f.array(root, "rows", "") : root;
  if (!rows.is_array()) f.fail("", "expected an array of deviation rows or {\"rows\": [...]}");
  const std::string base = root.is_object() ? "/rows" : "";
  std::vector<DeviationSpec> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string p = base + "/" + std::to_string(i);
    DeviationSpec s;
    const std::string kind = f.string(rows[i], "kind", p);
    s.kind = f.at(p + "/kind", [&] { return deviation_kind_from_string(kind); });
    if (const json* t = f.optional(rows[i], "target", p)) s.target = f.string(*t, p + "/target");
    s.value = f.number(rows[i], "value", p);
    // Scale kinds may be written as value/reference, e.g. 606.13 MHz over 600.55 MHz.
    if (const json* r = f.optional(rows[i], "reference", p)) {
      const double ref = f.number(*r, p + "/reference");
      if (!(ref > 0.0)) f.fail(p + "/reference", "must be > 0");
      if (s.kind != DeviationKind::b0_scale && s.kind != DeviationKind::duration_scale)
        f.fail(p + "/reference", "only scale kinds take a reference");
      s.value /= ref;
    }
    if (const json* l = f.optional(rows[i], "label", p)) s.label = f.string(*l, p + "/label");
    const bool needs_target = s.kind == DeviationKind::j_coupling ||
                              s.kind == DeviationKind::channel_offset ||
                              s.kind == DeviationKind::pair_larmor_difference;
    if (needs_target && s.target.empty()) f.fail(p + "/target", "required for " + kind);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<DeviationSpec> load_deviation_specs(const std::filesystem::path& path) {
  return parse_deviation_specs(read_text_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Pulse files

std::string format_pulse(const ControlPulse& pulse) {
  std::string out;
  out += "#format_version " + std::to_string(kPulseFormatVersion) + "\n";
  out += "#channels";
  for (const auto& c : pulse.channels()) out += " " + c;
  out += "\n#steps " + std::to_string(pulse.steps()) + "\n";
  out += "#dt_us " + general(pulse.dt() * 1e6, 9) + "\n";
  out += "#max_rf_hz";
  for (double m : pulse.max_rf()) out += " " + fixed6(m);
  out += "\n";
  for (int j = 0; j < pulse.steps(); ++j) {
    for (int c = 0; c < pulse.n_channels(); ++c) {
      const double ux = pulse.ux(j, c);
      const double uy = pulse.uy(j, c);
      const std::string amp = fixed6(std::hypot(ux, uy));
      double deg = std::atan2(uy, ux) * 180.0 / std::numbers::pi;
      if (deg < 0.0) deg += 360.0;
      if (deg == 0.0) deg = 0.0;  // no "-0.000000"
      std::string phase = fixed6(deg);
      if (phase == "360.000000" || amp == "0.000000") phase = "0.000000";
      if (c > 0) out += ",";
      out += amp + "," + phase;
    }
    out += "\n";
  }
  return out;
}

ControlPulse parse_pulse(std::string_view text, const std::string& source) {
  auto fail = [&](std::size_t line, const std::string& what) -> void {
    throw ValidationError(source + ":" + std::to_string(line) + ": " + what);
  };

  std::vector<std::string> lines = split(text, '\n');
  if (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();

  std::optional<int> version;
  std::optional<int> steps;
  std::optional<double> dt_us;
  std::vector<std::string> channels;
  std::vector<double> max_rf;
  std::set<std::string> seen;

  std::size_t i = 0;
  for (; i < lines.size() && !trim(lines[i]).empty() && trim(lines[i])[0] == '#'; ++i) {
    const std::size_t ln = i + 1;
    const auto w = words(trim(lines[i]).substr(1));
    if (w.empty()) fail(ln, "empty header line");
    const std::string& key = w[0];
    if (!seen.insert(key).second) fail(ln, "duplicate header key '" + key + "'");
    if (w.size() < 2) fail(ln, "header '" + key + "' has no value");
    if (key == "format_version") {
      if (w[1] != std::to_string(kPulseFormatVersion)) fail(ln, "unsupported format_version " + w[1]);
      version = kPulseFormatVersion;
    } else if (key == "channels") {
      channels.assign(w.begin() + 1, w.end());
    } else if (key == "steps") {
      double s = 0.0;
      if (!parse_double(w[1], s) || s != std::floor(s) || s < 1) fail(ln, "steps must be a positive integer");
      if (s > ControlPulse::kMaxSteps)
        fail(ln, "steps " + w[1] + " exceeds the limit of " + std::to_string(ControlPulse::kMaxSteps));
      steps = static_cast<int>(s);
    } else if (key == "dt_us") {
      double d = 0.0;
      if (!parse_double(w[1], d) || !(d > 0.0)) fail(ln, "dt_us must be a positive number");
      dt_us = d;
    } else if (key == "max_rf_hz") {
      for (std::size_t k = 1; k < w.size(); ++k) {
        double m = 0.0;
        if (!parse_double(w[k], m) || !(m > 0.0)) fail(ln, "max_rf_hz entries must be positive numbers");
        max_rf.push_back(m);
      }
    } else {
      fail(ln, "unknown header key '" + key + "'");
    }
  }
  const std::size_t header_end = i;
  if (!version) fail(header_end + 1, "missing #format_version header");
  if (channels.empty()) fail(header_end + 1, "missing #channels header");
  if (!steps) fail(header_end + 1, "missing #steps header");
  if (!dt_us) fail(header_end + 1, "missing #dt_us header");
  if (max_rf.empty()) fail(header_end + 1, "missing #max_rf_hz header");
  if (max_rf.size() != channels.size()) fail(header_end + 1, "#max_rf_hz needs one value per channel");

  const int nc = static_cast<int>(channels.size());
  Eigen::MatrixXd amps(*steps, 2 * nc);
  for (int j = 0; j < *steps; ++j) {
    const std::size_t idx = header_end + static_cast<std::size_t>(j);
    const std::size_t ln = idx + 1;
    if (idx >= lines.size())
      fail(ln, "missing body line for step " + std::to_string(j + 1) + " of " + std::to_string(*steps));
    const auto fields = split(trim(lines[idx]), ',');
    if (fields.size() != static_cast<std::size_t>(2 * nc))
      fail(ln, "expected " + std::to_string(2 * nc) + " comma-separated values");
    for (int c = 0; c < nc; ++c) {
      double amp = 0.0;
      double phase = 0.0;
      if (!parse_double(fields[2 * c], amp) || amp < 0.0) fail(ln, "amplitude must be a number >= 0");
      if (!parse_double(fields[2 * c + 1], phase) || phase < 0.0 || phase >= 360.0)
        fail(ln, "phase must be a number in [0,360)");
      const double rad = phase * std::numbers::pi / 180.0;
      amps(j, 2 * c) = amp * std::cos(rad);
      amps(j, 2 * c + 1) = amp * std::sin(rad);
    }
  }
  for (std::size_t k = header_end + static_cast<std::size_t>(*steps); k < lines.size(); ++k)
    if (!trim(lines[k]).empty()) fail(k + 1, "more body lines than #steps");

  return ControlPulse(*dt_us * 1e-6, std::move(channels), std::move(max_rf), std::move(amps));
}

void write_pulse(const ControlPulse& pulse, const std::filesystem::path& path) {
  write_text_file_atomic(path, format_pulse(pulse));
}

ControlPulse read_pulse(const std::filesystem::path& path) {
  return parse_pulse(read_text_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Reports

namespace {

json ascent_json(const AscentReport& r) {
  return json{{"seed", r.seed},
              {"iterations", r.iterations},
              {"rejected_trials", r.rejected_trials},
              {"termination", to_string(r.termination)},
              {"final_fidelity", r.final_fidelity()},
              {"member_fidelity", r.member_fidelity},
              {"history", r.history}};
}

}  // namespace

std::string ascent_report_json(const AscentReport& report) { return ascent_json(report).dump(2) + "\n"; }

std::string design_report_json(const DesignResult& result, double nominal_fidelity) {
  json outcomes = json::array();
  for (const auto& o : result.outcomes) {
    outcomes.push_back(json{{"seed", o.seed},
                            {"ensemble_fidelity", o.fidelity.members},
                            {"weighted_fidelity", o.fidelity.weighted},
                            {"worst_member_fidelity", o.fidelity.worst()},
                            {"nominal_phase", ascent_json(o.nominal)},
                            {"robust_phase", ascent_json(o.robust)}});
  }
  const auto& best = result.outcomes.at(result.best);
  json root{{"best_seed", best.seed},
            {"nominal_fidelity", nominal_fidelity},
            {"worst_member_fidelity", best.fidelity.worst()},
            {"outcomes", outcomes}};
  return root.dump(2) + "\n";
}

std::string sensitivity_csv(const SensitivityReport& report) {
  std::string out = "label,nominal,deviated,fidelity\n";
  for (std::size_t k = 0; k < report.rows.size(); ++k) {
    const auto& r = report.rows[k];
    out += r.label + ",";
    out += k == 0 ? "," : general(r.nominal, 10) + "," + general(r.deviated, 10);
    out += "," + fixed6(r.fidelity) + "\n";
  }
  return out;
}

std::string fid_csv(const FidRecord& fid) {
  std::string out = "t_s,real,imag\n";
  for (int k = 0; k < fid.points(); ++k)
    out += general(k * fid.dwell, 10) + "," + general(fid.samples(k).real(), 10) + "," +
           general(fid.samples(k).imag(), 10) + "\n";
  return out;
}

std::string spectrum_csv(const Spectrum& spectrum) {
  std::string out = "f_hz,real,imag\n";
  for (Eigen::Index k = 0; k < spectrum.frequencies.size(); ++k)
    out += general(spectrum.frequencies(k), 10) + "," + general(spectrum.values(k).real(), 10) + "," +
           general(spectrum.values(k).imag(), 10) + "\n";
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

void write_text_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("error writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

}  // namespace pulsegate
