#include "iotavatar/sim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "iotavatar/error.hpp"

namespace iotavatar::sim {
namespace {

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const auto start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::optional<double> to_number(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_offset(std::string_view s) {
  if (s.find(':') != std::string_view::npos) {
    double total = 0.0;
    int fields = 0;
    std::size_t pos = 0;
    while (true) {
      const auto colon = s.find(':', pos);
      const auto part = s.substr(pos, colon == std::string_view::npos ? std::string_view::npos : colon - pos);
      const auto v = to_number(part);
      if (!v || *v < 0.0) return std::nullopt;
      total = total * 60.0 + *v;
      ++fields;
      if (colon == std::string_view::npos) break;
      pos = colon + 1;
    }
    if (fields < 2 || fields > 3) return std::nullopt;
    return total;
  }
  double scale = 1.0;
  if (!s.empty()) {
    switch (s.back()) {
      case 's': scale = 1.0; break;
      case 'm': scale = 60.0; break;
      case 'h': scale = 3600.0; break;
      case 'd': scale = 86400.0; break;
      default: scale = 0.0;
    }
    if (scale != 0.0) {
      s.remove_suffix(1);
    } else {
      scale = 1.0;
    }
  }
  const auto v = to_number(s);
  if (!v || *v < 0.0) return std::nullopt;
  return *v * scale;
}

std::optional<bool> parse_curtain(std::string_view s) {
  if (s == "open" || s == "true" || s == "1") return true;
  if (s == "closed" || s == "close" || s == "false" || s == "0") return false;
  return std::nullopt;
}

Action parse_action(int line, const std::vector<std::string_view>& tok) {
  const auto name = tok[1];
  const auto arg = tok.size() > 2 ? tok[2] : std::string_view{};
  if (tok.size() > 3) throw ScenarioError(line, fmt::format("unexpected '{}' after {}", tok[3], name));
  auto need_int = [&](std::string_view what) {
    if (arg.empty()) throw ScenarioError(line, fmt::format("{} needs {}", name, what));
    const auto v = to_int(arg);
    if (!v) throw ScenarioError(line, fmt::format("{}: '{}' is not an integer", name, arg));
    return *v;
  };
  if (name == "set_lights") return SetLights{need_int("a lamp count")};
  if (name == "set_people") return SetPeople{need_int("a people count")};
  if (name == "set_curtain") {
    const auto open = parse_curtain(arg);
    if (!open) throw ScenarioError(line, fmt::format("set_curtain: expected open or closed, got '{}'", arg));
    return SetCurtain{*open};
  }
  if (name == "water") {
    if (arg.empty()) return Water{};
    const auto v = to_number(arg);
    if (!v) throw ScenarioError(line, fmt::format("water: '{}' is not a number", arg));
    return Water{*v};
  }
  throw ScenarioError(line, fmt::format("unknown action '{}'", name));
}

void parse_init(int line, const std::vector<std::string_view>& tok, EnvironmentState& env) {
  for (std::size_t i = 1; i < tok.size(); ++i) {
    const auto eq = tok[i].find('=');
    if (eq == std::string_view::npos) throw ScenarioError(line, fmt::format("init expects key=value, got '{}'", tok[i]));
    const auto key = tok[i].substr(0, eq);
    const auto value = tok[i].substr(eq + 1);
    if (key == "lights") {
      const auto v = to_int(value);
      if (!v || *v < 0 || *v > kMaxLamps) throw ScenarioError(line, fmt::format("init lights '{}' outside 0..2", value));
      env.lights_on = *v;
    } else if (key == "curtain") {
      const auto v = parse_curtain(value);
      if (!v) throw ScenarioError(line, fmt::format("init curtain '{}' must be open or closed", value));
      env.curtain_open = *v;
    } else if (key == "moisture") {
      const auto v = to_number(value);
      if (!v || *v < universe::kMoisture.min || *v > universe::kMoisture.max) {
        throw ScenarioError(line, fmt::format("init moisture '{}' outside 1800..3100", value));
      }
      env.moisture = *v;
    } else if (key == "people") {
      const auto v = to_int(value);
      if (!v || *v < 0 || *v > kMaxPeople) throw ScenarioError(line, fmt::format("init people '{}' outside 0..4", value));
      env.people = *v;
    } else {
      throw ScenarioError(line, fmt::format("init: unknown key '{}'", key));
    }
  }
}

}  // namespace

EnvironmentState Scenario::start_state(const Dynamics& dyn) const {
  if (preroll_s <= 0.0) return initial;
  auto env = step(initial, preroll_s, dyn);
  env.clock = initial.clock;
  return env;
}

Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  bool have_duration = false;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;

    const auto head = tok[0];
    auto single_arg = [&]() {
      if (tok.size() != 2) throw ScenarioError(lineno, fmt::format("{} takes exactly one argument", head));
      return tok[1];
    };
    if (head == "start") {
      const auto ts = parse_iso8601(single_arg());
      if (!ts) throw ScenarioError(lineno, fmt::format("start '{}' is not an ISO-8601 UTC timestamp", tok[1]));
      sc.initial.clock = *ts;
    } else if (head == "duration") {
      const auto v = parse_offset(single_arg());
      if (!v) throw ScenarioError(lineno, fmt::format("bad duration '{}'", tok[1]));
      sc.duration_s = *v;
      have_duration = true;
    } else if (head == "timescale") {
      const auto v = to_number(single_arg());
      if (!v || *v < 0.0) throw ScenarioError(lineno, fmt::format("timescale '{}' must be a number >= 0", tok[1]));
      sc.time_scale = *v;
    } else if (head == "preroll") {
      const auto v = parse_offset(single_arg());
      if (!v) throw ScenarioError(lineno, fmt::format("bad preroll '{}'", tok[1]));
      sc.preroll_s = *v;
    } else if (head == "init") {
      parse_init(lineno, tok, sc.initial);
    } else {
      const auto at = parse_offset(head);
      if (!at) throw ScenarioError(lineno, fmt::format("unknown directive or bad offset '{}'", head));
      if (tok.size() < 2) throw ScenarioError(lineno, "event needs an action");
      Action action = parse_action(lineno, tok);
      try {
        validate(action);
      } catch (const ValidationError& e) {
        throw ScenarioError(lineno, e.what());
      }
      if (!sc.events.empty() && *at < sc.events.back().at_s) {
        throw ScenarioError(lineno, fmt::format("event at {} s precedes the previous event at {} s", *at,
                                                sc.events.back().at_s));
      }
      sc.events.push_back({*at, action, lineno});
    }
  }

  const double last = sc.events.empty() ? 0.0 : sc.events.back().at_s;
  if (!have_duration) {
    sc.duration_s = last;
  } else if (sc.duration_s < last) {
    throw ScenarioError(sc.events.back().line,
                        fmt::format("event at {} s lies beyond the duration {} s", last, sc.duration_s));
  }
  return sc;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(0, fmt::format("cannot read scenario '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_scenario(text.str());
  } catch (const ScenarioError& e) {
    throw ScenarioError(e.line(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::vector<AppliedEvent> run_scenario(const Scenario& scenario, EnvironmentState env, const Dynamics& dyn,
                                       ScenarioObserver* observer, const RunOptions& options) {
  if (!(options.tick_s > 0.0)) throw InvocationError("run_scenario needs a positive tick");
  const double scale = options.time_scale >= 0.0 ? options.time_scale : scenario.time_scale;
  const bool pace = options.pace && scale > 0.0;
  const auto wall_start = std::chrono::steady_clock::now();

  std::vector<AppliedEvent> log;
  log.reserve(scenario.events.size());
  std::size_t next_event = 0;
  double now = 0.0;

  auto advance_to = [&](double t) {
    if (t > now) {
      env = step(env, t - now, dyn);
      now = t;
    }
  };

  // Tick k sits at k * tick_s exactly; accumulating would drift.
  const auto ticks = static_cast<std::size_t>(std::floor(scenario.duration_s / options.tick_s + 1e-9));
  for (std::size_t k = 0; k <= ticks + 1; ++k) {
    const bool final_tick = k == ticks + 1;
    const double t = final_tick ? scenario.duration_s : static_cast<double>(k) * options.tick_s;
    if (final_tick && t <= static_cast<double>(ticks) * options.tick_s) break;

    if (pace) {
      std::this_thread::sleep_until(wall_start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                     std::chrono::duration<double>(t / scale)));
    }
    while (next_event < scenario.events.size() && scenario.events[next_event].at_s <= t) {
      const auto& ev = scenario.events[next_event];
      advance_to(ev.at_s);
      env = sim::apply(env, ev.action);
      log.push_back({next_event, ev.at_s, ev.action, env});
      if (observer) observer->on_event(log.back());
      ++next_event;
    }
    advance_to(t);
    if (observer) observer->on_tick(t, env);
  }
  return log;
}

}  // namespace iotavatar::sim
