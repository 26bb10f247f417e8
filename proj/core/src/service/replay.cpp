#include "iotavatar/service/replay.hpp"

#include <cmath>

#include <fmt/format.h>

#include "iotavatar/error.hpp"

namespace iotavatar::service {
namespace {

class ReplayDriver final : public sim::ScenarioObserver {
 public:
  ReplayDriver(const profile::PlantProfile& profile, const ReplayOptions& options, HistoryStore& history)
      : options_(options),
        devices_([this] { return sim::snapshot_of(env_, options_.dynamics); }),
        service_(profile, devices_, history, [] { return Timestamp{}; }) {
    if (options_.on_change) service_.on_change(options_.on_change);
    if (options_.on_start) options_.on_start(service_);
  }

  void on_event(const sim::AppliedEvent& ev) override {
    env_ = ev.after;
    poll();
    rows_.push_back(row(ev.index + 1, ev.at_s));
  }

  void on_tick(double t_s, const sim::EnvironmentState& env) override {
    env_ = env;
    poll();
    if (is_multiple(t_s, options_.row_interval_s)) rows_.push_back(row(std::nullopt, t_s));
  }

  std::vector<ReplayRow> take_rows() { return std::move(rows_); }

 private:
  static bool is_multiple(double t, double step) {
    const double k = std::round(t / step);
    return std::abs(t - k * step) < 1e-6;
  }

  void poll() {
    service_.tick(env_.clock);
    last_ = service_.latest()->state;
  }

  ReplayRow row(std::optional<std::size_t> event, double t_s) const {
    return {event, t_s, *last_.snapshot(), last_.affect, last_.emotion};
  }

  const ReplayOptions& options_;
  sim::EnvironmentState env_;
  LocalDeviceSource devices_;
  AvatarService service_;
  AvatarState last_;
  std::vector<ReplayRow> rows_;
};

std::string fmt_affect(const std::optional<double>& v) { return v ? fmt::format("{:.3f}", *v) : std::string(); }

}  // namespace

ReplayResult replay(const sim::Scenario& scenario, const profile::PlantProfile& profile, const ReplayOptions& options) {
  if (!(options.poll_interval_s > 0.0) || !(options.row_interval_s > 0.0)) {
    throw InvocationError("replay intervals must be positive");
  }
  std::optional<HistoryStore> local;
  HistoryStore* history = options.history;
  if (history == nullptr) history = &local.emplace(profile);
  const auto first_seq = history->last_seq();

  ReplayDriver driver(profile, options, *history);
  sim::RunOptions run;
  run.tick_s = options.poll_interval_s;
  run.pace = options.pace;
  run.time_scale = options.time_scale;

  ReplayResult result;
  result.applied = sim::run_scenario(scenario, scenario.start_state(options.dynamics), options.dynamics, &driver, run);
  result.rows = driver.take_rows();
  result.history = history->since(first_seq);
  return result;
}

std::string replay_csv(std::span<const ReplayRow> rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += fmt::format("{},{},{:.1f},{:.2f},{},{},{},{:.0f}\n", r.event ? std::to_string(*r.event) : std::string(),
                       r.snapshot.people, r.snapshot.brightness, r.snapshot.moisture, fmt_affect(r.affect.arousal),
                       fmt_affect(r.affect.valence), profile::code(r.emotion), r.t_s);
  }
  return out;
}

std::string history_csv(std::span<const HistoryRecord> records) {
  std::string out = "event,people,brightness,moisture,arousal,valence,state,ts\n";
  auto num = [](const auto& v, const char* pattern) {
    return v ? fmt::format(fmt::runtime(pattern), *v) : std::string();
  };
  for (const auto& rec : records) {
    const auto& s = rec.state;
    const std::optional<int> people = s.people ? std::optional<int>(s.people->count) : std::nullopt;
    const std::optional<double> brightness = s.plant ? std::optional<double>(s.plant->brightness) : std::nullopt;
    const std::optional<double> moisture = s.plant ? std::optional<double>(s.plant->moisture) : std::nullopt;
    out += fmt::format(",{},{},{},{},{},{},{}\n", num(people, "{}"), num(brightness, "{:.1f}"),
                       num(moisture, "{:.2f}"), fmt_affect(s.affect.arousal), fmt_affect(s.affect.valence),
                       profile::code(s.emotion), format_iso8601(s.ts));
  }
  return out;
}

}  // namespace iotavatar::service
