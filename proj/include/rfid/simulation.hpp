#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rfid/identity.hpp"
#include "rfid/reader_net.hpp"
#include "rfid/records.hpp"
#include "rfid/singulation.hpp"

namespace rfid {

/// A timed point on an employee's path. No position means off site.
struct Waypoint {
  double time = 0.0;
  std::optional<Position> position;
  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

/// Piecewise-linear path. Between two on-site waypoints the position is
/// interpolated; next to an off-site waypoint, and outside the first/last
/// waypoint, the employee is absent.
struct MovementSchedule {
  std::vector<Waypoint> waypoints;

  std::optional<Position> position_at(double t) const;
  /// Strictly increasing times inside [0, duration].
  void validate(double duration) const;
  friend bool operator==(const MovementSchedule&, const MovementSchedule&) = default;
};

struct ScenarioEmployee {
  Employee employee;
  MovementSchedule schedule;
  friend bool operator==(const ScenarioEmployee&, const ScenarioEmployee&) = default;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  double tick = 0.1;
  double duration = 60.0;
  Date start_date{std::chrono::year{2012}, std::chrono::month{2}, std::chrono::day{9}};
  TimeOfDay start_time;
  std::vector<ReaderConfig> readers;
  std::vector<ScenarioEmployee> employees;
  double bit_error_prob = 0.0;
  double dedup_window = 5.0;
  AirtimeModel airtime;
  unsigned tag_width = kDefaultTagWidth;

  /// Throws ConfigError describing the first problem found.
  void validate() const;
  /// Ticks run: t = k * tick for k = 0 .. floor(duration / tick).
  std::uint64_t tick_count() const;
  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct RawRead {
  std::string reader_id;
  TagId tag;
  double sim_time = 0.0;
  bool check_ok = false;
  friend bool operator==(const RawRead&, const RawRead&) = default;
};

/// Mutable simulation state built from a validated scenario.
class World {
 public:
  explicit World(ScenarioConfig config);

  /// One TDMA slot. Readers owning slot `tick_index mod slot_count()` that
  /// are neither paying off airtime nor waiting for a poll run an inventory
  /// round over the tags they cover; every reply is exposed to bit errors
  /// and decoded.
  std::vector<RawRead> step(std::uint64_t tick_index);

  const ScenarioConfig& config() const noexcept { return config_; }
  const OverlapGraph& overlap() const noexcept { return graph_; }
  const SlotMap& slots() const noexcept { return slots_; }
  unsigned slot_count() const noexcept { return slot_count_; }
  /// Readers that ran an inventory round during the last step.
  const std::vector<std::string>& last_active() const noexcept { return last_active_; }
  std::uint64_t busy_skips() const noexcept { return busy_skips_; }
  double max_round_airtime() const noexcept { return max_airtime_; }

 private:
  struct ReaderState {
    double busy_until = -1.0;
    std::size_t next_poll = 0;
    bool poll_pending = false;
  };

  double uniform();

  ScenarioConfig config_;
  OverlapGraph graph_;
  SlotMap slots_;
  unsigned slot_count_ = 1;
  std::vector<ReaderState> state_;  // parallel to config_.readers (sorted by id)
  std::mt19937_64 rng_;
  std::vector<std::string> last_active_;
  std::uint64_t busy_skips_ = 0;
  double max_airtime_ = 0.0;
  std::vector<double> xs_, ys_;
  std::vector<std::size_t> present_;
  std::vector<std::uint8_t> mask_;
};

std::vector<RawRead> step(World& world, std::uint64_t tick_index);

struct RunManifest {
  std::uint64_t seed = 0;
  std::uint64_t ticks = 0;
  SlotMap slots;
  unsigned slot_count = 0;
  std::uint64_t raw_reads = 0;
  std::uint64_t misreads = 0;     // failed check
  std::uint64_t unknown_ids = 0;  // passed check but not on the roster
  std::uint64_t deduped = 0;      // suppressed by the dedup window
  std::uint64_t records = 0;
  std::uint64_t busy_skips = 0;
  double max_round_airtime = 0.0;
};

struct RunResult {
  std::vector<DataRecord> records;
  RunManifest manifest;
  std::vector<RawRead> raw_reads;
};

/// Validates, runs every tick, filters failed checks and unknown ids, dedups
/// and stamps wall-clock time from the scenario start.
RunResult run(const ScenarioConfig& config);

std::string render_manifest(const RunManifest& manifest);

/// Scenario text format: `key = value` settings, `[reader ID]` and
/// `[employee TAG]` sections, and waypoint rows (`time x y` or `time off`)
/// inside employee sections. Throws ParseError (with line) for syntax and
/// ConfigError for semantic problems.
ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::filesystem::path& path);
/// Every field spelled out, readers by id, employees by tag. Parses back to
/// an equal configuration.
std::string canonical_scenario(const ScenarioConfig& config);

/// Shortest text that round-trips the double.
std::string format_number(double v);

}  // namespace rfid
