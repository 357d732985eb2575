#include "rfid/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "rfid/errors.hpp"
#include "rfid/kernels.hpp"

namespace rfid {

// ---------------------------------------------------------------------------
// Movement

std::optional<Position> MovementSchedule::position_at(double t) const {
  if (waypoints.empty() || t < waypoints.front().time || t > waypoints.back().time)
    return std::nullopt;
  auto it = std::lower_bound(waypoints.begin(), waypoints.end(), t,
                             [](const Waypoint& w, double v) { return w.time < v; });
  if (it->time == t) return it->position;
  const Waypoint& after = *it;
  const Waypoint& before = *std::prev(it);
  if (!before.position || !after.position) return std::nullopt;
  const double f = (t - before.time) / (after.time - before.time);
  return Position{before.position->x + f * (after.position->x - before.position->x),
                  before.position->y + f * (after.position->y - before.position->y)};
}

void MovementSchedule::validate(double duration) const {
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    const auto& w = waypoints[i];
    if (!(w.time >= 0.0 && w.time <= duration))
      throw ConfigError("waypoint time " + format_number(w.time) + " outside [0, duration]");
    if (i > 0 && !(waypoints[i - 1].time < w.time))
      throw ConfigError("waypoint times must be strictly increasing");
    if (w.position && (!std::isfinite(w.position->x) || !std::isfinite(w.position->y)))
      throw ConfigError("waypoint position must be finite");
  }
}

// ---------------------------------------------------------------------------
// Scenario validation

std::uint64_t ScenarioConfig::tick_count() const {
  return static_cast<std::uint64_t>(std::floor(duration / tick + 1e-9)) + 1;
}

void ScenarioConfig::validate() const {
  if (!(tick > 0.0) || !std::isfinite(tick)) throw ConfigError("tick must be > 0");
  if (!(duration >= tick) || !std::isfinite(duration)) throw ConfigError("duration must be >= tick");
  if (duration / tick > 1e8) throw ConfigError("scenario exceeds 1e8 ticks");
  if (!(bit_error_prob >= 0.0 && bit_error_prob < 1.0))
    throw ConfigError("bit_error_prob must lie in [0, 1)");
  if (!(dedup_window > 0.0) || !std::isfinite(dedup_window))
    throw ConfigError("dedup_window must be > 0");
  if (!start_date.ok()) throw ConfigError("start date is not a calendar date");
  airtime.validate();
  if (tag_width < 1 || tag_width > kMaxTagWidth) throw ConfigError("tag_width outside [1, 128]");

  std::set<std::string> ids;
  SlotMap pinned;
  for (const auto& r : readers) {
    r.validate();
    if (!ids.insert(r.reader_id).second) throw ConfigError("duplicate reader id " + r.reader_id);
    if (r.tdma_slot) pinned.emplace(r.reader_id, *r.tdma_slot);
    for (double p : r.poll_times)
      if (!(p >= 0.0 && p <= duration))
        throw ConfigError("reader " + r.reader_id + ": poll time outside [0, duration]");
  }
  assign_slots(build_overlap_graph(readers), pinned);

  Registry roster;
  for (const auto& e : employees) {
    if (e.employee.tag.width() != tag_width)
      throw ConfigError("employee tag " + e.employee.tag.to_decimal() + " is not " +
                        std::to_string(tag_width) + " bits wide");
    roster.add(e.employee);
    try {
      e.schedule.validate(duration);
    } catch (const ConfigError& err) {
      throw ConfigError("employee " + e.employee.tag.to_decimal() + ": " + err.what());
    }
  }
}

// ---------------------------------------------------------------------------
// World

namespace {

kernels::CoverageQuery coverage_query(const ReaderConfig& r) {
  kernels::CoverageQuery q;
  q.reader_x = r.position.x;
  q.reader_y = r.position.y;
  constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
  q.boresight_x = std::cos(r.boresight_deg * kDegToRad);
  q.boresight_y = std::sin(r.boresight_deg * kDegToRad);
  q.angle_gated = r.link.max_read_angle < 180.0;
  q.cos_max_angle = std::cos(r.link.max_read_angle * kDegToRad);
  const double pg = r.link.tx_power * r.link.antenna_gain;
  const double a = r.medium.attenuation_factor;
  q.field_numerator = pg * a;
  q.return_numerator = pg * a * a;
  q.tag_threshold = r.link.tag_power_threshold;
  q.detect_threshold = r.link.backscatter_detect_threshold;
  if (r.range_limit) q.max_range_sq = *r.range_limit * *r.range_limit;
  return q;
}

}  // namespace

World::World(ScenarioConfig config) : config_(std::move(config)), rng_(config_.seed) {
  config_.validate();
  std::sort(config_.readers.begin(), config_.readers.end(),
            [](const ReaderConfig& a, const ReaderConfig& b) { return a.reader_id < b.reader_id; });
  std::sort(config_.employees.begin(), config_.employees.end(),
            [](const ScenarioEmployee& a, const ScenarioEmployee& b) {
              return a.employee.tag < b.employee.tag;
            });
  graph_ = build_overlap_graph(config_.readers);
  SlotMap pinned;
  for (const auto& r : config_.readers)
    if (r.tdma_slot) pinned.emplace(r.reader_id, *r.tdma_slot);
  slots_ = assign_slots(graph_, pinned);
  slot_count_ = std::max(1u, rfid::slot_count(slots_));
  state_.resize(config_.readers.size());
}

double World::uniform() {
  // 53 high bits -> [0, 1); independent of the standard library's distributions
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

std::vector<RawRead> World::step(std::uint64_t tick_index) {
  const double t = static_cast<double>(tick_index) * config_.tick;
  const unsigned active_slot = static_cast<unsigned>(tick_index % slot_count_);
  last_active_.clear();

  xs_.clear();
  ys_.clear();
  present_.clear();
  for (std::size_t i = 0; i < config_.employees.size(); ++i) {
    if (auto pos = config_.employees[i].schedule.position_at(t)) {
      xs_.push_back(pos->x);
      ys_.push_back(pos->y);
      present_.push_back(i);
    }
  }
  mask_.assign(present_.size(), 0);

  std::vector<RawRead> reads;
  for (std::size_t r = 0; r < config_.readers.size(); ++r) {
    const ReaderConfig& reader = config_.readers[r];
    if (slots_.find(reader.reader_id)->second != active_slot) continue;
    ReaderState& st = state_[r];
    if (reader.mode == ReaderMode::polled) {
      while (st.next_poll < reader.poll_times.size() && reader.poll_times[st.next_poll] <= t) {
        st.poll_pending = true;
        ++st.next_poll;
      }
    }
    if (t < st.busy_until) {
      ++busy_skips_;
      continue;
    }
    if (reader.mode == ReaderMode::polled) {
      if (!st.poll_pending) continue;
      st.poll_pending = false;
    }

    kernels::coverage_mask(coverage_query(reader), xs_, ys_, mask_);
    std::vector<TagId> population;
    for (std::size_t k = 0; k < present_.size(); ++k)
      if (mask_[k] != 0) population.push_back(config_.employees[present_[k]].employee.tag);

    const SingulationResult round = singulate(population, config_.airtime);
    last_active_.push_back(reader.reader_id);
    max_airtime_ = std::max(max_airtime_, round.stats.modeled_airtime);
    if (round.stats.modeled_airtime > config_.tick) st.busy_until = t + round.stats.modeled_airtime;

    for (const TagId& tag : round.tags) {
      BitString cw = encode_with_check(tag);
      for (std::size_t b = 0; b < cw.size(); ++b)
        if (uniform() < config_.bit_error_prob) cw.flip(b);
      const std::optional<TagId> decoded = decode_with_check(cw, tag.width());
      reads.push_back({reader.reader_id, decoded.value_or(tag), t, decoded.has_value()});
    }
  }
  return reads;
}

std::vector<RawRead> step(World& world, std::uint64_t tick_index) { return world.step(tick_index); }

// ---------------------------------------------------------------------------
// Run

RunResult run(const ScenarioConfig& config) {
  World world(config);
  RunResult out;
  RunManifest& m = out.manifest;
  m.seed = config.seed;
  m.ticks = config.tick_count();
  m.slots = world.slots();
  m.slot_count = world.slot_count();

  std::unordered_set<TagId, TagIdHash> roster;
  for (const auto& e : config.employees) roster.insert(e.employee.tag);

  Deduplicator filter(config.dedup_window);
  const auto start_day = std::chrono::sys_days{config.start_date};
  for (std::uint64_t k = 0; k < m.ticks; ++k) {
    for (RawRead& read : world.step(k)) {
      ++m.raw_reads;
      if (!read.check_ok) {
        ++m.misreads;
      } else if (roster.count(read.tag) == 0) {
        ++m.unknown_ids;
      } else if (!filter.accept({read.reader_id, read.tag, read.sim_time})) {
        ++m.deduped;
      } else {
        const auto elapsed = static_cast<std::uint64_t>(std::floor(read.sim_time + 1e-6));
        const std::uint64_t clock = config.start_time.seconds() + elapsed;
        DataRecord rec;
        rec.tag = read.tag;
        rec.time = TimeOfDay(static_cast<unsigned>(clock % 86400));
        rec.access = Access::pass;
        rec.date = Date{start_day + std::chrono::days{static_cast<long>(clock / 86400)}};
        out.records.push_back(rec);
      }
      out.raw_reads.push_back(std::move(read));
    }
  }
  m.records = out.records.size();
  m.busy_skips = world.busy_skips();
  m.max_round_airtime = world.max_round_airtime();
  return out;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string render_manifest(const RunManifest& m) {
  std::ostringstream out;
  out << "seed " << m.seed << "\n";
  out << "ticks " << m.ticks << "\n";
  out << "slot_count " << m.slot_count << "\n";
  for (const auto& [id, slot] : m.slots) out << "slot " << id << " " << slot << "\n";
  out << "raw_reads " << m.raw_reads << "\n";
  out << "misreads " << m.misreads << "\n";
  out << "unknown_ids " << m.unknown_ids << "\n";
  out << "deduped " << m.deduped << "\n";
  out << "records " << m.records << "\n";
  out << "busy_skips " << m.busy_skips << "\n";
  out << "max_round_airtime " << format_number(m.max_round_airtime) << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Scenario text format

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (i == s.size()) break;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    out.push_back(s.substr(start, i - start));
  }
  return out;
}

class ScenarioParser {
 public:
  ScenarioConfig parse(std::string_view text) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t nl = text.find('\n', pos);
      const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
      std::string_view line = text.substr(pos, end - pos);
      ++line_;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (!line.empty()) handle(line);
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    finish_section();
    for (auto& r : cfg_.readers) {
      if (!explicit_attenuation_.count(r.reader_id))
        r.medium.attenuation_factor = medium_factor_[r.medium.kind];
    }
    return cfg_;
  }

 private:
  enum class Section { global, reader, employee };

  [[noreturn]] void fail(const std::string& field, const std::string& why) const {
    throw ParseError(field, line_, why);
  }

  double number(const std::string& key, std::string_view v) const {
    double out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
      fail(key, "expected a number, got '" + std::string(v) + "'");
    return out;
  }

  std::uint64_t integer(const std::string& key, std::string_view v) const {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size())
      fail(key, "expected a non-negative integer, got '" + std::string(v) + "'");
    return out;
  }

  void handle(std::string_view line) {
    if (line.front() == '[') {
      if (line.back() != ']') fail("section", "unterminated section header");
      finish_section();
      const auto parts = words(line.substr(1, line.size() - 2));
      if (parts.size() != 2) fail("section", "expected [reader ID] or [employee TAG]");
      if (parts[0] == "reader") {
        section_ = Section::reader;
        reader_ = ReaderConfig{};
        reader_.reader_id = std::string(parts[1]);
      } else if (parts[0] == "employee") {
        section_ = Section::employee;
        employee_ = ScenarioEmployee{};
        try {
          employee_.employee.tag = TagId::from_decimal(parts[1], cfg_.tag_width);
        } catch (const ConfigError& e) {
          fail("employee", e.what());
        }
      } else {
        fail("section", "unknown section '" + std::string(parts[0]) + "'");
      }
      keys_.clear();
      return;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      if (section_ != Section::employee) fail("line", "expected 'key = value'");
      waypoint(line);
      return;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) fail("line", "missing key before '='");
    if (!keys_.insert(key).second) fail(key, "duplicate key");
    switch (section_) {
      case Section::global: global(key, value); break;
      case Section::reader: reader(key, value); break;
      case Section::employee: employee(key, value); break;
    }
  }

  void global(const std::string& key, std::string_view v) {
    if (key == "seed") {
      cfg_.seed = integer(key, v);
    } else if (key == "tick") {
      cfg_.tick = number(key, v);
    } else if (key == "duration") {
      cfg_.duration = number(key, v);
    } else if (key == "start") {
      const auto parts = words(v);
      if (parts.size() != 3) fail(key, "expected 'D/M/YYYY HH:MM:SS AM|PM'");
      try {
        cfg_.start_date = parse_date(parts[0]);
        cfg_.start_time = parse_time_of_day(std::string(parts[1]) + " " + std::string(parts[2]));
      } catch (const ParseError& e) {
        fail(key, e.detail());
      }
    } else if (key == "bit_error_prob") {
      cfg_.bit_error_prob = number(key, v);
    } else if (key == "dedup_window") {
      cfg_.dedup_window = number(key, v);
    } else if (key == "bitrate") {
      cfg_.airtime.bitrate = number(key, v);
    } else if (key == "query_overhead_bits") {
      cfg_.airtime.query_overhead_bits = static_cast<unsigned>(integer(key, v));
    } else if (key == "tag_width") {
      if (!cfg_.employees.empty() || section_seen_)
        fail(key, "tag_width must precede every section");
      const auto w = integer(key, v);
      if (w < 1 || w > kMaxTagWidth) fail(key, "tag_width outside [1, 128]");
      cfg_.tag_width = static_cast<unsigned>(w);
    } else if (key.rfind("medium.", 0) == 0) {
      MediumKind kind{};
      try {
        kind = medium_kind_from_string(key.substr(7));
      } catch (const ConfigError& e) {
        fail(key, e.what());
      }
      medium_factor_[kind] = number(key, v);
    } else {
      fail(key, "unknown setting");
    }
  }

  void reader(const std::string& key, std::string_view v) {
    auto& r = reader_;
    if (key == "ip") {
      r.ip_address = std::string(v);
    } else if (key == "position") {
      const auto p = words(v);
      if (p.size() != 2) fail(key, "expected 'x y'");
      r.position = {number(key, p[0]), number(key, p[1])};
    } else if (key == "boresight") {
      r.boresight_deg = number(key, v);
    } else if (key == "tx_power") {
      r.link.tx_power = number(key, v);
    } else if (key == "antenna_gain") {
      r.link.antenna_gain = number(key, v);
    } else if (key == "carrier_freq") {
      r.link.carrier_freq = number(key, v);
    } else if (key == "tag_threshold") {
      r.link.tag_power_threshold = number(key, v);
    } else if (key == "detect_threshold") {
      r.link.backscatter_detect_threshold = number(key, v);
    } else if (key == "max_read_angle") {
      r.link.max_read_angle = number(key, v);
    } else if (key == "medium") {
      try {
        r.medium.kind = medium_kind_from_string(v);
      } catch (const ConfigError& e) {
        fail(key, e.what());
      }
    } else if (key == "attenuation") {
      r.medium.attenuation_factor = number(key, v);
      explicit_attenuation_.insert(r.reader_id);
    } else if (key == "mode") {
      try {
        r.mode = reader_mode_from_string(v);
      } catch (const ConfigError& e) {
        fail(key, e.what());
      }
    } else if (key == "slot") {
      r.tdma_slot = static_cast<unsigned>(integer(key, v));
    } else if (key == "range") {
      r.range_limit = number(key, v);
    } else if (key == "polls") {
      for (auto p : words(v)) r.poll_times.push_back(number(key, p));
    } else {
      fail(key, "unknown reader setting");
    }
  }

  void employee(const std::string& key, std::string_view v) {
    if (key == "name") {
      employee_.employee.name = std::string(v);
    } else if (key == "building") {
      employee_.employee.building = std::string(v);
    } else {
      fail(key, "unknown employee setting");
    }
  }

  void waypoint(std::string_view line) {
    const auto p = words(line);
    Waypoint w;
    if (p.size() == 2 && p[1] == "off") {
      w.time = number("waypoint", p[0]);
    } else if (p.size() == 3) {
      w.time = number("waypoint", p[0]);
      w.position = Position{number("waypoint", p[1]), number("waypoint", p[2])};
    } else {
      fail("waypoint", "expected 'time x y' or 'time off'");
    }
    employee_.schedule.waypoints.push_back(w);
  }

  void finish_section() {
    if (section_ == Section::reader) cfg_.readers.push_back(std::move(reader_));
    if (section_ == Section::employee) cfg_.employees.push_back(std::move(employee_));
    if (section_ != Section::global) section_seen_ = true;
    section_ = Section::global;
  }

  ScenarioConfig cfg_;
  Section section_ = Section::global;
  bool section_seen_ = false;
  std::size_t line_ = 0;
  std::set<std::string> keys_;
  ReaderConfig reader_;
  ScenarioEmployee employee_;
  std::set<std::string> explicit_attenuation_;
  std::map<MediumKind, double> medium_factor_{
      {MediumKind::free_space, 1.0},
      {MediumKind::water_adjacent, Medium::standard(MediumKind::water_adjacent).attenuation_factor},
      {MediumKind::metal_adjacent, Medium::standard(MediumKind::metal_adjacent).attenuation_factor}};
};

}  // namespace

ScenarioConfig parse_scenario(std::string_view text) {
  ScenarioConfig cfg = ScenarioParser{}.parse(text);
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string canonical_scenario(const ScenarioConfig& config) {
  ScenarioConfig c = config;
  std::sort(c.readers.begin(), c.readers.end(),
            [](const ReaderConfig& a, const ReaderConfig& b) { return a.reader_id < b.reader_id; });
  std::sort(c.employees.begin(), c.employees.end(),
            [](const ScenarioEmployee& a, const ScenarioEmployee& b) {
              return a.employee.tag < b.employee.tag;
            });
  std::ostringstream out;
  out << "seed = " << c.seed << "\n";
  out << "tick = " << format_number(c.tick) << "\n";
  out << "duration = " << format_number(c.duration) << "\n";
  out << "start = " << format_date(c.start_date) << " " << c.start_time.to_string() << "\n";
  out << "bit_error_prob = " << format_number(c.bit_error_prob) << "\n";
  out << "dedup_window = " << format_number(c.dedup_window) << "\n";
  out << "bitrate = " << format_number(c.airtime.bitrate) << "\n";
  out << "query_overhead_bits = " << c.airtime.query_overhead_bits << "\n";
  out << "tag_width = " << c.tag_width << "\n";
  for (const auto& r : c.readers) {
    out << "\n[reader " << r.reader_id << "]\n";
    out << "ip = " << r.ip_address << "\n";
    out << "position = " << format_number(r.position.x) << " " << format_number(r.position.y)
        << "\n";
    out << "boresight = " << format_number(r.boresight_deg) << "\n";
    out << "tx_power = " << format_number(r.link.tx_power) << "\n";
    out << "antenna_gain = " << format_number(r.link.antenna_gain) << "\n";
    out << "carrier_freq = " << format_number(r.link.carrier_freq) << "\n";
    out << "tag_threshold = " << format_number(r.link.tag_power_threshold) << "\n";
    out << "detect_threshold = " << format_number(r.link.backscatter_detect_threshold) << "\n";
    out << "max_read_angle = " << format_number(r.link.max_read_angle) << "\n";
    out << "medium = " << to_string(r.medium.kind) << "\n";
    out << "attenuation = " << format_number(r.medium.attenuation_factor) << "\n";
    out << "mode = " << to_string(r.mode) << "\n";
    if (r.tdma_slot) out << "slot = " << *r.tdma_slot << "\n";
    if (r.range_limit) out << "range = " << format_number(*r.range_limit) << "\n";
    if (!r.poll_times.empty()) {
      out << "polls =";
      for (double p : r.poll_times) out << " " << format_number(p);
      out << "\n";
    }
  }
  for (const auto& e : c.employees) {
    out << "\n[employee " << e.employee.tag.to_decimal() << "]\n";
    out << "name = " << e.employee.name << "\n";
    out << "building = " << e.employee.building << "\n";
    for (const auto& w : e.schedule.waypoints) {
      out << format_number(w.time);
      if (w.position)
        out << " " << format_number(w.position->x) << " " << format_number(w.position->y);
      else
        out << " off";
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace rfid
