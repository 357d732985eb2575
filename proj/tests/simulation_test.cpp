#include "rfid/simulation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "rfid/errors.hpp"
#include "rfid/kernels.hpp"

namespace rfid {
namespace {

namespace fs = std::filesystem;

ReaderConfig reader(std::string id, double x, double y) {
  ReaderConfig r;
  r.reader_id = std::move(id);
  r.ip_address = "10.0.0.1";
  r.position = {x, y};
  return r;
}

ScenarioEmployee standing(unsigned tag, double x, double y, double from, double to) {
  ScenarioEmployee e;
  e.employee = {TagId(tag), "E" + std::to_string(tag), "B"};
  e.schedule.waypoints = {{from, Position{x, y}}, {to, Position{x, y}}};
  return e;
}

std::vector<DataRecord> fig6_records() {
  std::vector<DataRecord> out;
  for (const auto& r : load_log(fs::path(RFID_DATA_DIR) / "table1.log"))
    if (r.tag == TagId(9806)) out.push_back(r);
  return out;
}

// Random scenario: a handful of readers on a line-ish layout, employees
// wandering between random waypoints.
ScenarioConfig random_scenario(std::mt19937_64& rng, double p_err) {
  auto u = [&](double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  ScenarioConfig c;
  c.seed = rng();
  c.tick = 0.5;
  c.duration = 20;
  c.bit_error_prob = p_err;
  c.dedup_window = u(0.5, 6);
  const int nr = 1 + static_cast<int>(rng() % 5);
  for (int i = 0; i < nr; ++i) {
    auto r = reader("r" + std::to_string(i), u(-10, 10), u(-10, 10));
    if (rng() % 3 == 0) r.range_limit = u(1, 6);
    c.readers.push_back(r);
  }
  std::set<unsigned> tags;
  const int ne = static_cast<int>(rng() % 8);
  while (static_cast<int>(tags.size()) < ne) tags.insert(static_cast<unsigned>(rng() % 65536));
  for (unsigned tag : tags) {
    ScenarioEmployee e;
    e.employee = {TagId(tag), "E" + std::to_string(tag), "B"};
    double t = u(0, 3);
    while (t < c.duration) {
      if (rng() % 6 == 0)
        e.schedule.waypoints.push_back({t, std::nullopt});
      else
        e.schedule.waypoints.push_back({t, Position{u(-12, 12), u(-12, 12)}});
      t += u(0.5, 6);
    }
    c.employees.push_back(e);
  }
  return c;
}

TEST(Schedule, Interpolation) {
  MovementSchedule s;
  s.waypoints = {{1, Position{0, 0}}, {3, Position{4, 2}}, {4, std::nullopt}, {5, Position{1, 1}}};
  EXPECT_FALSE(s.position_at(0.5));
  auto p = s.position_at(2);
  ASSERT_TRUE(p);
  EXPECT_DOUBLE_EQ(p->x, 2);
  EXPECT_DOUBLE_EQ(p->y, 1);
  EXPECT_TRUE(s.position_at(3));
  EXPECT_FALSE(s.position_at(3.5));
  EXPECT_TRUE(s.position_at(5));
  EXPECT_FALSE(s.position_at(5.1));
  MovementSchedule bad;
  bad.waypoints = {{2, Position{0, 0}}, {2, Position{1, 0}}};
  EXPECT_THROW(bad.validate(10), ConfigError);
}

TEST(Simulation, NoTagsInRange) {
  ScenarioConfig c;
  c.duration = 5;
  c.readers = {reader("a", 0, 0)};
  c.employees = {standing(5, 50, 50, 0, 5)};
  const RunResult res = run(c);
  EXPECT_TRUE(res.records.empty());
  EXPECT_EQ(res.manifest.raw_reads, 0u);
}

TEST(Simulation, SingletonReadOncePerOwnedSlot) {
  ScenarioConfig c;
  c.duration = 2;
  c.readers = {reader("a", 0, 0), reader("b", 2, 0)};
  c.employees = {standing(5, 1, 0, 0, 2)};
  World w(c);
  ASSERT_EQ(w.slot_count(), 2u);
  std::uint64_t reads = 0;
  for (std::uint64_t k = 0; k < c.tick_count(); ++k) {
    const auto rr = w.step(k);
    EXPECT_EQ(rr.size(), 1u);
    reads += rr.size();
  }
  EXPECT_EQ(reads, c.tick_count());
  EXPECT_EQ(c.tick_count(), 21u);
}

TEST(Simulation, TickGridIncludesDuration) {
  ScenarioConfig c;
  c.readers = {reader("a", 0, 0)};
  c.tick = 0.1;
  c.duration = 0.3;
  EXPECT_EQ(c.tick_count(), 4u);
  c.duration = 0.35;
  EXPECT_EQ(c.tick_count(), 4u);
}

TEST(Simulation, NoisyRunReproducible) {
  ScenarioConfig c;
  c.duration = 20;
  c.bit_error_prob = 0.05;
  c.seed = 42;
  c.employees = {standing(77, 0.5, 0, 0, 20), standing(78, 0.2, 0.3, 0, 20)};
  c.readers = {reader("a", 0, 0)};
  const RunResult a = run(c);
  const RunResult b = run(c);
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(a.raw_reads, b.raw_reads);
  EXPECT_EQ(render_manifest(a.manifest), render_manifest(b.manifest));
  EXPECT_GT(a.manifest.misreads, 0u);
  c.seed = 43;
  const RunResult other = run(c);
  EXPECT_NE(other.raw_reads, a.raw_reads);

  c.seed = 42;
  c.bit_error_prob = 0.5;
  const RunResult h1 = run(c), h2 = run(c);
  EXPECT_EQ(h1.raw_reads, h2.raw_reads);
  EXPECT_EQ(h1.records, h2.records);
}

TEST(Simulation, WalkthroughYieldsOneRecord) {
  const ScenarioConfig c = load_scenario(fs::path(RFID_DATA_DIR) / "scenarios" / "doorway.scn");
  World w(c);
  EXPECT_TRUE(w.overlap().adjacent("door-in", "door-out"));
  EXPECT_EQ(w.slot_count(), 2u);
  const RunResult res = run(c);
  ASSERT_EQ(res.records.size(), 1u);
  EXPECT_EQ(res.records[0].tag, TagId(9806));
  EXPECT_GT(res.manifest.raw_reads, 1u);
  std::set<std::string> seen_by;
  for (const auto& r : res.raw_reads) seen_by.insert(r.reader_id);
  EXPECT_EQ(seen_by.size(), 2u);
}

TEST(Simulation, TableReplayMatchesFigureRows) {
  const ScenarioConfig c =
      load_scenario(fs::path(RFID_DATA_DIR) / "scenarios" / "table1_replay.scn");
  const RunResult res = run(c);
  EXPECT_EQ(res.records, fig6_records());
}

TEST(Simulation, ConservationAndNoPhantoms) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const double p = trial % 2 ? 0.0 : 0.02;
    const ScenarioConfig c = random_scenario(rng, p);
    const RunResult res = run(c);
    const auto& m = res.manifest;
    EXPECT_EQ(m.raw_reads, res.raw_reads.size());
    EXPECT_EQ(m.raw_reads, m.misreads + m.unknown_ids + m.deduped + m.records);
    EXPECT_EQ(m.records, res.records.size());
    std::set<TagId> roster;
    for (const auto& e : c.employees) roster.insert(e.employee.tag);
    for (const auto& r : res.records) EXPECT_TRUE(roster.count(r.tag));
    if (p == 0.0) {
      EXPECT_EQ(m.misreads, 0u);
      EXPECT_EQ(m.unknown_ids, 0u);
    }
  }
}

TEST(Simulation, TdmaExclusive) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const ScenarioConfig c = random_scenario(rng, 0.0);
    World w(c);
    for (std::uint64_t k = 0; k < c.tick_count(); ++k) {
      w.step(k);
      const auto& act = w.last_active();
      for (std::size_t i = 0; i < act.size(); ++i)
        for (std::size_t j = i + 1; j < act.size(); ++j)
          EXPECT_FALSE(w.overlap().adjacent(act[i], act[j])) << act[i] << " " << act[j];
    }
  }
}

TEST(Simulation, SlowLinkSkipsTicks) {
  ScenarioConfig c;
  c.duration = 5;
  c.readers = {reader("a", 0, 0)};
  c.airtime.bitrate = 100;  // one singleton round ~ 0.6 s
  c.employees = {standing(5, 0.5, 0, 0, 5)};
  const RunResult res = run(c);
  EXPECT_GT(res.manifest.busy_skips, 0u);
  EXPECT_GT(res.manifest.max_round_airtime, c.tick);
  // reads are spaced at least one round's airtime apart
  for (std::size_t i = 1; i < res.raw_reads.size(); ++i)
    EXPECT_GE(res.raw_reads[i].sim_time - res.raw_reads[i - 1].sim_time,
              res.manifest.max_round_airtime - 1e-9);
}

TEST(Simulation, PolledReaderReadsOnlyWhenAsked) {
  ScenarioConfig c;
  c.duration = 10;
  auto r = reader("a", 0, 0);
  r.mode = ReaderMode::polled;
  r.poll_times = {2, 5.05, 7};
  c.readers = {r};
  c.employees = {standing(5, 0.5, 0, 0, 10)};
  const RunResult res = run(c);
  ASSERT_EQ(res.raw_reads.size(), 3u);
  EXPECT_NEAR(res.raw_reads[0].sim_time, 2.0, 1e-9);
  EXPECT_NEAR(res.raw_reads[1].sim_time, 5.1, 1e-9);
  EXPECT_NEAR(res.raw_reads[2].sim_time, 7.0, 1e-9);
}

TEST(Simulation, IsaDoesNotChangeOutcome) {
  if (kernels::detected_isa() != kernels::Isa::avx2) GTEST_SKIP() << "no AVX2";
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const ScenarioConfig c = random_scenario(rng, 0.01);
    ASSERT_TRUE(kernels::set_isa(kernels::Isa::scalar));
    const RunResult a = run(c);
    ASSERT_TRUE(kernels::set_isa(kernels::Isa::avx2));
    const RunResult b = run(c);
    EXPECT_EQ(a.raw_reads, b.raw_reads);
    EXPECT_EQ(a.records, b.records);
  }
  kernels::set_isa(kernels::detected_isa());
}

TEST(Scenario, CanonicalRoundTrip) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    ScenarioConfig c = random_scenario(rng, 0.001 * trial);
    if (trial % 3 == 0) {
      c.readers[0].mode = ReaderMode::polled;
      c.readers[0].poll_times = {1, 2.5};
    }
    if (trial % 4 == 0) c.readers[0].medium = Medium::make(MediumKind::water_adjacent, 0.3);
    const std::string text = canonical_scenario(c);
    const ScenarioConfig back = parse_scenario(text);
    EXPECT_EQ(canonical_scenario(back), text);
    World a(c), b(back);
    EXPECT_EQ(a.slots(), b.slots());
  }
}

TEST(Scenario, ParseErrorsCarryLine) {
  const char* bad_key = "seed = 1\ntick = 0.1\nbogus = 3\n";
  try {
    parse_scenario(bad_key);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  const char* bad_waypoint = "[reader a]\nip = 1.2.3.4\nposition = 0 0\n[employee 5]\nname = x\n1 2\n";
  try {
    parse_scenario(bad_waypoint);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 6u);
  }
  const char* dup = "seed = 1\nseed = 2\n";
  try {
    parse_scenario(dup);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Scenario, SemanticErrors) {
  ScenarioConfig c;
  c.duration = 1;
  EXPECT_NO_THROW(c.validate());  // an empty site is legal and silent
  EXPECT_TRUE(run(c).records.empty());
  c.duration = 60;
  c.readers = {reader("a", 0, 0), reader("a", 1, 0)};
  EXPECT_THROW(c.validate(), ConfigError);
  c.readers = {reader("a", 0, 0)};
  c.tick = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.tick = 0.1;
  c.bit_error_prob = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c.bit_error_prob = 0;
  c.readers[0].ip_address = "300.1.1.1";
  EXPECT_THROW(c.validate(), ConfigError);
  c.readers[0].ip_address = "10.0.0.1";
  c.employees = {standing(5, 0, 0, 0, 1), standing(5, 1, 1, 0, 1)};
  EXPECT_THROW(c.validate(), ConfigError);
  c.employees = {standing(5, 0, 0, 0, 100)};
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_NO_THROW(c.employees = {standing(5, 0, 0, 0, 1)}; c.validate());
}

}  // namespace
}  // namespace rfid
