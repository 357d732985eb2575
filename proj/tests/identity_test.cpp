#include "rfid/identity.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "rfid/errors.hpp"

namespace rfid {
namespace {

namespace fs = std::filesystem;
using std::chrono::day;
using std::chrono::month;
using std::chrono::year;

const Date kTableDate{year{2012}, month{2}, day{9}};

std::vector<DataRecord> table1() { return load_log(fs::path(RFID_DATA_DIR) / "table1.log"); }
Registry bundled() { return Registry::load(fs::path(RFID_DATA_DIR) / "registry.csv"); }

std::vector<std::string> fig6_rows() {
  std::ifstream in(fs::path(RFID_DATA_DIR) / "fig6_rows.txt");
  std::vector<std::string> rows;
  for (std::string line; std::getline(in, line);) rows.push_back(line);
  return rows;
}

std::vector<DataRecord> records_for(const std::vector<DataRecord>& log, unsigned tag) {
  std::vector<DataRecord> out;
  for (const auto& r : log)
    if (r.tag == TagId(tag)) out.push_back(r);
  return out;
}

TEST(Identify, FirstFigureRow) {
  const DataRecord r = parse_record("9806 09:15:51 AM pass 9/2/2012");
  const Identification id = identify(r, bundled());
  ASSERT_TRUE(std::holds_alternative<IdentifiedRow>(id));
  EXPECT_EQ(std::get<IdentifiedRow>(id).to_text(),
            "9806 Christos Vassilios 9/2/2012 09:15:51 AM 500Y");
}

TEST(Identify, UnknownTagIsDistinct) {
  const DataRecord r = parse_record("9999 09:15:51 AM pass 9/2/2012");
  const Identification id = identify(r, bundled());
  ASSERT_TRUE(std::holds_alternative<UnknownTag>(id));
  EXPECT_EQ(std::get<UnknownTag>(id).tag, TagId(9999));
}

TEST(Identify, AllFourRowsInTimeOrder) {
  const Registry reg = bundled();
  std::vector<std::string> rows;
  for (const auto& r : records_for(table1(), 9806))
    rows.push_back(std::get<IdentifiedRow>(identify(r, reg)).to_text());
  EXPECT_EQ(rows, fig6_rows());
}

TEST(Identify, NeverInventsNames) {
  const Registry reg = bundled();
  for (const auto& r : table1()) {
    const Identification id = identify(r, reg);
    if (const auto* row = std::get_if<IdentifiedRow>(&id)) {
      EXPECT_TRUE(reg.contains_name(row->name));
    }
  }
}

TEST(Sessions, TagNinetyEightOhSix) {
  const auto s = sessions(records_for(table1(), 9806));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].status, SessionStatus::closed);
  EXPECT_EQ(s[0].enter, TimeOfDay::from_hms(9, 15, 51));
  EXPECT_EQ(s[0].leave, TimeOfDay::from_hms(12, 33, 12));
  EXPECT_EQ(s[1].enter, TimeOfDay::from_hms(13, 10, 11));
  EXPECT_EQ(s[1].leave, TimeOfDay::from_hms(16, 1, 5));
  EXPECT_EQ(s[1].status, SessionStatus::closed);
}

TEST(Sessions, SingleAndEmpty) {
  const std::vector<DataRecord> one{parse_record("5 08:00:00 AM pass 1/1/2020")};
  const auto s = sessions(one);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].status, SessionStatus::open);
  EXPECT_FALSE(s[0].leave);
  EXPECT_EQ(s[0].duration(), 0u);
  EXPECT_TRUE(sessions(std::vector<DataRecord>{}).empty());
}

TEST(Sessions, CountsFollowAlternation) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const unsigned n = static_cast<unsigned>(rng() % 12);
    std::vector<DataRecord> recs;
    unsigned t = static_cast<unsigned>(rng() % 100);
    for (unsigned i = 0; i < n; ++i) {
      recs.push_back({TagId(7), TimeOfDay(t), Access::pass, kTableDate});
      t += 1 + static_cast<unsigned>(rng() % 5000);
      if (t >= 86400) break;
    }
    const auto s = sessions(recs);
    const std::size_t k = recs.size();
    EXPECT_EQ(s.size(), (k + 1) / 2);
    EXPECT_EQ(std::count_if(s.begin(), s.end(),
                            [](const Session& x) { return x.status == SessionStatus::closed; }),
              static_cast<long>(k / 2));
    for (const auto& x : s)
      if (x.status == SessionStatus::closed) {
        EXPECT_GT(x.duration(), 0u);
      }
  }
}

TEST(Sessions, PreconditionsEnforced) {
  const std::vector<DataRecord> mixed{parse_record("5 08:00:00 AM pass 1/1/2020"),
                                      parse_record("6 09:00:00 AM pass 1/1/2020")};
  EXPECT_THROW(sessions(mixed), ContractViolation);
  const std::vector<DataRecord> backwards{parse_record("5 09:00:00 AM pass 1/1/2020"),
                                          parse_record("5 08:00:00 AM pass 1/1/2020")};
  EXPECT_THROW(sessions(backwards), ContractViolation);
}

TEST(Attendance, PresenceForNinetyEightOhSix) {
  // independent arithmetic on the raw clock strings
  const long first = oracle::clock_seconds("12:33:12 PM") - oracle::clock_seconds("09:15:51 AM");
  const long second = oracle::clock_seconds("04:01:05 PM") - oracle::clock_seconds("01:10:11 PM");
  EXPECT_EQ(first, 3 * 3600 + 17 * 60 + 21);
  EXPECT_EQ(second, 2 * 3600 + 50 * 60 + 54);
  const long total = first + second;
  EXPECT_EQ(total, 6 * 3600 + 8 * 60 + 15);

  const AttendanceReport rep = attendance_report(kTableDate, table1(), bundled());
  ASSERT_EQ(rep.employees.size(), 1u);
  const auto& a = rep.employees[0];
  EXPECT_EQ(a.employee.name, "Christos Vassilios");
  ASSERT_TRUE(a.total_presence);
  EXPECT_EQ(static_cast<long>(*a.total_presence), total);
  EXPECT_EQ(format_duration(*a.total_presence), "6:08:15");
  ASSERT_EQ(a.sessions.size(), 2u);
  EXPECT_EQ(format_duration(a.sessions[0].duration()), "3:17:21");
  EXPECT_EQ(format_duration(a.sessions[1].duration()), "2:50:54");

  std::vector<std::string> rows;
  for (const auto& r : rep.identified) rows.push_back(r.to_text());
  EXPECT_EQ(rows, fig6_rows());
}

TEST(Attendance, VerbatimTableOrderFlagsNonMonotoneTag) {
  Registry reg = bundled();
  reg.add({TagId(9030), "Employee 9030", "500Y"});
  const auto log = table1();
  // oracle: is the verbatim 9030 sequence sorted?
  const auto r9030 = records_for(log, 9030);
  bool sorted = true;
  for (std::size_t i = 1; i < r9030.size(); ++i)
    sorted = sorted && r9030[i - 1].time < r9030[i].time;
  EXPECT_FALSE(sorted);

  const AttendanceReport rep = attendance_report(kTableDate, log, reg);
  bool flagged = false;
  for (const auto& an : rep.anomalies)
    flagged = flagged || (an.kind == AnomalyKind::non_monotone && an.tag == TagId(9030));
  EXPECT_TRUE(flagged);
  for (const auto& a : rep.employees) {
    if (a.employee.tag != TagId(9030)) continue;
    EXPECT_FALSE(a.total_presence);
    EXPECT_EQ(a.records, r9030);  // log order kept
  }
}

TEST(Attendance, UnknownAndOpenFlags) {
  const auto log = table1();
  const AttendanceReport rep = attendance_report(kTableDate, log, bundled());
  std::set<TagId> unknown;
  for (const auto& an : rep.anomalies)
    if (an.kind == AnomalyKind::unknown_tag) unknown.insert(an.tag);
  EXPECT_EQ(unknown, (std::set<TagId>{TagId(9027), TagId(9030), TagId(9034), TagId(9808)}));

  Registry reg = bundled();
  reg.add({TagId(9808), "Someone", "500Y"});
  const AttendanceReport rep2 = attendance_report(kTableDate, log, reg);
  bool open = false;
  for (const auto& an : rep2.anomalies)
    open = open || (an.kind == AnomalyKind::open_session && an.tag == TagId(9808));
  EXPECT_TRUE(open);
}

TEST(Attendance, EmptyLogEmptyReport) {
  const AttendanceReport rep = attendance_report(kTableDate, {}, bundled());
  EXPECT_TRUE(rep.employees.empty());
  EXPECT_TRUE(rep.anomalies.empty());
  EXPECT_TRUE(rep.identified.empty());
}

TEST(Attendance, OtherDatesIgnored) {
  const AttendanceReport rep =
      attendance_report(Date{year{2012}, month{2}, day{10}}, table1(), bundled());
  EXPECT_TRUE(rep.identified.empty());
}

TEST(Attendance, InvariantUnderReparse) {
  const auto log = table1();
  std::string text;
  for (const auto& r : log) text += encode_record(r) + "\n";
  const auto again = parse_log(text);
  const auto a = attendance_report(kTableDate, log, bundled());
  const auto b = attendance_report(kTableDate, again, bundled());
  EXPECT_EQ(format_report_text(a), format_report_text(b));
  EXPECT_EQ(*a.employees[0].total_presence, *b.employees[0].total_presence);
}

TEST(Attendance, TextAndCsvRendering) {
  const AttendanceReport rep = attendance_report(kTableDate, table1(), bundled());
  const std::string text = format_report_text(rep);
  EXPECT_NE(text.find("total 6:08:15"), std::string::npos) << text;
  EXPECT_NE(text.find("unknown_tag 9027"), std::string::npos);
  const std::string csv = format_report_csv(rep);
  EXPECT_NE(csv.find("identified,9806,Christos Vassilios,9/2/2012,09:15:51 AM,500Y\n"),
            std::string::npos)
      << csv;
  EXPECT_NE(csv.find("presence,9806,Christos Vassilios,500Y,9/2/2012,6:08:15\n"), std::string::npos);
  EXPECT_NE(csv.find("session,9806,9/2/2012,01:10:11 PM,04:01:05 PM,2:50:54,closed\n"),
            std::string::npos);
}

TEST(Registry, ParseSaveLoad) {
  Registry reg = Registry::parse("tag,name,building\n9806,Christos Vassilios,500Y\n\n7,A B,X\n");
  ASSERT_EQ(reg.employees().size(), 2u);
  EXPECT_EQ(reg.employees()[0].tag, TagId(7));
  EXPECT_EQ(reg.find(TagId(9806))->building, "500Y");
  EXPECT_EQ(reg.find(TagId(1)), nullptr);

  const fs::path p = fs::temp_directory_path() / "rfid_registry_roundtrip.csv";
  reg.save(p);
  EXPECT_EQ(Registry::load(p).employees(), reg.employees());
  fs::remove(p);
}

TEST(Registry, Errors) {
  Registry reg;
  reg.add({TagId(1), "A", "B"});
  EXPECT_THROW(reg.add({TagId(1), "C", "D"}), ConfigError);
  EXPECT_THROW(reg.add({TagId(2), "", "D"}), ConfigError);
  EXPECT_THROW(reg.add({TagId(3), "A,B", "D"}), ConfigError);
  EXPECT_TRUE(reg.remove(TagId(1)));
  EXPECT_FALSE(reg.remove(TagId(1)));

  EXPECT_THROW(Registry::parse("tag,name\n"), ParseError);
  try {
    Registry::parse("tag,name,building\n1,a,b\n2,c\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    Registry::parse("tag,name,building\n1,a,b\n1,c,d\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

}  // namespace
}  // namespace rfid
