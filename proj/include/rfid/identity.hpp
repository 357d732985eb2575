#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rfid/records.hpp"
#include "rfid/tag_id.hpp"

namespace rfid {

struct Employee {
  TagId tag;
  std::string name;
  std::string building;
  friend bool operator==(const Employee&, const Employee&) = default;
};

/// Tag -> employee registry. Persisted as `tag,name,building` text with a
/// header line.
class Registry {
 public:
  /// Throws ConfigError for a duplicate tag, an empty name, or a field
  /// containing a comma or line break.
  void add(Employee employee);
  bool remove(const TagId& tag);
  const Employee* find(const TagId& tag) const;
  /// Ascending by tag.
  const std::vector<Employee>& employees() const noexcept { return employees_; }
  bool contains_name(std::string_view name) const;

  std::string to_csv() const;
  /// Throws ParseError naming the line for malformed input.
  static Registry parse(std::string_view text, unsigned tag_width = kDefaultTagWidth);
  static Registry load(const std::filesystem::path& path, unsigned tag_width = kDefaultTagWidth);
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<Employee> employees_;
};

/// One identified access, the columns of the identification table.
struct IdentifiedRow {
  TagId tag;
  std::string name;
  Date date{};
  TimeOfDay time;
  std::string building;

  /// "9806 Christos Vassilios 9/2/2012 09:15:51 AM 500Y"
  std::string to_text() const;
  std::string to_csv() const;
  friend bool operator==(const IdentifiedRow&, const IdentifiedRow&) = default;
};

struct UnknownTag {
  TagId tag;
  friend bool operator==(const UnknownTag&, const UnknownTag&) = default;
};

using Identification = std::variant<IdentifiedRow, UnknownTag>;

Identification identify(const DataRecord& record, const Registry& registry);

enum class SessionStatus { closed, open };

struct Session {
  TagId tag;
  Date date{};
  TimeOfDay enter;
  std::optional<TimeOfDay> leave;
  SessionStatus status = SessionStatus::open;

  /// Seconds between enter and leave; 0 for an open session.
  unsigned duration() const;
  friend bool operator==(const Session&, const Session&) = default;
};

/// Pairs passes by alternation: odd passes enter, even passes leave. A
/// trailing unmatched enter is an open session. Throws ContractViolation
/// when records mix tags or dates or are not strictly increasing in time.
std::vector<Session> sessions(std::span<const DataRecord> records);

/// "H:MM:SS", hours unpadded.
std::string format_duration(unsigned seconds);

enum class AnomalyKind { open_session, unknown_tag, non_monotone };

std::string_view to_string(AnomalyKind kind);

struct Anomaly {
  AnomalyKind kind;
  TagId tag;
  std::string detail;
};

struct EmployeeAttendance {
  Employee employee;
  std::vector<DataRecord> records;  // log order
  std::vector<Session> sessions;
  /// Sum of closed-session durations. Absent when the day's passes are out
  /// of time order, because alternation pairing is meaningless then.
  std::optional<unsigned> total_presence;
};

struct AttendanceReport {
  Date date{};
  std::vector<IdentifiedRow> identified;     // log order
  std::vector<EmployeeAttendance> employees; // ascending tag
  std::vector<Anomaly> anomalies;
};

/// Builds the day's report. Anomalies are content, never errors; records are
/// never reordered.
AttendanceReport attendance_report(const Date& date, std::span<const DataRecord> log,
                                   const Registry& registry);

std::string format_report_text(const AttendanceReport& report);
std::string format_report_csv(const AttendanceReport& report);

}  // namespace rfid
