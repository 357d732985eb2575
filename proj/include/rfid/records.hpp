#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfid/tag_id.hpp"

namespace rfid {

/// Naive local time of day, second resolution. Rendered 12-hour with
/// meridiem: "HH:MM:SS AM".
class TimeOfDay {
 public:
  constexpr TimeOfDay() = default;
  /// Throws ConfigError unless seconds < 86400.
  explicit TimeOfDay(unsigned seconds_since_midnight);
  static TimeOfDay from_hms(unsigned hour24, unsigned minute, unsigned second);

  constexpr unsigned seconds() const noexcept { return seconds_; }
  unsigned hour24() const noexcept { return seconds_ / 3600; }
  unsigned minute() const noexcept { return seconds_ / 60 % 60; }
  unsigned second() const noexcept { return seconds_ % 60; }

  /// "HH:MM:SS AM|PM".
  std::string to_string() const;

  friend constexpr auto operator<=>(const TimeOfDay&, const TimeOfDay&) = default;

 private:
  unsigned seconds_ = 0;
};

/// "HH:MM:SS AM|PM" as written by TimeOfDay::to_string. Throws
/// ParseError(field "time" or "meridiem").
TimeOfDay parse_time_of_day(std::string_view text);

using Date = std::chrono::year_month_day;

/// D/M/YYYY without zero padding.
std::string format_date(const Date& date);
/// Accepts only D/M/YYYY (1-2 digit day and month, no leading zero, 4
/// digit year). Throws ParseError(field "date").
Date parse_date(std::string_view text);

enum class Access { pass, deny };

std::string_view to_string(Access access);

struct DataRecord {
  TagId tag;
  TimeOfDay time;
  Access access = Access::pass;
  Date date{};

  friend bool operator==(const DataRecord&, const DataRecord&) = default;
};

/// `<tag> <HH:MM:SS> <AM|PM> <access> <D/M/YYYY>`, single spaces, no newline.
std::string encode_record(const DataRecord& record);

/// Inverse of encode_record. Runs of spaces between fields are accepted.
/// Throws ParseError naming the field ("fields", "tag", "time", "meridiem",
/// "access", "date") and `line_number`.
DataRecord parse_record(std::string_view line, std::size_t line_number = 0,
                        unsigned tag_width = kDefaultTagWidth);

/// Appends one line per record. Existing bytes are never touched; a target
/// whose last byte is not a newline is refused with IoError.
void append_log(const std::filesystem::path& path, std::span<const DataRecord> records);

/// Reads every line in file order. Throws ParseError for the first
/// malformed line and IoError when the file cannot be read.
std::vector<DataRecord> load_log(const std::filesystem::path& path,
                                 unsigned tag_width = kDefaultTagWidth);

/// Same as load_log over in-memory text.
std::vector<DataRecord> parse_log(std::string_view text, unsigned tag_width = kDefaultTagWidth);

}  // namespace rfid
