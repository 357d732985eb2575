#include "rfid/records.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rfid/errors.hpp"

namespace rfid {

TimeOfDay::TimeOfDay(unsigned seconds_since_midnight) : seconds_(seconds_since_midnight) {
  if (seconds_ >= 86400) throw ConfigError("time of day beyond 23:59:59");
}

TimeOfDay TimeOfDay::from_hms(unsigned hour24, unsigned minute, unsigned second) {
  if (hour24 > 23 || minute > 59 || second > 59) throw ConfigError("invalid time of day");
  return TimeOfDay(hour24 * 3600 + minute * 60 + second);
}

std::string TimeOfDay::to_string() const {
  const unsigned h24 = hour24();
  const unsigned h12 = h24 % 12 == 0 ? 12 : h24 % 12;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02u:%02u:%02u %s", h12, minute(), second(),
                h24 < 12 ? "AM" : "PM");
  return buf;
}

std::string format_date(const Date& date) {
  return std::to_string(static_cast<unsigned>(date.day())) + "/" +
         std::to_string(static_cast<unsigned>(date.month())) + "/" +
         std::to_string(static_cast<int>(date.year()));
}

namespace {

bool parse_uint(std::string_view text, unsigned& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

bool all_digits(std::string_view text) {
  if (text.empty()) return false;
  for (char c : text)
    if (c < '0' || c > '9') return false;
  return true;
}

// "HH:MM:SS" plus meridiem, 12-hour clock, two digits each.
TimeOfDay parse_time(std::string_view clock, std::string_view meridiem, std::size_t line) {
  if (clock.size() != 8 || clock[2] != ':' || clock[5] != ':')
    throw ParseError("time", line, "expected HH:MM:SS, got '" + std::string(clock) + "'");
  unsigned h = 0, m = 0, s = 0;
  const auto hh = clock.substr(0, 2), mm = clock.substr(3, 2), ss = clock.substr(6, 2);
  if (!all_digits(hh) || !all_digits(mm) || !all_digits(ss) || !parse_uint(hh, h) ||
      !parse_uint(mm, m) || !parse_uint(ss, s))
    throw ParseError("time", line, "non-numeric field in '" + std::string(clock) + "'");
  if (h < 1 || h > 12) throw ParseError("time", line, "hour " + std::string(hh) + " outside 01-12");
  if (m > 59) throw ParseError("time", line, "minute " + std::string(mm) + " outside 00-59");
  if (s > 59) throw ParseError("time", line, "second " + std::string(ss) + " outside 00-59");
  bool pm = false;
  if (meridiem == "PM") {
    pm = true;
  } else if (meridiem != "AM") {
    throw ParseError("meridiem", line, "expected AM or PM, got '" + std::string(meridiem) + "'");
  }
  const unsigned h24 = (h % 12) + (pm ? 12 : 0);
  return TimeOfDay::from_hms(h24, m, s);
}

Access parse_access(std::string_view text, std::size_t line) {
  if (text == "pass") return Access::pass;
  if (text == "deny") return Access::deny;
  throw ParseError("access", line, "unknown access value '" + std::string(text) + "'");
}

Date parse_date_at(std::string_view text, std::size_t line) {
  auto fail = [&](const std::string& why) -> Date {
    throw ParseError("date", line, why + " in '" + std::string(text) + "'");
  };
  const auto s1 = text.find('/');
  const auto s2 = s1 == std::string_view::npos ? s1 : text.find('/', s1 + 1);
  if (s2 == std::string_view::npos || text.find('/', s2 + 1) != std::string_view::npos)
    return fail("expected D/M/YYYY");
  const auto d = text.substr(0, s1), mo = text.substr(s1 + 1, s2 - s1 - 1),
             y = text.substr(s2 + 1);
  auto component_ok = [](std::string_view c) {
    return all_digits(c) && c.size() <= 2 && c.front() != '0';
  };
  if (!component_ok(d) || !component_ok(mo) || !all_digits(y) || y.size() != 4)
    return fail("expected D/M/YYYY");
  unsigned dv = 0, mv = 0, yv = 0;
  parse_uint(d, dv);
  parse_uint(mo, mv);
  parse_uint(y, yv);
  const Date date{std::chrono::year{static_cast<int>(yv)}, std::chrono::month{mv},
                  std::chrono::day{dv}};
  if (!date.ok()) return fail("no such calendar date");
  return date;
}

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    if (i == line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ') ++i;
    out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace

Date parse_date(std::string_view text) { return parse_date_at(text, 0); }

TimeOfDay parse_time_of_day(std::string_view text) {
  const auto fields = split_spaces(text);
  if (fields.size() != 2) throw ParseError("time", 0, "expected 'HH:MM:SS AM|PM'");
  return parse_time(fields[0], fields[1], 0);
}

std::string_view to_string(Access access) { return access == Access::pass ? "pass" : "deny"; }

std::string encode_record(const DataRecord& record) {
  std::string line = record.tag.to_decimal();
  line += ' ';
  line += record.time.to_string();
  line += ' ';
  line += to_string(record.access);
  line += ' ';
  line += format_date(record.date);
  return line;
}

DataRecord parse_record(std::string_view line, std::size_t line_number, unsigned tag_width) {
  const auto fields = split_spaces(line);
  if (fields.size() != 5)
    throw ParseError("fields", line_number,
                     "expected 5 space-separated fields, got " + std::to_string(fields.size()));
  DataRecord r;
  if (!all_digits(fields[0]))
    throw ParseError("tag", line_number, "tag '" + std::string(fields[0]) + "' is not decimal");
  try {
    r.tag = TagId::from_decimal(fields[0], tag_width);
  } catch (const ConfigError& e) {
    throw ParseError("tag", line_number, e.what());
  }
  r.time = parse_time(fields[1], fields[2], line_number);
  r.access = parse_access(fields[3], line_number);
  r.date = parse_date_at(fields[4], line_number);
  return r;
}

std::vector<DataRecord> parse_log(std::string_view text, unsigned tag_width) {
  std::vector<DataRecord> out;
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    ++line_number;
    out.push_back(parse_record(text.substr(pos, end - pos), line_number, tag_width));
    pos = end + 1;
  }
  return out;
}

std::vector<DataRecord> load_log(const std::filesystem::path& path, unsigned tag_width) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open log " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading log " + path.string());
  return parse_log(buf.str(), tag_width);
}

void append_log(const std::filesystem::path& path, std::span<const DataRecord> records) {
  std::error_code ec;
  if (std::filesystem::exists(path, ec) && std::filesystem::file_size(path, ec) > 0) {
    std::ifstream probe(path, std::ios::binary);
    probe.seekg(-1, std::ios::end);
    char last = 0;
    if (!probe.get(last)) throw IoError("cannot read log " + path.string());
    if (last != '\n') throw IoError("log " + path.string() + " does not end with a newline");
  }
  std::string payload;
  for (const auto& r : records) {
    payload += encode_record(r);
    payload += '\n';
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot open log " + path.string() + " for append");
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  out.flush();
  if (!out) throw IoError("error writing log " + path.string());
}

}  // namespace rfid
