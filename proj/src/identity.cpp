#include "rfid/identity.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "rfid/errors.hpp"

namespace rfid {

namespace {

void check_field(std::string_view value, std::string_view what) {
  if (value.find_first_of(",\r\n") != std::string_view::npos)
    throw ConfigError(std::string(what) + " must not contain commas or line breaks");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

void Registry::add(Employee employee) {
  if (trim(employee.name).empty()) throw ConfigError("employee name must not be empty");
  check_field(employee.name, "name");
  check_field(employee.building, "building");
  auto it = std::lower_bound(employees_.begin(), employees_.end(), employee.tag,
                             [](const Employee& e, const TagId& t) { return e.tag < t; });
  if (it != employees_.end() && it->tag == employee.tag)
    throw ConfigError("tag " + employee.tag.to_decimal() + " is already registered");
  employees_.insert(it, std::move(employee));
}

bool Registry::remove(const TagId& tag) {
  auto it = std::find_if(employees_.begin(), employees_.end(),
                         [&](const Employee& e) { return e.tag == tag; });
  if (it == employees_.end()) return false;
  employees_.erase(it);
  return true;
}

const Employee* Registry::find(const TagId& tag) const {
  auto it = std::lower_bound(employees_.begin(), employees_.end(), tag,
                             [](const Employee& e, const TagId& t) { return e.tag < t; });
  return it != employees_.end() && it->tag == tag ? &*it : nullptr;
}

bool Registry::contains_name(std::string_view name) const {
  return std::any_of(employees_.begin(), employees_.end(),
                     [&](const Employee& e) { return e.name == name; });
}

std::string Registry::to_csv() const {
  std::string out = "tag,name,building\n";
  for (const auto& e : employees_) out += e.tag.to_decimal() + "," + e.name + "," + e.building + "\n";
  return out;
}

Registry Registry::parse(std::string_view text, unsigned tag_width) {
  Registry reg;
  std::size_t line_number = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_number;
    if (!header_seen) {
      if (line != "tag,name,building")
        throw ParseError("header", line_number, "expected 'tag,name,building'");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    for (std::size_t c; (c = line.find(',', start)) != std::string_view::npos; start = c + 1)
      cols.push_back(trim(line.substr(start, c - start)));
    cols.push_back(trim(line.substr(start)));
    if (cols.size() != 3)
      throw ParseError("fields", line_number, "expected tag,name,building");
    try {
      reg.add({TagId::from_decimal(cols[0], tag_width), std::string(cols[1]),
               std::string(cols[2])});
    } catch (const ConfigError& e) {
      throw ParseError("employee", line_number, e.what());
    }
  }
  if (!header_seen) throw ParseError("header", 1, "registry file is empty");
  return reg;
}

Registry Registry::load(const std::filesystem::path& path, unsigned tag_width) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open registry " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), tag_width);
}

void Registry::save(const std::filesystem::path& path) const {
  const std::string text = to_csv();
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write registry " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out.flush()) throw IoError("cannot write registry " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string IdentifiedRow::to_text() const {
  return tag.to_decimal() + " " + name + " " + format_date(date) + " " + time.to_string() + " " +
         building;
}

std::string IdentifiedRow::to_csv() const {
  return tag.to_decimal() + "," + name + "," + format_date(date) + "," + time.to_string() + "," +
         building;
}

Identification identify(const DataRecord& record, const Registry& registry) {
  const Employee* e = registry.find(record.tag);
  if (e == nullptr) return UnknownTag{record.tag};
  return IdentifiedRow{record.tag, e->name, record.date, record.time, e->building};
}

unsigned Session::duration() const {
  if (status != SessionStatus::closed || !leave) return 0;
  return leave->seconds() - enter.seconds();
}

std::vector<Session> sessions(std::span<const DataRecord> records) {
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].tag != records[0].tag || records[i].date != records[0].date)
      throw ContractViolation("sessions: records must share one tag and one date");
    if (!(records[i - 1].time < records[i].time))
      throw ContractViolation("sessions: records must be strictly increasing in time");
  }
  std::vector<Session> out;
  for (std::size_t i = 0; i < records.size(); i += 2) {
    Session s{records[i].tag, records[i].date, records[i].time, std::nullopt, SessionStatus::open};
    if (i + 1 < records.size()) {
      s.leave = records[i + 1].time;
      s.status = SessionStatus::closed;
    }
    out.push_back(s);
  }
  return out;
}

std::string format_duration(unsigned seconds) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%u:%02u:%02u", seconds / 3600, seconds / 60 % 60, seconds % 60);
  return buf;
}

std::string_view to_string(AnomalyKind kind) {
  switch (kind) {
    case AnomalyKind::open_session: return "open_session";
    case AnomalyKind::unknown_tag: return "unknown_tag";
    case AnomalyKind::non_monotone: return "non_monotone";
  }
  return "?";
}

AttendanceReport attendance_report(const Date& date, std::span<const DataRecord> log,
                                   const Registry& registry) {
  AttendanceReport report;
  report.date = date;
  std::map<TagId, std::vector<DataRecord>> by_tag;
  for (const auto& r : log) {
    if (r.date != date) continue;
    by_tag[r.tag].push_back(r);
    const Identification id = identify(r, registry);
    if (const auto* row = std::get_if<IdentifiedRow>(&id)) report.identified.push_back(*row);
  }
  for (auto& [tag, records] : by_tag) {
    const Employee* e = registry.find(tag);
    if (e == nullptr) {
      report.anomalies.push_back({AnomalyKind::unknown_tag, tag,
                                  std::to_string(records.size()) +
                                      " record(s) with no registry entry"});
      continue;
    }
    EmployeeAttendance att{*e, records, {}, std::nullopt};
    const auto bad = std::adjacent_find(records.begin(), records.end(),
                                        [](const DataRecord& a, const DataRecord& b) {
                                          return !(a.time < b.time);
                                        });
    if (bad != records.end()) {
      report.anomalies.push_back({AnomalyKind::non_monotone, tag,
                                  bad->time.to_string() + " followed by " +
                                      std::next(bad)->time.to_string()});
    } else {
      att.sessions = sessions(records);
      unsigned total = 0;
      for (const auto& s : att.sessions) {
        total += s.duration();
        if (s.status == SessionStatus::open)
          report.anomalies.push_back({AnomalyKind::open_session, tag,
                                      "entered " + s.enter.to_string() + " with no leave"});
      }
      att.total_presence = total;
    }
    report.employees.push_back(std::move(att));
  }
  std::stable_sort(report.anomalies.begin(), report.anomalies.end(),
                   [](const Anomaly& a, const Anomaly& b) { return a.tag < b.tag; });
  return report;
}

namespace {

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string format_report_text(const AttendanceReport& report) {
  std::ostringstream out;
  out << "Attendance report for " << format_date(report.date) << "\n\n";

  const std::vector<std::string> head{"Tag number", "Employee Name", "Date", "Time access",
                                      "Building"};
  std::vector<std::vector<std::string>> table;
  for (const auto& r : report.identified)
    table.push_back({r.tag.to_decimal(), r.name, format_date(r.date), r.time.to_string(),
                     r.building});
  std::vector<std::size_t> widths;
  for (const auto& h : head) widths.push_back(h.size());
  for (const auto& row : table)
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  auto emit = [&](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c)
      line += c + 1 < row.size() ? pad(row[c], widths[c] + 2) : row[c];
    out << line << "\n";
  };
  emit(head);
  for (const auto& row : table) emit(row);

  out << "\nPresence\n";
  if (report.employees.empty()) out << "  (no registered employees recorded)\n";
  for (const auto& a : report.employees) {
    out << "  " << a.employee.tag.to_decimal() << " " << a.employee.name << " ("
        << a.employee.building << "): total "
        << (a.total_presence ? format_duration(*a.total_presence) : std::string("n/a"));
    if (a.total_presence) {
      const auto closed = std::count_if(a.sessions.begin(), a.sessions.end(), [](const Session& s) {
        return s.status == SessionStatus::closed;
      });
      out << ", " << closed << " closed, " << (a.sessions.size() - static_cast<std::size_t>(closed))
          << " open";
    }
    out << "\n";
    for (const auto& s : a.sessions) {
      out << "    " << s.enter.to_string() << " -> "
          << (s.leave ? s.leave->to_string() : std::string("(open)"));
      if (s.status == SessionStatus::closed) out << "  " << format_duration(s.duration());
      out << "\n";
    }
  }

  out << "\nAnomalies\n";
  if (report.anomalies.empty()) out << "  none\n";
  for (const auto& an : report.anomalies)
    out << "  " << to_string(an.kind) << " " << an.tag.to_decimal() << ": " << an.detail << "\n";
  return out.str();
}

std::string format_report_csv(const AttendanceReport& report) {
  std::ostringstream out;
  const std::string date = format_date(report.date);
  for (const auto& r : report.identified) out << "identified," << r.to_csv() << "\n";
  for (const auto& a : report.employees) {
    for (const auto& s : a.sessions) {
      out << "session," << a.employee.tag.to_decimal() << "," << date << ","
          << s.enter.to_string() << "," << (s.leave ? s.leave->to_string() : "") << ","
          << (s.status == SessionStatus::closed ? format_duration(s.duration()) : "") << ","
          << (s.status == SessionStatus::closed ? "closed" : "open") << "\n";
    }
    out << "presence," << a.employee.tag.to_decimal() << "," << a.employee.name << ","
        << a.employee.building << "," << date << ","
        << (a.total_presence ? format_duration(*a.total_presence) : "") << "\n";
  }
  for (const auto& an : report.anomalies)
    out << "anomaly," << an.tag.to_decimal() << "," << to_string(an.kind) << "," << an.detail
        << "\n";
  return out.str();
}

}  // namespace rfid
