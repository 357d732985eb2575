#include "rfid/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "rfid/errors.hpp"
#include "rfid/identity.hpp"
#include "rfid/records.hpp"
#include "rfid/rf_link.hpp"
#include "rfid/simulation.hpp"

namespace rfid::cli {

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f.flush()) throw IoError("cannot write " + path);
}

void emit(const std::string& out_path, const std::string& content, std::ostream& out) {
  if (out_path.empty())
    out << content;
  else
    write_file(out_path, content);
}

std::string ingest_summary(const std::vector<DataRecord>& records, bool csv) {
  std::set<TagId> tags;
  std::set<std::string> dates;
  std::map<Access, std::size_t> by_access;
  for (const auto& r : records) {
    tags.insert(r.tag);
    dates.insert(format_date(r.date));
    ++by_access[r.access];
  }
  std::ostringstream o;
  if (csv) {
    o << "records,tags,dates,pass,deny\n"
      << records.size() << "," << tags.size() << "," << dates.size() << ","
      << by_access[Access::pass] << "," << by_access[Access::deny] << "\n";
  } else {
    o << "records " << records.size() << "\n"
      << "tags " << tags.size() << "\n"
      << "dates " << dates.size() << "\n"
      << "pass " << by_access[Access::pass] << "\n"
      << "deny " << by_access[Access::deny] << "\n";
  }
  return o.str();
}

std::string link_table(const LinkParams& base, double p_min, double p_max, unsigned steps,
                       const std::map<MediumKind, double>& factors, bool csv) {
  std::ostringstream o;
  const MediumKind kinds[] = {MediumKind::free_space, MediumKind::water_adjacent,
                              MediumKind::metal_adjacent};
  if (csv) {
    o << "tx_power,free_space,water_adjacent,metal_adjacent\n";
  } else {
    o << "read range (m) by transmit power and medium\n";
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-12s %-14s %-14s %s\n", "tx_power", "free_space",
                  "water_adjacent", "metal_adjacent");
    o << buf;
  }
  for (unsigned i = 0; i < steps; ++i) {
    LinkParams p = base;
    p.tx_power = steps == 1 ? p_min
                            : p_min + (p_max - p_min) * static_cast<double>(i) /
                                          static_cast<double>(steps - 1);
    p.validate();
    double ranges[3];
    for (int k = 0; k < 3; ++k)
      ranges[k] = read_range(p, Medium::make(kinds[k], factors.at(kinds[k])));
    char buf[160];
    if (csv)
      std::snprintf(buf, sizeof buf, "%.6g,%.6f,%.6f,%.6f\n", p.tx_power, ranges[0], ranges[1],
                    ranges[2]);
    else
      std::snprintf(buf, sizeof buf, "%-12.6g %-14.6f %-14.6f %.6f\n", p.tx_power, ranges[0],
                    ranges[1], ranges[2]);
    o << buf;
  }
  return o.str();
}

// Prefix parse errors with the file they came from.
template <typename F>
auto in_file(const std::string& path, F&& load) {
  try {
    return load();
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  } catch (const ConfigError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"RFID access-control simulator and log tools", "rfidac"};
  app.require_subcommand(1);

  // simulate
  std::string scenario_path, out_path, manifest_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> dedup_window;
  auto* sim = app.add_subcommand("simulate", "Run a scenario and write the record log");
  sim->add_option("scenario", scenario_path, "Scenario file")->required();
  sim->add_option("--out", out_path, "Record log to write (default: stdout)");
  sim->add_option("--manifest", manifest_path, "Run manifest to write");
  sim->add_option("--seed", seed, "Override the scenario seed");
  sim->add_option("--dedup-window", dedup_window, "Override the dedup window (seconds)");

  // scenario
  std::string check_path;
  auto* scn = app.add_subcommand("scenario", "Validate a scenario and print its canonical form");
  scn->add_option("scenario", check_path, "Scenario file")->required();
  scn->add_option("--out", out_path, "Write the canonical form here");

  // ingest
  std::string log_path, format = "text";
  unsigned tag_width = kDefaultTagWidth;
  auto* ing = app.add_subcommand("ingest", "Validate a record log and summarize it");
  ing->add_option("log", log_path, "Record log")->required();
  ing->add_option("--format", format)->check(CLI::IsMember({"text", "csv"}));
  ing->add_option("--tag-width", tag_width)->check(CLI::Range(1u, 128u));
  ing->add_option("--out", out_path);

  // report
  std::string registry_path, date_text;
  auto* rep = app.add_subcommand("report", "Attendance report for one date");
  rep->add_option("log", log_path, "Record log")->required();
  rep->add_option("--registry", registry_path, "Employee registry")->required();
  rep->add_option("--date", date_text, "Date as D/M/YYYY")->required();
  rep->add_option("--format", format)->check(CLI::IsMember({"text", "csv"}));
  rep->add_option("--tag-width", tag_width)->check(CLI::Range(1u, 128u));
  rep->add_option("--out", out_path);

  // registry
  std::string reg_file, reg_tag, reg_name, reg_building;
  auto* reg = app.add_subcommand("registry", "Manage the employee registry");
  reg->require_subcommand(1);
  auto* reg_add = reg->add_subcommand("add", "Register a tag");
  reg_add->add_option("registry", reg_file)->required();
  reg_add->add_option("tag", reg_tag)->required();
  reg_add->add_option("name", reg_name)->required();
  reg_add->add_option("building", reg_building)->required();
  reg_add->add_option("--tag-width", tag_width)->check(CLI::Range(1u, 128u));
  auto* reg_list = reg->add_subcommand("list", "Print the registry");
  reg_list->add_option("registry", reg_file)->required();
  reg_list->add_option("--format", format)->check(CLI::IsMember({"text", "csv"}));
  reg_list->add_option("--tag-width", tag_width)->check(CLI::Range(1u, 128u));
  auto* reg_remove = reg->add_subcommand("remove", "Remove a tag");
  reg_remove->add_option("registry", reg_file)->required();
  reg_remove->add_option("tag", reg_tag)->required();
  reg_remove->add_option("--tag-width", tag_width)->check(CLI::Range(1u, 128u));

  // link
  LinkParams lp;
  double p_min = 0.25, p_max = 2.0;
  unsigned steps = 8;
  double water = Medium::standard(MediumKind::water_adjacent).attenuation_factor;
  double metal = Medium::standard(MediumKind::metal_adjacent).attenuation_factor;
  auto* lnk = app.add_subcommand("link", "Read range over a transmit power grid");
  lnk->add_option("--gain", lp.antenna_gain);
  lnk->add_option("--tag-threshold", lp.tag_power_threshold);
  lnk->add_option("--detect-threshold", lp.backscatter_detect_threshold);
  lnk->add_option("--power-min", p_min);
  lnk->add_option("--power-max", p_max);
  lnk->add_option("--steps", steps)->check(CLI::Range(1u, 10000u));
  lnk->add_option("--water", water, "water_adjacent attenuation factor");
  lnk->add_option("--metal", metal, "metal_adjacent attenuation factor");
  lnk->add_option("--format", format)->check(CLI::IsMember({"text", "csv"}));
  lnk->add_option("--out", out_path);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front())
      err << sub->help();
    else
      err << app.help();
    return kExitUsage;
  }

  const bool csv = format == "csv";
  try {
    if (sim->parsed()) {
      ScenarioConfig cfg = in_file(scenario_path, [&] { return load_scenario(scenario_path); });
      if (seed) cfg.seed = *seed;
      if (dedup_window) cfg.dedup_window = *dedup_window;
      cfg.validate();
      const RunResult result = rfid::run(cfg);
      std::string log;
      for (const auto& r : result.records) log += encode_record(r) + "\n";
      const std::string manifest = render_manifest(result.manifest);
      emit(out_path, log, out);
      if (!manifest_path.empty()) write_file(manifest_path, manifest);
    } else if (scn->parsed()) {
      const ScenarioConfig cfg = in_file(check_path, [&] { return load_scenario(check_path); });
      emit(out_path, canonical_scenario(cfg), out);
    } else if (ing->parsed()) {
      const auto records = in_file(log_path, [&] { return load_log(log_path, tag_width); });
      emit(out_path, ingest_summary(records, csv), out);
    } else if (rep->parsed()) {
      const Date date = parse_date(date_text);
      const auto records = in_file(log_path, [&] { return load_log(log_path, tag_width); });
      const Registry registry =
          in_file(registry_path, [&] { return Registry::load(registry_path, tag_width); });
      const AttendanceReport report = attendance_report(date, records, registry);
      emit(out_path, csv ? format_report_csv(report) : format_report_text(report), out);
    } else if (reg->parsed()) {
      if (reg_add->parsed()) {
        Registry registry;
        if (std::filesystem::exists(reg_file)) registry = in_file(reg_file, [&] { return Registry::load(reg_file, tag_width); });
        registry.add({TagId::from_decimal(reg_tag, tag_width), reg_name, reg_building});
        registry.save(reg_file);
      } else if (reg_remove->parsed()) {
        Registry registry = in_file(reg_file, [&] { return Registry::load(reg_file, tag_width); });
        if (!registry.remove(TagId::from_decimal(reg_tag, tag_width)))
          throw ConfigError("tag " + reg_tag + " is not registered");
        registry.save(reg_file);
      } else {
        const Registry registry =
            in_file(reg_file, [&] { return Registry::load(reg_file, tag_width); });
        if (csv) {
          out << registry.to_csv();
        } else {
          for (const auto& e : registry.employees())
            out << e.tag.to_decimal() << "  " << e.name << "  " << e.building << "\n";
        }
      }
    } else if (lnk->parsed()) {
      if (!(p_min > 0.0) || p_max < p_min)
        throw ConfigError("power grid needs 0 < power-min <= power-max");
      lp.validate();
      const std::map<MediumKind, double> factors{{MediumKind::free_space, 1.0},
                                                 {MediumKind::water_adjacent, water},
                                                 {MediumKind::metal_adjacent, metal}};
      emit(out_path, link_table(lp, p_min, p_max, steps, factors, csv), out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitOk;
}

}  // namespace rfid::cli
