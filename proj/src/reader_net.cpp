#include "rfid/reader_net.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "rfid/errors.hpp"

namespace rfid {

std::string_view to_string(ReaderMode mode) {
  return mode == ReaderMode::continuous ? "continuous" : "polled";
}

ReaderMode reader_mode_from_string(std::string_view name) {
  if (name == "continuous") return ReaderMode::continuous;
  if (name == "polled") return ReaderMode::polled;
  throw ConfigError("unknown reader mode '" + std::string(name) + "'");
}

bool is_valid_ipv4(std::string_view text) {
  int parts = 0;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = text.find('.', pos);
    const std::string_view part =
        text.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos);
    if (part.empty() || part.size() > 3) return false;
    if (part.size() > 1 && part.front() == '0') return false;
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc{} || ptr != part.data() + part.size() || value > 255) return false;
    ++parts;
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  return parts == 4;
}

void ReaderConfig::validate() const {
  if (reader_id.empty()) throw ConfigError("reader id must not be empty");
  const std::string who = "reader " + reader_id + ": ";
  if (reader_id.find_first_of(" \t,") != std::string::npos)
    throw ConfigError(who + "id must not contain whitespace or commas");
  if (!is_valid_ipv4(ip_address)) throw ConfigError(who + "invalid ip address '" + ip_address + "'");
  if (!std::isfinite(position.x) || !std::isfinite(position.y))
    throw ConfigError(who + "position must be finite");
  if (!(boresight_deg >= 0.0 && boresight_deg < 360.0))
    throw ConfigError(who + "boresight must lie in [0, 360)");
  try {
    link.validate();
    medium.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(who + e.what());
  }
  if (range_limit && !(*range_limit > 0.0)) throw ConfigError(who + "range must be > 0");
  if (mode == ReaderMode::continuous && !poll_times.empty())
    throw ConfigError(who + "poll times given for a continuous reader");
  if (!std::is_sorted(poll_times.begin(), poll_times.end()))
    throw ConfigError(who + "poll times must be ascending");
}

double coverage_radius(const ReaderConfig& reader) {
  const double physical = read_range(reader.link, reader.medium);
  return reader.range_limit ? std::min(physical, *reader.range_limit) : physical;
}

OverlapGraph::OverlapGraph(std::vector<std::string> nodes,
                           const std::vector<std::pair<std::string, std::string>>& edges)
    : nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end());
  if (std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end())
    throw ConfigError("duplicate reader id in overlap graph");
  adj_.resize(nodes_.size());
  for (const auto& [a, b] : edges) {
    const std::size_t ia = index_of(a);
    const std::size_t ib = index_of(b);
    if (ia == ib) throw ConfigError("self loop on reader " + a);
    if (std::find(adj_[ia].begin(), adj_[ia].end(), ib) != adj_[ia].end()) continue;
    adj_[ia].push_back(ib);
    adj_[ib].push_back(ia);
  }
  for (auto& list : adj_) std::sort(list.begin(), list.end());
}

std::size_t OverlapGraph::index_of(std::string_view id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
  if (it == nodes_.end() || *it != id)
    throw ConfigError("unknown reader id '" + std::string(id) + "'");
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::vector<std::pair<std::string, std::string>> OverlapGraph::edges() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    for (std::size_t j : adj_[i])
      if (i < j) out.emplace_back(nodes_[i], nodes_[j]);
  return out;
}

bool OverlapGraph::adjacent(std::string_view a, std::string_view b) const {
  const auto& list = adj_[index_of(a)];
  return std::binary_search(list.begin(), list.end(), index_of(b));
}

std::size_t OverlapGraph::max_degree() const {
  std::size_t d = 0;
  for (const auto& list : adj_) d = std::max(d, list.size());
  return d;
}

OverlapGraph build_overlap_graph(std::span<const ReaderConfig> readers) {
  std::vector<std::string> ids;
  for (const auto& r : readers) ids.push_back(r.reader_id);
  std::vector<std::pair<std::string, std::string>> edges;
  for (std::size_t i = 0; i < readers.size(); ++i) {
    for (std::size_t j = i + 1; j < readers.size(); ++j) {
      const double dist = std::hypot(readers[i].position.x - readers[j].position.x,
                                     readers[i].position.y - readers[j].position.y);
      if (dist < coverage_radius(readers[i]) + coverage_radius(readers[j]))
        edges.emplace_back(readers[i].reader_id, readers[j].reader_id);
    }
  }
  return OverlapGraph(std::move(ids), edges);
}

SlotMap assign_slots(const OverlapGraph& graph) { return assign_slots(graph, {}); }

SlotMap assign_slots(const OverlapGraph& graph, const SlotMap& pinned) {
  const auto& nodes = graph.nodes();
  std::vector<std::optional<unsigned>> colour(nodes.size());
  for (const auto& [id, slot] : pinned) colour[graph.index_of(id)] = slot;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!colour[i]) continue;
    for (std::size_t j : graph.neighbours(i))
      if (colour[j] == colour[i])
        throw ConfigError("readers " + nodes[i] + " and " + nodes[j] +
                          " overlap but are pinned to the same TDMA slot");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (colour[i]) continue;
    std::set<unsigned> taken;
    for (std::size_t j : graph.neighbours(i))
      if (colour[j]) taken.insert(*colour[j]);
    unsigned slot = 0;
    while (taken.count(slot) != 0) ++slot;
    colour[i] = slot;
  }
  SlotMap out;
  for (std::size_t i = 0; i < nodes.size(); ++i) out.emplace(nodes[i], *colour[i]);
  return out;
}

unsigned slot_count(const SlotMap& slots) {
  unsigned n = 0;
  for (const auto& [id, slot] : slots) n = std::max(n, slot + 1);
  return n;
}

Deduplicator::Deduplicator(double window) : window_(window) {
  if (!(window > 0.0)) throw ConfigError("dedup window must be > 0");
}

bool Deduplicator::accept(const TagRead& read) {
  if (seen_any_ && read.timestamp < last_time_)
    throw ContractViolation("dedup input is not sorted by timestamp");
  seen_any_ = true;
  last_time_ = read.timestamp;
  auto [it, inserted] = last_kept_.try_emplace(read.tag, read.timestamp);
  if (inserted) return true;
  if (read.timestamp >= it->second + window_) {
    it->second = read.timestamp;
    return true;
  }
  return false;
}

std::vector<TagRead> dedup(std::span<const TagRead> reads, double window) {
  Deduplicator filter(window);
  // validate ordering before emitting anything
  for (std::size_t i = 1; i < reads.size(); ++i)
    if (reads[i].timestamp < reads[i - 1].timestamp)
      throw ContractViolation("dedup input is not sorted by timestamp");
  std::vector<TagRead> out;
  for (const auto& r : reads)
    if (filter.accept(r)) out.push_back(r);
  return out;
}

}  // namespace rfid
