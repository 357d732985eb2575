#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rfid/rf_link.hpp"
#include "rfid/tag_id.hpp"

namespace rfid {

enum class ReaderMode { continuous, polled };

std::string_view to_string(ReaderMode mode);
ReaderMode reader_mode_from_string(std::string_view name);

struct Position {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Position&, const Position&) = default;
};

struct ReaderConfig {
  std::string reader_id;
  std::string ip_address;
  Position position;
  double boresight_deg = 0.0;  // heading of the antenna, counter-clockwise from +x
  LinkParams link;
  Medium medium;
  ReaderMode mode = ReaderMode::continuous;
  std::optional<unsigned> tdma_slot;
  /// Operator-configured scan range; coverage is the smaller of this and the
  /// physical read range.
  std::optional<double> range_limit;
  /// Sim times at which a polled reader is asked for an inventory.
  std::vector<double> poll_times;

  void validate() const;
  friend bool operator==(const ReaderConfig&, const ReaderConfig&) = default;
};

bool is_valid_ipv4(std::string_view text);

/// Radius of the reader's coverage disk in meters.
double coverage_radius(const ReaderConfig& reader);

class OverlapGraph {
 public:
  OverlapGraph() = default;
  /// Nodes are kept in ascending id order. Edges refer to node ids.
  OverlapGraph(std::vector<std::string> nodes,
               const std::vector<std::pair<std::string, std::string>>& edges);

  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  std::vector<std::pair<std::string, std::string>> edges() const;
  bool adjacent(std::string_view a, std::string_view b) const;
  const std::vector<std::size_t>& neighbours(std::size_t node) const { return adj_[node]; }
  std::size_t index_of(std::string_view id) const;
  std::size_t max_degree() const;

 private:
  std::vector<std::string> nodes_;
  std::vector<std::vector<std::size_t>> adj_;
};

/// Edge (a, b) iff their distance is below the sum of coverage radii.
/// Throws ConfigError on duplicate reader ids.
OverlapGraph build_overlap_graph(std::span<const ReaderConfig> readers);

using SlotMap = std::map<std::string, unsigned, std::less<>>;

/// Greedy colouring in ascending id order, smallest free slot first.
SlotMap assign_slots(const OverlapGraph& graph);

/// Same, with some readers pinned to operator-chosen slots. Throws
/// ConfigError when two adjacent readers are pinned to one slot.
SlotMap assign_slots(const OverlapGraph& graph, const SlotMap& pinned);

/// Number of distinct slots in a map (max + 1; 0 for an empty map).
unsigned slot_count(const SlotMap& slots);

struct TagRead {
  std::string reader_id;
  TagId tag;
  double timestamp = 0.0;
  friend bool operator==(const TagRead&, const TagRead&) = default;
};

/// Host-side suppression of repeat reads across readers. Keeps per-tag
/// last-kept time; a read is kept iff it is the tag's first or it arrives at
/// least `window` seconds after the last kept read of that tag.
class Deduplicator {
 public:
  explicit Deduplicator(double window);

  /// Throws ContractViolation when timestamps go backwards.
  bool accept(const TagRead& read);

 private:
  double window_;
  double last_time_ = 0.0;
  bool seen_any_ = false;
  std::unordered_map<TagId, double, TagIdHash> last_kept_;
};

std::vector<TagRead> dedup(std::span<const TagRead> reads, double window);

}  // namespace rfid
