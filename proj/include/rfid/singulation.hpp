#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfid/tag_id.hpp"

namespace rfid {

/// Sequence of bits, index 0 first on air. Used for query prefixes and
/// check-coded tag replies.
class BitString {
 public:
  BitString() = default;
  /// Parses '0'/'1' characters; throws ConfigError on anything else.
  static BitString from_string(std::string_view text);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i]; }
  void push_back(bool b) { bits_.push_back(b); }
  void flip(std::size_t i) { bits_[i] = !bits_[i]; }
  std::string to_string() const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<bool> bits_;
};

enum class QueryOutcome { silence, single, collision };

std::string_view to_string(QueryOutcome outcome);

struct QueryResponse {
  QueryOutcome outcome = QueryOutcome::silence;
  std::optional<TagId> tag;  // set iff outcome == single
  std::size_t responders = 0;
};

/// Airtime constants. A query costs overhead + prefix bits; every tag that
/// answers a query transmits its full check-coded reply (width + 8 bits).
struct AirtimeModel {
  double bitrate = 64000.0;  // bits per second
  unsigned query_overhead_bits = 16;

  void validate() const;
  friend bool operator==(const AirtimeModel&, const AirtimeModel&) = default;
};

inline constexpr unsigned kCheckBits = 8;

struct SingulationStats {
  std::uint64_t queries_issued = 0;
  std::uint64_t bits_on_air = 0;
  std::uint64_t tags_read = 0;
  double modeled_airtime = 0.0;  // seconds, bits_on_air / bitrate
};

struct QueryTrace {
  BitString prefix;
  QueryOutcome outcome;
  std::size_t responders;
};

struct SingulationResult {
  std::vector<TagId> tags;  // ascending
  SingulationStats stats;
  std::vector<QueryTrace> trace;
};

/// Which tags answer an MSB-first prefix. Throws ConfigError on mixed
/// widths or a prefix longer than the tag width.
QueryResponse query_prefix(std::span<const TagId> population, const BitString& prefix);

/// One inventory round of binary tree walking.
///
/// The reader starts with the empty prefix. A collision at prefix p is
/// resolved depth-first by querying p+"0" and then p+"1"; silence
/// backtracks; a single reply is read and acknowledged, after which that
/// tag stays quiet until the round ends. Once the walk unwinds, the root is
/// queried again and the round ends when it hears silence. An empty field
/// therefore costs one query and a non-empty field costs the walk plus one
/// closing query.
///
/// Throws ConfigError on mixed widths, duplicate ids, or an invalid airtime
/// model.
SingulationResult singulate(std::span<const TagId> population, const AirtimeModel& airtime);
SingulationResult singulate(std::span<const TagId> population, double bitrate);

/// CRC-8, polynomial x^8 + x^2 + x + 1 (0x07), zero init, no reflection,
/// over the first `count` bits of `bits`.
std::uint8_t crc8(const BitString& bits, std::size_t count);

/// Tag bits MSB-first followed by their 8-bit CRC.
BitString encode_with_check(const TagId& tag);

/// Inverse of encode_with_check. nullopt when the check bits disagree.
/// Throws FramingError unless codeword.size() == width + 8.
std::optional<TagId> decode_with_check(const BitString& codeword, unsigned width);

}  // namespace rfid
