#include "rfid/singulation.hpp"

#include <algorithm>
#include <cmath>

#include "rfid/errors.hpp"
#include "rfid/kernels.hpp"

namespace rfid {

BitString BitString::from_string(std::string_view text) {
  BitString b;
  for (char c : text) {
    if (c != '0' && c != '1') throw ConfigError("bit string may only contain 0 and 1");
    b.push_back(c == '1');
  }
  return b;
}

std::string BitString::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (bool b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

std::string_view to_string(QueryOutcome outcome) {
  switch (outcome) {
    case QueryOutcome::silence: return "silence";
    case QueryOutcome::single: return "single";
    case QueryOutcome::collision: return "collision";
  }
  return "?";
}

void AirtimeModel::validate() const {
  if (!(bitrate > 0.0) || !std::isfinite(bitrate)) throw ConfigError("bitrate must be > 0");
}

namespace {

unsigned common_width(std::span<const TagId> population) {
  if (population.empty()) return 0;
  const unsigned w = population.front().width();
  for (const auto& t : population)
    if (t.width() != w) throw ConfigError("population mixes tag widths");
  return w;
}

// Prefix as an integer: `bits` holds the prefix in its low `length` bits.
struct Prefix {
  TagValue bits = 0;
  unsigned length = 0;

  Prefix child(bool one) const { return {(bits << 1) | (one ? 1u : 0u), length + 1}; }

  BitString to_bit_string() const {
    BitString b;
    for (unsigned i = 0; i < length; ++i) b.push_back(((bits >> (length - 1 - i)) & 1u) != 0);
    return b;
  }
};

bool matches(TagValue value, unsigned width, const Prefix& p) {
  if (p.length == 0) return true;
  return (value >> (width - p.length)) == p.bits;
}

// Tags still answering during a round, with a fast path through the prefix
// kernel for widths that fit one 64-bit word.
class ActiveSet {
 public:
  ActiveSet(std::span<const TagId> sorted, unsigned width)
      : tags_(sorted.begin(), sorted.end()), width_(width) {
    if (width_ <= 64) {
      keys_.reserve(tags_.size());
      for (const auto& t : tags_)
        keys_.push_back(static_cast<std::uint64_t>(t.value()) << (64 - width_));
    }
  }

  // Returns (responders, index of the first responder).
  kernels::PrefixMatch query(const Prefix& p) const {
    if (width_ <= 64) {
      const std::uint64_t mask = p.length == 0 ? 0 : ~std::uint64_t{0} << (64 - p.length);
      const std::uint64_t pattern =
          p.length == 0 ? 0 : static_cast<std::uint64_t>(p.bits) << (64 - p.length);
      return kernels::prefix_match(keys_, pattern, mask);
    }
    kernels::PrefixMatch m;
    for (std::size_t i = 0; i < tags_.size(); ++i) {
      if (matches(tags_[i].value(), width_, p)) {
        if (m.count == 0) m.first = i;
        ++m.count;
      }
    }
    return m;
  }

  const TagId& at(std::size_t i) const { return tags_[i]; }

  void acknowledge(std::size_t i) {
    tags_.erase(tags_.begin() + static_cast<std::ptrdiff_t>(i));
    if (width_ <= 64) keys_.erase(keys_.begin() + static_cast<std::ptrdiff_t>(i));
  }

 private:
  std::vector<TagId> tags_;
  std::vector<std::uint64_t> keys_;
  unsigned width_;
};

}  // namespace

QueryResponse query_prefix(std::span<const TagId> population, const BitString& prefix) {
  const unsigned width = common_width(population);
  if (!population.empty() && prefix.size() > width)
    throw ConfigError("prefix longer than the tag width");
  QueryResponse r;
  for (const auto& t : population) {
    bool match = true;
    for (std::size_t i = 0; i < prefix.size() && match; ++i)
      match = t.bit(static_cast<unsigned>(i)) == prefix[i];
    if (!match) continue;
    if (r.responders++ == 0) r.tag = t;
  }
  if (r.responders == 0) {
    r.outcome = QueryOutcome::silence;
  } else if (r.responders == 1) {
    r.outcome = QueryOutcome::single;
  } else {
    r.outcome = QueryOutcome::collision;
    r.tag.reset();
  }
  return r;
}

SingulationResult singulate(std::span<const TagId> population, const AirtimeModel& airtime) {
  airtime.validate();
  const unsigned width = common_width(population);

  std::vector<TagId> sorted(population.begin(), population.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("population contains duplicate tag ids");

  SingulationResult result;
  ActiveSet active(sorted, width);
  const std::uint64_t reply_bits = width + kCheckBits;

  auto issue = [&](const Prefix& p) {
    const kernels::PrefixMatch m = active.query(p);
    result.stats.queries_issued += 1;
    result.stats.bits_on_air += airtime.query_overhead_bits + p.length;
    result.stats.bits_on_air += m.count * reply_bits;
    const QueryOutcome outcome = m.count == 0   ? QueryOutcome::silence
                                 : m.count == 1 ? QueryOutcome::single
                                                : QueryOutcome::collision;
    result.trace.push_back({p.to_bit_string(), outcome, m.count});
    return std::pair{outcome, m.first};
  };

  // Each pass starts at the root; the round ends on a silent root.
  for (;;) {
    std::vector<Prefix> stack{Prefix{}};
    bool root_silent = false;
    while (!stack.empty()) {
      const Prefix p = stack.back();
      stack.pop_back();
      const auto [outcome, first] = issue(p);
      switch (outcome) {
        case QueryOutcome::silence:
          if (p.length == 0) root_silent = true;
          break;
        case QueryOutcome::single:
          result.tags.push_back(active.at(first));
          active.acknowledge(first);
          break;
        case QueryOutcome::collision:
          // distinct ids cannot collide on a full-width prefix
          stack.push_back(p.child(true));
          stack.push_back(p.child(false));
          break;
      }
    }
    if (root_silent) break;
  }

  result.stats.tags_read = result.tags.size();
  result.stats.modeled_airtime = static_cast<double>(result.stats.bits_on_air) / airtime.bitrate;
  return result;
}

SingulationResult singulate(std::span<const TagId> population, double bitrate) {
  AirtimeModel model;
  model.bitrate = bitrate;
  return singulate(population, model);
}

std::uint8_t crc8(const BitString& bits, std::size_t count) {
  std::uint8_t crc = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const bool feedback = ((crc >> 7) & 1u) != static_cast<unsigned>(bits[i]);
    crc = static_cast<std::uint8_t>(crc << 1);
    if (feedback) crc ^= 0x07;
  }
  return crc;
}

BitString encode_with_check(const TagId& tag) {
  BitString cw;
  for (unsigned i = 0; i < tag.width(); ++i) cw.push_back(tag.bit(i));
  const std::uint8_t crc = crc8(cw, tag.width());
  for (int i = 7; i >= 0; --i) cw.push_back(((crc >> i) & 1u) != 0);
  return cw;
}

std::optional<TagId> decode_with_check(const BitString& codeword, unsigned width) {
  if (width < 1 || width > kMaxTagWidth) throw FramingError("tag width outside [1, 128]");
  if (codeword.size() != std::size_t{width} + kCheckBits)
    throw FramingError("codeword has " + std::to_string(codeword.size()) + " bits, expected " +
                       std::to_string(width + kCheckBits));
  std::uint8_t received = 0;
  for (unsigned i = 0; i < kCheckBits; ++i)
    received = static_cast<std::uint8_t>((received << 1) | (codeword[width + i] ? 1u : 0u));
  if (crc8(codeword, width) != received) return std::nullopt;
  TagValue v = 0;
  for (unsigned i = 0; i < width; ++i) v = (v << 1) | (codeword[i] ? 1u : 0u);
  return TagId(v, width);
}

}  // namespace rfid
