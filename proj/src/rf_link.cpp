#include "rfid/rf_link.hpp"

#include <algorithm>
#include <cmath>

#include "rfid/errors.hpp"

namespace rfid {

void LinkParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(tx_power)) throw ConfigError("tx_power must be > 0");
  if (!positive(antenna_gain)) throw ConfigError("antenna_gain must be > 0");
  if (!positive(carrier_freq)) throw ConfigError("carrier_freq must be > 0");
  if (!positive(tag_power_threshold)) throw ConfigError("tag_power_threshold must be > 0");
  if (!positive(backscatter_detect_threshold))
    throw ConfigError("backscatter_detect_threshold must be > 0");
  if (!(max_read_angle >= 0.0 && max_read_angle <= 180.0))
    throw ConfigError("max_read_angle must lie in [0, 180]");
}

std::string_view to_string(MediumKind kind) {
  switch (kind) {
    case MediumKind::free_space: return "free_space";
    case MediumKind::water_adjacent: return "water_adjacent";
    case MediumKind::metal_adjacent: return "metal_adjacent";
  }
  return "?";
}

MediumKind medium_kind_from_string(std::string_view name) {
  if (name == "free_space") return MediumKind::free_space;
  if (name == "water_adjacent") return MediumKind::water_adjacent;
  if (name == "metal_adjacent") return MediumKind::metal_adjacent;
  throw ConfigError("unknown medium '" + std::string(name) + "'");
}

Medium Medium::standard(MediumKind kind) {
  switch (kind) {
    case MediumKind::free_space: return {kind, 1.0};
    case MediumKind::water_adjacent: return {kind, 0.3};
    case MediumKind::metal_adjacent: return {kind, 0.1};
  }
  return {};
}

Medium Medium::make(MediumKind kind, double attenuation_factor) {
  Medium m{kind, attenuation_factor};
  m.validate();
  return m;
}

void Medium::validate() const {
  if (kind == MediumKind::free_space) {
    if (attenuation_factor != 1.0)
      throw ConfigError("free_space attenuation factor must be exactly 1");
    return;
  }
  if (!(attenuation_factor > 0.0 && attenuation_factor < 1.0))
    throw ConfigError(std::string(to_string(kind)) + " attenuation factor must lie in (0, 1)");
}

namespace {

void check_distance(double distance) {
  if (!(distance > 0.0) || !std::isfinite(distance))
    throw DomainError("distance must be a positive finite number of meters");
}

}  // namespace

double field_strength(const LinkParams& params, const Medium& medium, double distance) {
  check_distance(distance);
  return params.tx_power * params.antenna_gain * medium.attenuation_factor /
         (distance * distance);
}

double boresight_offset(double angle_deg) {
  if (!(angle_deg >= 0.0 && angle_deg < 360.0))
    throw DomainError("angle must lie in [0, 360)");
  return angle_deg <= 180.0 ? angle_deg : 360.0 - angle_deg;
}

bool can_power_tag(const LinkParams& params, const Medium& medium, double distance,
                   double angle_deg) {
  const double field = field_strength(params, medium, distance);
  return field >= params.tag_power_threshold &&
         boresight_offset(angle_deg) <= params.max_read_angle;
}

double backscatter_signal(const LinkParams& params, const Medium& medium, double distance) {
  check_distance(distance);
  const double a = medium.attenuation_factor;
  const double d2 = distance * distance;
  return params.tx_power * params.antenna_gain * a * a / (d2 * d2);
}

bool backscatter_detectable(const LinkParams& params, const Medium& medium, double distance) {
  return backscatter_signal(params, medium, distance) >= params.backscatter_detect_threshold;
}

double read_range(const LinkParams& params, const Medium& medium) {
  const double pg = params.tx_power * params.antenna_gain;
  const double a = medium.attenuation_factor;
  const double power_limited = std::sqrt(pg * a / params.tag_power_threshold);
  const double detect_limited = std::sqrt(std::sqrt(pg * a * a / params.backscatter_detect_threshold));
  return std::min(power_limited, detect_limited);
}

}  // namespace rfid
