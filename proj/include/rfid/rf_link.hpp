#pragma once

#include <string>
#include <string_view>

namespace rfid {

/// Reader-side link budget in abstract consistent units: a field-strength
/// threshold is compared against tx_power * antenna_gain / d^2 directly.
struct LinkParams {
  double tx_power = 1.0;                   // watts
  double antenna_gain = 4.0;               // linear
  double carrier_freq = 865.7e6;           // hertz, carried only
  double tag_power_threshold = 0.25;
  double backscatter_detect_threshold = 0.01;
  double max_read_angle = 180.0;           // degrees off boresight

  /// Throws ConfigError on a non-positive power, gain or threshold, or an
  /// angle outside [0, 180].
  void validate() const;
  friend bool operator==(const LinkParams&, const LinkParams&) = default;
};

enum class MediumKind { free_space, water_adjacent, metal_adjacent };

std::string_view to_string(MediumKind kind);
MediumKind medium_kind_from_string(std::string_view name);

struct Medium {
  MediumKind kind = MediumKind::free_space;
  double attenuation_factor = 1.0;

  /// Default factors: free space 1.0, water 0.3, metal 0.1.
  static Medium standard(MediumKind kind);
  /// Validated construction; free space must be exactly 1, others in (0, 1).
  static Medium make(MediumKind kind, double attenuation_factor);

  void validate() const;
  friend bool operator==(const Medium&, const Medium&) = default;
};

/// tx_power * gain * attenuation / d^2. Throws DomainError for d <= 0.
double field_strength(const LinkParams& params, const Medium& medium, double distance);

/// Folds an angle in [0, 360) to its offset from boresight in [0, 180].
double boresight_offset(double angle_deg);

/// Inclusive threshold and angle-cone test.
bool can_power_tag(const LinkParams& params, const Medium& medium, double distance,
                   double angle_deg);

/// Round-trip return level: tx_power * gain * a^2 / d^4 (two 1/d^2 legs).
double backscatter_signal(const LinkParams& params, const Medium& medium, double distance);

bool backscatter_detectable(const LinkParams& params, const Medium& medium, double distance);

/// Largest boresight distance where the tag is both powered and heard:
/// min(sqrt(PGa / tag_thr), (PGa^2 / detect_thr)^(1/4)).
double read_range(const LinkParams& params, const Medium& medium);

}  // namespace rfid
