#pragma once

// Individual TWT schedule representation: the <WT, ST, offset> triplet, the
// <AA, MF> shape label, and the mantissa/exponent wake interval encoding.

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace twt {

using ClientId = std::uint32_t;

/// Largest wake duration a TWT client may use (legacy TxOP limit).
inline constexpr std::int64_t kWtMaxUs = 65280;
/// Wake duration granularity.
inline constexpr std::int64_t kWtQuantumUs = 256;
inline constexpr std::uint32_t kMaxMantissa = 65535;
inline constexpr int kMaxExponent = 31;
inline constexpr double kMinMf = 1.0;
inline constexpr double kMaxMf = 255.0;
/// Allowed drift in percentage points between requested and achieved AA.
inline constexpr double kAaTolerancePp = 1.0;

struct TwtSchedule {
  std::int64_t waketime_us = 0;
  std::int64_t sleeptime_us = 0;
  std::int64_t offset_us = 0;

  std::int64_t cycle_us() const noexcept { return waketime_us + sleeptime_us; }
  friend auto operator<=>(const TwtSchedule&, const TwtSchedule&) = default;
};

/// <AA, MF> pair. AA is a percentage in (0, 100], MF lies in [1, 255].
struct ScheduleTuple {
  double aa_percent = 0.0;
  double mf = 1.0;

  friend bool operator==(const ScheduleTuple&, const ScheduleTuple&) = default;
};

struct WakeIntervalEncoding {
  std::uint32_t mantissa = 0;
  int exponent = 0;

  std::int64_t decoded() const noexcept {
    return static_cast<std::int64_t>(mantissa) << exponent;
  }
  friend bool operator==(const WakeIntervalEncoding&, const WakeIntervalEncoding&) = default;
};

/// Percentage of each cycle spent awake. Throws InvalidScheduleError when
/// WT + ST == 0.
double aa_of(const TwtSchedule& schedule);

/// Wake duration for a multiplication factor: WT_max / mf rounded to the
/// nearest multiple of 256 µs and clamped to [256, 65280]. Throws DomainError
/// for mf outside [1, 255].
std::int64_t wt_from_mf(double mf);

/// Offset-free schedule realising the tuple. The sleeptime is rounded to the
/// nearest value the wake interval fields can carry; throws QuantizationError
/// if the achieved AA drifts more than one percentage point (AA = 100 always
/// fails since ST = 0 is not encodable).
TwtSchedule schedule_from_tuple(const ScheduleTuple& tuple);

/// Smallest exponent whose rounded mantissa fits in 16 bits. Decoding differs
/// from st_us by at most 2^(exponent-1).
WakeIntervalEncoding encode_wake_interval(std::int64_t st_us);

/// True if st_us == mantissa * 2^exponent for some in-range mantissa/exponent.
bool is_exactly_encodable(std::int64_t st_us) noexcept;

enum class ScheduleViolation {
  wt_not_quantized,
  wt_below_minimum,
  wt_exceeds_max,
  st_negative,
  st_not_encodable,
  offset_negative,
};

std::string to_string(ScheduleViolation v);

/// Every invariant a schedule breaks; empty when valid.
std::vector<ScheduleViolation> validate_schedule(const TwtSchedule& schedule);

}  // namespace twt
