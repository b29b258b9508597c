#include "twtsched/schedule.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "twtsched/error.hpp"

namespace twt {

double aa_of(const TwtSchedule& schedule) {
  const std::int64_t cycle = schedule.cycle_us();
  if (cycle <= 0) {
    throw InvalidScheduleError("schedule has zero cycle length (WT + ST == 0)");
  }
  return 100.0 * static_cast<double>(schedule.waketime_us) / static_cast<double>(cycle);
}

std::int64_t wt_from_mf(double mf) {
  if (!(mf >= kMinMf && mf <= kMaxMf)) {
    throw DomainError("multiplication factor " + std::to_string(mf) + " outside [1, 255]");
  }
  const double quanta = std::round(static_cast<double>(kWtMaxUs) / mf / static_cast<double>(kWtQuantumUs));
  const auto wt = static_cast<std::int64_t>(quanta) * kWtQuantumUs;
  return std::clamp(wt, kWtQuantumUs, kWtMaxUs);
}

WakeIntervalEncoding encode_wake_interval(std::int64_t st_us) {
  if (st_us < 1) {
    throw UnencodableError("sleeptime " + std::to_string(st_us) + " µs below 1 µs");
  }
  constexpr std::int64_t kLargest = static_cast<std::int64_t>(kMaxMantissa) << kMaxExponent;
  if (st_us > kLargest) {
    throw UnencodableError("sleeptime " + std::to_string(st_us) + " µs exceeds 65535 * 2^31");
  }
  for (int e = 0; e <= kMaxExponent; ++e) {
    const std::int64_t half = e == 0 ? 0 : (std::int64_t{1} << (e - 1));
    const std::int64_t mantissa = (st_us + half) >> e;
    if (mantissa <= kMaxMantissa) {
      return {static_cast<std::uint32_t>(mantissa), e};
    }
  }
  // Unreachable: e = 31 always fits once st_us <= kLargest.
  throw UnencodableError("sleeptime " + std::to_string(st_us) + " µs not encodable");
}

bool is_exactly_encodable(std::int64_t st_us) noexcept {
  if (st_us < 1) return false;
  const int shift = std::min(std::countr_zero(static_cast<std::uint64_t>(st_us)), kMaxExponent);
  return (st_us >> shift) <= kMaxMantissa;
}

TwtSchedule schedule_from_tuple(const ScheduleTuple& tuple) {
  const double aa = tuple.aa_percent;
  if (!(aa > 0.0 && aa <= 100.0)) {
    throw DomainError("active airtime " + std::to_string(aa) + "% outside (0, 100]");
  }
  const std::int64_t wt = wt_from_mf(tuple.mf);
  const double raw_st = static_cast<double>(wt) * (100.0 - aa) / aa;
  const auto rounded = static_cast<std::int64_t>(std::llround(raw_st));
  if (rounded < 1) {
    throw QuantizationError("AA " + std::to_string(aa) +
                            "% needs a zero sleeptime, which the wake interval cannot express");
  }
  TwtSchedule s{wt, encode_wake_interval(rounded).decoded(), 0};
  if (std::abs(aa_of(s) - aa) > kAaTolerancePp) {
    throw QuantizationError("AA " + std::to_string(aa) + "% unreachable within 1 pp at MF " +
                            std::to_string(tuple.mf));
  }
  return s;
}

std::string to_string(ScheduleViolation v) {
  switch (v) {
    case ScheduleViolation::wt_not_quantized: return "waketime is not a multiple of 256 us";
    case ScheduleViolation::wt_below_minimum: return "waketime below 256 us";
    case ScheduleViolation::wt_exceeds_max: return "waketime exceeds WT_max (65280 us)";
    case ScheduleViolation::st_negative: return "sleeptime is negative";
    case ScheduleViolation::st_not_encodable: return "sleeptime is not mantissa * 2^exponent encodable";
    case ScheduleViolation::offset_negative: return "offset is negative";
  }
  return "unknown violation";
}

std::vector<ScheduleViolation> validate_schedule(const TwtSchedule& s) {
  std::vector<ScheduleViolation> out;
  if (s.waketime_us % kWtQuantumUs != 0) out.push_back(ScheduleViolation::wt_not_quantized);
  if (s.waketime_us < kWtQuantumUs) out.push_back(ScheduleViolation::wt_below_minimum);
  if (s.waketime_us > kWtMaxUs) out.push_back(ScheduleViolation::wt_exceeds_max);
  if (s.sleeptime_us < 0) {
    out.push_back(ScheduleViolation::st_negative);
  } else if (!is_exactly_encodable(s.sleeptime_us)) {
    out.push_back(ScheduleViolation::st_not_encodable);
  }
  if (s.offset_us < 0) out.push_back(ScheduleViolation::offset_negative);
  return out;
}

}  // namespace twt
