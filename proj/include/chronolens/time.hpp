#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chronolens {

/// Seconds since 1970-01-01T00:00:00Z.
using Timestamp = std::int64_t;

/// UTC day number, days since 1970-01-01. The finest time bucket.
using Day = std::int32_t;

inline constexpr std::int64_t kSecondsPerDay = 86400;

struct CivilDate {
  int year;
  unsigned month;
  unsigned day;
};

Day days_from_civil(int year, unsigned month, unsigned day) noexcept;
CivilDate civil_from_days(Day day) noexcept;

inline Day day_of(Timestamp ts) noexcept {
  auto d = ts / kSecondsPerDay;
  if (ts % kSecondsPerDay < 0) --d;
  return static_cast<Day>(d);
}

inline Timestamp start_of(Day day) noexcept { return static_cast<Timestamp>(day) * kSecondsPerDay; }

/// Accepts `YYYY-MM-DD` and `YYYY-MM-DD[T ]HH:MM[:SS[.frac]][Z|+HH:MM|-HH:MM|+HHMM]`.
/// Values without an offset are taken as UTC. Throws MalformedTimestamp.
Timestamp parse_timestamp(std::string_view text);

/// Timestamp parsing plus the corpus range check [1900-01-01, now + 1 day].
Timestamp parse_published_at(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_timestamp(Timestamp ts);
/// `YYYY-MM-DD`
std::string format_day(Day day);
/// Strict `YYYY-MM-DD`; throws MalformedTimestamp.
Day parse_day(std::string_view text);

/// Inclusive day range.
struct DaySpan {
  Day from;
  Day to;

  bool contains(Day d) const noexcept { return d >= from && d <= to; }
  friend bool operator==(const DaySpan&, const DaySpan&) = default;
};

/// Absent span means the whole archive.
using OptionalSpan = std::optional<DaySpan>;

inline bool in_span(const OptionalSpan& span, Day d) noexcept { return !span || span->contains(d); }

/// Builds a day span from inclusive timestamps; throws InvalidSpan when from > to.
DaySpan span_from_timestamps(Timestamp from, Timestamp to);

enum class Granularity { day, month, year };

Granularity parse_granularity(std::string_view text);
std::string_view to_string(Granularity g) noexcept;

/// First day of the bucket containing `d`.
Day bucket_start(Day d, Granularity g) noexcept;
/// First day of the bucket after the one starting at `start`.
Day next_bucket(Day start, Granularity g) noexcept;
/// `YYYY-MM-DD`, `YYYY-MM` or `YYYY`.
std::string bucket_label(Day start, Granularity g);

} // namespace chronolens
