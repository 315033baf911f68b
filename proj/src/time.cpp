#include "chronolens/time.hpp"

#include <chrono>
#include <cstdio>

#include "chronolens/errors.hpp"

namespace chronolens {

// Howard Hinnant's civil calendar algorithms (proleptic Gregorian).
Day days_from_civil(int year, unsigned month, unsigned day) noexcept {
  year -= month <= 2;
  const int era = (year >= 0 ? year : year - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(year - era * 400);
  const unsigned doy = (153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<Day>(era * 146097 + static_cast<int>(doe) - 719468);
}

CivilDate civil_from_days(Day z_in) noexcept {
  int z = z_in + 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int y = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {y + (m <= 2), m, d};
}

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(int y, unsigned m) {
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

class Cursor {
public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return done() ? '\0' : s_[pos_]; }
  bool eat(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  // Exactly n decimal digits.
  std::optional<int> digits(std::size_t n) {
    if (pos_ + n > s_.size()) return std::nullopt;
    int v = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const char c = s_[pos_ + i];
      if (c < '0' || c > '9') return std::nullopt;
      v = v * 10 + (c - '0');
    }
    pos_ += n;
    return v;
  }

private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

[[noreturn]] void bad(std::string_view text) {
  throw MalformedTimestamp("unparseable timestamp '" + std::string(text) + "'");
}

} // namespace

Timestamp parse_timestamp(std::string_view text) {
  Cursor c(text);
  auto y = c.digits(4);
  if (!y || !c.eat('-')) bad(text);
  auto mo = c.digits(2);
  if (!mo || !c.eat('-')) bad(text);
  auto d = c.digits(2);
  if (!d || *mo < 1 || *mo > 12 || *d < 1 || static_cast<unsigned>(*d) > days_in_month(*y, *mo)) bad(text);

  Timestamp seconds = 0;
  if (!c.done()) {
    if (!c.eat('T') && !c.eat(' ')) bad(text);
    auto h = c.digits(2);
    if (!h || !c.eat(':')) bad(text);
    auto mi = c.digits(2);
    if (!mi) bad(text);
    int s = 0;
    if (c.eat(':')) {
      auto sv = c.digits(2);
      if (!sv) bad(text);
      s = *sv;
      if (c.eat('.')) {
        bool any = false;
        while (c.peek() >= '0' && c.peek() <= '9') {
          c.digits(1);
          any = true;
        }
        if (!any) bad(text);
      }
    }
    if (*h > 23 || *mi > 59 || s > 60) bad(text);
    seconds = *h * 3600 + *mi * 60 + s;

    if (c.eat('Z')) {
    } else if (c.peek() == '+' || c.peek() == '-') {
      const int sign = c.peek() == '+' ? 1 : -1;
      c.eat(c.peek());
      auto oh = c.digits(2);
      if (!oh) bad(text);
      c.eat(':');
      auto om = c.digits(2);
      if (!om || *oh > 23 || *om > 59) bad(text);
      seconds -= sign * (*oh * 3600 + *om * 60);
    }
  }
  if (!c.done()) bad(text);
  return start_of(days_from_civil(*y, *mo, *d)) + seconds;
}

Timestamp parse_published_at(std::string_view text) {
  const Timestamp ts = parse_timestamp(text);
  const Timestamp lower = start_of(days_from_civil(1900, 1, 1));
  const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  if (ts < lower || ts > now + kSecondsPerDay)
    throw MalformedTimestamp("timestamp '" + std::string(text) + "' outside [1900-01-01, now + 1 day]");
  return ts;
}

std::string format_timestamp(Timestamp ts) {
  const Day d = day_of(ts);
  const auto cd = civil_from_days(d);
  const auto rem = ts - start_of(d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", cd.year, cd.month, cd.day,
                static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60), static_cast<int>(rem % 60));
  return buf;
}

std::string format_day(Day day) {
  const auto cd = civil_from_days(day);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", cd.year, cd.month, cd.day);
  return buf;
}

Day parse_day(std::string_view text) {
  if (text.size() != 10) bad(text);
  return day_of(parse_timestamp(text));
}

DaySpan span_from_timestamps(Timestamp from, Timestamp to) {
  if (from > to) throw InvalidSpan("span start " + format_timestamp(from) + " is after end " + format_timestamp(to));
  return {day_of(from), day_of(to)};
}

Granularity parse_granularity(std::string_view text) {
  if (text == "day") return Granularity::day;
  if (text == "month") return Granularity::month;
  if (text == "year") return Granularity::year;
  throw MalformedInput("unknown granularity '" + std::string(text) + "'");
}

std::string_view to_string(Granularity g) noexcept {
  switch (g) {
    case Granularity::day: return "day";
    case Granularity::month: return "month";
    case Granularity::year: return "year";
  }
  return "day";
}

Day bucket_start(Day d, Granularity g) noexcept {
  if (g == Granularity::day) return d;
  const auto cd = civil_from_days(d);
  return days_from_civil(cd.year, g == Granularity::month ? cd.month : 1, 1);
}

Day next_bucket(Day start, Granularity g) noexcept {
  if (g == Granularity::day) return start + 1;
  const auto cd = civil_from_days(start);
  if (g == Granularity::year) return days_from_civil(cd.year + 1, 1, 1);
  return cd.month == 12 ? days_from_civil(cd.year + 1, 1, 1) : days_from_civil(cd.year, cd.month + 1, 1);
}

std::string bucket_label(Day start, Granularity g) {
  const auto label = format_day(start);
  switch (g) {
    case Granularity::day: return label;
    case Granularity::month: return label.substr(0, 7);
    case Granularity::year: return label.substr(0, 4);
  }
  return label;
}

} // namespace chronolens
