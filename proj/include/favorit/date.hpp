#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace favorit {

/// Calendar day. Thin value wrapper around sys_days so arithmetic stays in
/// whole days and comparisons are total.
class Date {
public:
	constexpr Date() = default;
	constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
	Date(int year, unsigned month, unsigned day);

	static std::optional<Date> from_ymd(int year, unsigned month, unsigned day);

	std::chrono::year_month_day ymd() const { return std::chrono::year_month_day{days_}; }
	int year() const { return static_cast<int>(ymd().year()); }
	unsigned month() const { return static_cast<unsigned>(ymd().month()); }
	unsigned day() const { return static_cast<unsigned>(ymd().day()); }

	std::chrono::sys_days sys_days() const { return days_; }

	Date operator+(int n) const { return Date{days_ + std::chrono::days{n}}; }
	Date operator-(int n) const { return Date{days_ - std::chrono::days{n}}; }
	int operator-(const Date &other) const { return static_cast<int>((days_ - other.days_).count()); }
	Date &operator+=(int n) {
		days_ += std::chrono::days{n};
		return *this;
	}

	auto operator<=>(const Date &) const = default;

	/// ISO 8601 "YYYY-MM-DD".
	std::string iso() const;

private:
	std::chrono::sys_days days_{};
};

/// Supported textual date layouts. DD-MM-YYYY is the agmarknet default.
enum class DateFormat { dd_mm_yyyy, yyyy_mm_dd };

std::optional<DateFormat> parse_date_format(std::string_view name);
std::string_view date_format_name(DateFormat format);

/// Strict parse: exact field widths, '-' separators, valid calendar date.
std::optional<Date> parse_date(std::string_view text, DateFormat format);
std::string format_date(const Date &date, DateFormat format);

std::string_view month_name(unsigned month);
/// Case-insensitive full or three-letter month name, or 1..12.
std::optional<unsigned> parse_month(std::string_view text);

} // namespace favorit
