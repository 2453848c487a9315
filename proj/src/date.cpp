#include "favorit/date.hpp"

#include "favorit/error.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace favorit {

namespace {

constexpr std::array<std::string_view, 12> kMonthNames = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};

bool parse_fixed_digits(std::string_view text, std::size_t width, int &out) {
	if (text.size() != width) {
		return false;
	}
	for (char c : text) {
		if (c < '0' || c > '9') {
			return false;
		}
	}
	auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
	return ec == std::errc{} && ptr == text.data() + text.size();
}

bool iequals(std::string_view a, std::string_view b) {
	if (a.size() != b.size()) {
		return false;
	}
	for (std::size_t i = 0; i < a.size(); ++i) {
		if (std::tolower(static_cast<unsigned char>(a[i])) !=
		    std::tolower(static_cast<unsigned char>(b[i]))) {
			return false;
		}
	}
	return true;
}

} // namespace

Date::Date(int year, unsigned month, unsigned day) {
	auto parsed = from_ymd(year, month, day);
	if (!parsed) {
		throw Error(ErrorKind::invalid_argument, "invalid_date", "invalid calendar date");
	}
	*this = *parsed;
}

std::optional<Date> Date::from_ymd(int year, unsigned month, unsigned day) {
	const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
	                                      std::chrono::day{day}};
	if (!ymd.ok()) {
		return std::nullopt;
	}
	return Date{std::chrono::sys_days{ymd}};
}

std::string Date::iso() const { return format_date(*this, DateFormat::yyyy_mm_dd); }

std::optional<DateFormat> parse_date_format(std::string_view name) {
	if (iequals(name, "DD-MM-YYYY")) {
		return DateFormat::dd_mm_yyyy;
	}
	if (iequals(name, "YYYY-MM-DD")) {
		return DateFormat::yyyy_mm_dd;
	}
	return std::nullopt;
}

std::string_view date_format_name(DateFormat format) {
	return format == DateFormat::dd_mm_yyyy ? "DD-MM-YYYY" : "YYYY-MM-DD";
}

std::optional<Date> parse_date(std::string_view text, DateFormat format) {
	if (text.size() != 10) {
		return std::nullopt;
	}
	int year = 0;
	int month = 0;
	int day = 0;
	bool ok = false;
	if (format == DateFormat::dd_mm_yyyy) {
		ok = text[2] == '-' && text[5] == '-' && parse_fixed_digits(text.substr(0, 2), 2, day) &&
		     parse_fixed_digits(text.substr(3, 2), 2, month) &&
		     parse_fixed_digits(text.substr(6, 4), 4, year);
	} else {
		ok = text[4] == '-' && text[7] == '-' && parse_fixed_digits(text.substr(0, 4), 4, year) &&
		     parse_fixed_digits(text.substr(5, 2), 2, month) &&
		     parse_fixed_digits(text.substr(8, 2), 2, day);
	}
	if (!ok) {
		return std::nullopt;
	}
	return Date::from_ymd(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
}

std::string format_date(const Date &date, DateFormat format) {
	char buf[16];
	if (format == DateFormat::dd_mm_yyyy) {
		std::snprintf(buf, sizeof buf, "%02u-%02u-%04d", date.day(), date.month(), date.year());
	} else {
		std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", date.year(), date.month(), date.day());
	}
	return buf;
}

std::string_view month_name(unsigned month) {
	if (month < 1 || month > 12) {
		throw Error(ErrorKind::invalid_argument, "invalid_month", "month out of range");
	}
	return kMonthNames[month - 1];
}

std::optional<unsigned> parse_month(std::string_view text) {
	for (unsigned m = 1; m <= 12; ++m) {
		const auto name = kMonthNames[m - 1];
		if (iequals(text, name) || iequals(text, name.substr(0, 3))) {
			return m;
		}
	}
	int value = 0;
	auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
	if (ec == std::errc{} && ptr == text.data() + text.size() && value >= 1 && value <= 12) {
		return static_cast<unsigned>(value);
	}
	return std::nullopt;
}

} // namespace favorit
