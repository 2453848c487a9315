#include "favorit/market_data.hpp"

#include "favorit/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

namespace favorit {

namespace {

std::string_view trim(std::string_view s) {
	while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
		s.remove_prefix(1);
	}
	while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
		s.remove_suffix(1);
	}
	return s;
}

std::string lower(std::string_view s) {
	std::string out(s);
	std::transform(out.begin(), out.end(), out.begin(),
	               [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
	return out;
}

// Splits one CSV line; double quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_csv_line(std::string_view line) {
	std::vector<std::string> fields;
	std::string field;
	bool quoted = false;
	for (std::size_t i = 0; i < line.size(); ++i) {
		const char c = line[i];
		if (quoted) {
			if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
				field.push_back('"');
				++i;
			} else if (c == '"') {
				quoted = false;
			} else {
				field.push_back(c);
			}
		} else if (c == '"') {
			quoted = true;
		} else if (c == ',') {
			fields.push_back(std::move(field));
			field.clear();
		} else {
			field.push_back(c);
		}
	}
	fields.push_back(std::move(field));
	return fields;
}

std::optional<double> parse_number(std::string_view text) {
	text = trim(text);
	if (text.empty()) {
		return std::nullopt;
	}
	double value = 0.0;
	auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
	if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
		return std::nullopt;
	}
	return value;
}

std::string format_number(double value) {
	char buf[64];
	auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
	return std::string(buf, ptr);
}

std::string quote_if_needed(const std::string &s) {
	if (s.find_first_of(",\"") == std::string::npos) {
		return s;
	}
	std::string out = "\"";
	for (char c : s) {
		if (c == '"') {
			out += "\"\"";
		} else {
			out.push_back(c);
		}
	}
	out.push_back('"');
	return out;
}

enum Column { kDate, kMarket, kCommodity, kMin, kMax, kModal, kArrivals, kColumnCount };

constexpr std::string_view kColumnNames[kColumnCount] = {
    "date", "market", "commodity", "min_price", "max_price", "modal_price", "arrivals"};

std::uint64_t fnv1a(std::string_view data) {
	std::uint64_t h = 14695981039346656037ull;
	for (unsigned char c : data) {
		h ^= c;
		h *= 1099511628211ull;
	}
	return h;
}

std::vector<PriceRecord> to_records(const PriceSeries &s) {
	std::vector<PriceRecord> out;
	out.reserve(s.size());
	for (const auto &e : s.entries()) {
		PriceRecord r;
		r.date = e.date;
		r.market = s.market();
		r.commodity = s.commodity();
		r.modal_price = e.price;
		out.push_back(std::move(r));
	}
	return out;
}

std::string dataset_csv(const Dataset &dataset) {
	std::vector<PriceRecord> all;
	for (const auto &s : dataset.series) {
		auto part = to_records(s);
		all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
	}
	return serialize_price_csv(all);
}

} // namespace

ParseResult parse_price_csv(std::istream &in, const CsvSchema &schema) {
	if (!in) {
		throw Error(ErrorKind::io, "unreadable_stream", "input stream is not readable");
	}
	ParseResult result;
	std::string line;
	std::size_t line_no = 0;

	int index[kColumnCount];
	std::fill(std::begin(index), std::end(index), -1);
	bool have_header = false;

	while (std::getline(in, line)) {
		++line_no;
		if (!line.empty() && line.back() == '\r') {
			line.pop_back();
		}
		if (trim(line).empty()) {
			continue;
		}
		const auto fields = split_csv_line(line);
		if (!have_header) {
			for (std::size_t i = 0; i < fields.size(); ++i) {
				const auto name = lower(trim(fields[i]));
				for (int c = 0; c < kColumnCount; ++c) {
					if (name == kColumnNames[c]) {
						index[c] = static_cast<int>(i);
					}
				}
			}
			for (int c : {kDate, kMarket, kCommodity, kModal}) {
				if (index[c] < 0) {
					throw Error(ErrorKind::format, "missing_column",
					            "missing mandatory column '" + std::string(kColumnNames[c]) + "'");
				}
			}
			have_header = true;
			continue;
		}

		++result.rows;
		auto fail = [&](std::string reason) { result.errors.push_back({line_no, std::move(reason)}); };
		auto field = [&](int c) -> std::string_view {
			return index[c] >= 0 && static_cast<std::size_t>(index[c]) < fields.size()
			           ? trim(fields[static_cast<std::size_t>(index[c])])
			           : std::string_view{};
		};

		int required = 0;
		for (int idx : index) {
			required = std::max(required, idx + 1);
		}
		if (fields.size() < static_cast<std::size_t>(required)) {
			fail("column count");
			continue;
		}

		PriceRecord rec;
		auto date = parse_date(field(kDate), schema.date_format);
		if (!date) {
			fail("date format");
			continue;
		}
		rec.date = *date;
		rec.market = std::string(field(kMarket));
		rec.commodity = std::string(field(kCommodity));
		if (rec.market.empty() || rec.commodity.empty()) {
			fail("empty market or commodity");
			continue;
		}

		auto modal = parse_number(field(kModal));
		if (!modal) {
			fail("invalid modal price");
			continue;
		}
		if (*modal <= 0.0) {
			fail("nonpositive price");
			continue;
		}
		rec.modal_price = *modal;

		bool bad_optional = false;
		auto optional_number = [&](int c) -> std::optional<double> {
			const auto text = field(c);
			if (text.empty()) {
				return std::nullopt;
			}
			auto v = parse_number(text);
			if (!v) {
				bad_optional = true;
			}
			return v;
		};
		rec.min_price = optional_number(kMin);
		rec.max_price = optional_number(kMax);
		rec.arrivals = optional_number(kArrivals);
		if (bad_optional) {
			fail("invalid number");
			continue;
		}
		if (rec.min_price && rec.max_price &&
		    !(*rec.min_price <= rec.modal_price && rec.modal_price <= *rec.max_price)) {
			fail("modal price outside min/max");
			continue;
		}
		result.records.push_back(std::move(rec));
	}
	if (in.bad()) {
		throw Error(ErrorKind::io, "unreadable_stream", "error while reading input stream");
	}
	if (!have_header) {
		throw Error(ErrorKind::format, "missing_header", "input has no header row");
	}
	return result;
}

std::string serialize_price_csv(std::span<const PriceRecord> records, const CsvSchema &schema) {
	std::string out = "date,market,commodity,min_price,max_price,modal_price,arrivals\n";
	auto opt = [](const std::optional<double> &v) { return v ? format_number(*v) : std::string{}; };
	for (const auto &r : records) {
		out += format_date(r.date, schema.date_format);
		out += ',';
		out += quote_if_needed(r.market);
		out += ',';
		out += quote_if_needed(r.commodity);
		out += ',';
		out += opt(r.min_price);
		out += ',';
		out += opt(r.max_price);
		out += ',';
		out += format_number(r.modal_price);
		out += ',';
		out += opt(r.arrivals);
		out += '\n';
	}
	return out;
}

PriceSeries::PriceSeries(std::string market, std::string commodity, std::vector<PricePoint> entries,
                         CleaningReport report)
    : market_(std::move(market)), commodity_(std::move(commodity)), entries_(std::move(entries)),
      report_(report) {
	if (entries_.empty()) {
		throw Error(ErrorKind::insufficient_data, "empty_series", "empty series");
	}
	for (std::size_t i = 0; i < entries_.size(); ++i) {
		if (!(entries_[i].price > 0.0) || !std::isfinite(entries_[i].price)) {
			throw Error(ErrorKind::invalid_argument, "nonpositive_price", "series price must be positive");
		}
		if (i > 0 && !(entries_[i - 1].date < entries_[i].date)) {
			throw Error(ErrorKind::invalid_argument, "unordered_series",
			            "series dates must be strictly increasing");
		}
	}
}

bool same_name(std::string_view a, std::string_view b) {
	if (a.size() != b.size()) {
		return false;
	}
	for (std::size_t i = 0; i < a.size(); ++i) {
		if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) {
			return false;
		}
	}
	return true;
}

PriceSeries clean_series(std::span<const PriceRecord> records, std::string_view market,
                         std::string_view commodity) {
	CleaningReport report;
	std::string market_name(market);
	std::string commodity_name(commodity);
	std::map<Date, std::pair<double, std::size_t>> by_date;
	bool named = false;
	for (const auto &r : records) {
		if (!same_name(r.market, market) || !same_name(r.commodity, commodity)) {
			continue;
		}
		if (!named) {
			market_name = r.market;
			commodity_name = r.commodity;
			named = true;
		}
		++report.records_in;
		if (!(r.modal_price > 0.0) || !std::isfinite(r.modal_price)) {
			++report.dropped_nonpositive;
			continue;
		}
		auto &slot = by_date[r.date];
		slot.first += r.modal_price;
		++slot.second;
	}
	if (by_date.empty()) {
		throw Error(ErrorKind::insufficient_data, "empty_series",
		            "empty series for " + market_name + "/" + commodity_name);
	}
	std::vector<PricePoint> entries;
	entries.reserve(by_date.size());
	for (const auto &[date, acc] : by_date) {
		entries.push_back({date, acc.first / static_cast<double>(acc.second)});
		report.merged += acc.second - 1;
	}
	report.kept = entries.size();
	return PriceSeries(std::move(market_name), std::move(commodity_name), std::move(entries), report);
}

std::optional<Granularity> parse_granularity(std::string_view text) {
	if (same_name(text, "month")) {
		return Granularity::month;
	}
	if (same_name(text, "week")) {
		return Granularity::week;
	}
	return std::nullopt;
}

std::string_view granularity_name(Granularity g) { return g == Granularity::month ? "month" : "week"; }

std::optional<WeekWindow> parse_window_start(std::string_view text, unsigned weeks) {
	if (text.size() != 5 || text[2] != '-' || weeks == 0) {
		return std::nullopt;
	}
	auto month = parse_month(text.substr(0, 2));
	int day = 0;
	auto [ptr, ec] = std::from_chars(text.data() + 3, text.data() + 5, day);
	if (!month || ec != std::errc{} || ptr != text.data() + 5) {
		return std::nullopt;
	}
	// 29 February would not exist in most years.
	if (!Date::from_ymd(2001, *month, static_cast<unsigned>(day))) {
		return std::nullopt;
	}
	return WeekWindow{*month, static_cast<unsigned>(day), weeks};
}

SeasonalPanel::SeasonalPanel(Granularity granularity, std::optional<WeekWindow> window)
    : granularity_(granularity), window_(window) {
	if (granularity_ == Granularity::week) {
		if (!window_ || window_->weeks == 0 || !Date::from_ymd(2001, window_->month, window_->day)) {
			throw Error(ErrorKind::invalid_argument, "invalid_window",
			            "week granularity needs a window start (not 29 Feb) and a positive week count");
		}
	} else {
		window_.reset();
	}
}

unsigned SeasonalPanel::period_count() const {
	return granularity_ == Granularity::month ? 12u : window_->weeks;
}

std::string SeasonalPanel::period_label(unsigned period) const {
	if (period < 1 || period > period_count()) {
		throw Error(ErrorKind::invalid_argument, "invalid_period", "period out of range");
	}
	if (granularity_ == Granularity::month) {
		return std::string(month_name(period));
	}
	return "Week " + std::to_string(period);
}

std::optional<unsigned> SeasonalPanel::period_from_label(std::string_view label) const {
	label = trim(label);
	std::optional<unsigned> p;
	if (granularity_ == Granularity::month) {
		p = parse_month(label);
	} else {
		if (label.size() > 5 && same_name(label.substr(0, 5), "week ")) {
			label.remove_prefix(5);
		}
		unsigned v = 0;
		auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), v);
		if (ec == std::errc{} && ptr == label.data() + label.size()) {
			p = v;
		}
	}
	if (p && *p >= 1 && *p <= period_count()) {
		return p;
	}
	return std::nullopt;
}

std::vector<unsigned> SeasonalPanel::periods() const {
	std::vector<unsigned> out;
	for (const auto &[key, cell] : cells_) {
		if (out.empty() || out.back() != key.first) {
			out.push_back(key.first);
		}
	}
	return out;
}

std::vector<int> SeasonalPanel::years() const {
	std::vector<int> out;
	for (const auto &[key, cell] : cells_) {
		out.push_back(key.second);
	}
	std::sort(out.begin(), out.end());
	out.erase(std::unique(out.begin(), out.end()), out.end());
	return out;
}

std::vector<double> SeasonalPanel::values_for_period(unsigned period) const {
	std::vector<double> out;
	for (auto it = cells_.lower_bound({period, std::numeric_limits<int>::min()});
	     it != cells_.end() && it->first.first == period; ++it) {
		out.push_back(it->second.mean);
	}
	return out;
}

void SeasonalPanel::set_cell(unsigned period, int year, PanelCell cell) {
	if (period < 1 || period > period_count()) {
		throw Error(ErrorKind::invalid_argument, "invalid_period", "period out of range");
	}
	if (cell.count == 0) {
		throw Error(ErrorKind::invalid_argument, "empty_cell", "panel cells need at least one observation");
	}
	cells_[{period, year}] = cell;
}

SeasonalPanel aggregate_panel(const PriceSeries &series, Granularity granularity,
                              std::optional<WeekWindow> window) {
	SeasonalPanel panel(granularity, window);
	std::map<SeasonalPanel::Key, std::pair<double, std::size_t>> sums;
	for (const auto &e : series.entries()) {
		if (granularity == Granularity::month) {
			auto &acc = sums[{e.date.month(), e.date.year()}];
			acc.first += e.price;
			++acc.second;
			continue;
		}
		// A window starting late in the year may spill into the next one.
		for (int y : {e.date.year(), e.date.year() - 1}) {
			const Date start(y, panel.window()->month, panel.window()->day);
			const int offset = e.date - start;
			if (offset < 0) {
				continue;
			}
			const auto week = static_cast<unsigned>(offset / 7) + 1;
			if (week <= panel.window()->weeks) {
				auto &acc = sums[{week, y}];
				acc.first += e.price;
				++acc.second;
				break;
			}
		}
	}
	for (const auto &[key, acc] : sums) {
		panel.set_cell(key.first, key.second, {acc.first / static_cast<double>(acc.second), acc.second});
	}
	return panel;
}

std::vector<YearExtremes> extremes_by_year(const SeasonalPanel &panel) {
	if (panel.granularity() != Granularity::month) {
		throw Error(ErrorKind::invalid_argument, "granularity", "extremes require a monthly panel");
	}
	std::map<int, YearExtremes> by_year;
	// cells() iterates by (period, year), so the first hit per year is the
	// earliest month and strict comparisons keep ties on the earlier month.
	for (const auto &[key, cell] : panel.cells()) {
		const auto [period, year] = key;
		auto [it, inserted] = by_year.try_emplace(year);
		auto &x = it->second;
		if (inserted) {
			x = {year, period, cell.mean, period, cell.mean, 1.0};
			continue;
		}
		if (cell.mean < x.min_price) {
			x.min_price = cell.mean;
			x.min_period = period;
		}
		if (cell.mean > x.max_price) {
			x.max_price = cell.mean;
			x.max_period = period;
		}
	}
	std::vector<YearExtremes> out;
	for (auto &[year, x] : by_year) {
		x.ratio = x.max_price / x.min_price;
		out.push_back(x);
	}
	return out;
}

DailyWindow slice_recent(const PriceSeries &series, Date end_date, int length_days) {
	if (length_days < 1) {
		throw Error(ErrorKind::invalid_argument, "invalid_length", "window length must be positive");
	}
	const Date start = end_date - (length_days - 1);
	const auto &entries = series.entries();
	auto first_in = std::lower_bound(entries.begin(), entries.end(), start,
	                                 [](const PricePoint &p, const Date &d) { return p.date < d; });

	// Need an observation on or before the window start to seed the fill.
	auto cursor = first_in;
	if (cursor == entries.end() || cursor->date != start) {
		if (cursor == entries.begin()) {
			throw Error(ErrorKind::insufficient_data, "insufficient_history",
			            "series does not cover " + std::to_string(length_days) + " days ending " +
			                end_date.iso());
		}
		--cursor;
	}

	DailyWindow out;
	out.start = start;
	out.values.reserve(static_cast<std::size_t>(length_days));
	Date last_seen = cursor->date;
	double last_price = cursor->price;
	for (Date day = start; day <= end_date; day += 1) {
		while (cursor != entries.end() && cursor->date < day) {
			++cursor;
		}
		if (cursor != entries.end() && cursor->date == day) {
			last_seen = day;
			last_price = cursor->price;
			out.values.push_back(last_price);
			continue;
		}
		if (day - last_seen > kMaxFillGap) {
			throw Error(ErrorKind::gap_too_large, "gap_too_large",
			            "gap too large: no price for more than " + std::to_string(kMaxFillGap) +
			                " days before " + day.iso());
		}
		out.values.push_back(last_price);
		++out.filled;
	}
	return out;
}

const PriceSeries &Dataset::find(std::string_view market, std::string_view commodity) const {
	for (const auto &s : series) {
		if (same_name(s.market(), market) && same_name(s.commodity(), commodity)) {
			return s;
		}
	}
	if (!has_market(market)) {
		throw Error(ErrorKind::not_found, "unknown_market", "no data for market " + std::string(market));
	}
	throw Error(ErrorKind::not_found, "unknown_commodity",
	            "no data for commodity " + std::string(commodity) + " in market " + std::string(market));
}

bool Dataset::has_market(std::string_view market) const {
	return std::any_of(series.begin(), series.end(),
	                   [&](const PriceSeries &s) { return same_name(s.market(), market); });
}

std::vector<std::string> Dataset::markets() const {
	std::vector<std::string> out;
	for (const auto &s : series) {
		if (std::none_of(out.begin(), out.end(), [&](const std::string &m) { return same_name(m, s.market()); })) {
			out.push_back(s.market());
		}
	}
	std::sort(out.begin(), out.end());
	return out;
}

std::vector<std::string> Dataset::commodities(std::string_view market) const {
	std::vector<std::string> out;
	for (const auto &s : series) {
		if (same_name(s.market(), market)) {
			out.push_back(s.commodity());
		}
	}
	std::sort(out.begin(), out.end());
	return out;
}

std::string Dataset::version() const {
	char buf[17];
	std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(dataset_csv(*this))));
	return buf;
}

Dataset build_dataset(const ParseResult &parsed, std::string source, IngestReport *report) {
	Dataset dataset;
	dataset.source = std::move(source);
	std::vector<std::pair<std::string, std::string>> keys;
	for (const auto &r : parsed.records) {
		const bool seen = std::any_of(keys.begin(), keys.end(), [&](const auto &k) {
			return same_name(k.first, r.market) && same_name(k.second, r.commodity);
		});
		if (!seen) {
			keys.emplace_back(r.market, r.commodity);
		}
	}
	for (const auto &[market, commodity] : keys) {
		dataset.series.push_back(clean_series(parsed.records, market, commodity));
	}
	if (report) {
		report->rows = parsed.rows;
		report->rejected = parsed.errors.size();
		report->errors = parsed.errors;
	}
	return dataset;
}

void save_dataset(const std::filesystem::path &dir, const Dataset &dataset) {
	std::error_code ec;
	std::filesystem::create_directories(dir, ec);
	if (ec) {
		throw Error(ErrorKind::io, "io_error", "cannot create " + dir.string() + ": " + ec.message());
	}
	nlohmann::json reports = nlohmann::json::array();
	for (const auto &s : dataset.series) {
		const auto &r = s.cleaning_report();
		reports.push_back({{"market", s.market()},
		                   {"commodity", s.commodity()},
		                   {"records_in", r.records_in},
		                   {"dropped_nonpositive", r.dropped_nonpositive},
		                   {"merged", r.merged},
		                   {"kept", r.kept}});
	}
	const nlohmann::json manifest = {{"format_version", kDatasetFormatVersion},
	                                 {"source", dataset.source},
	                                 {"date_format", date_format_name(DateFormat::dd_mm_yyyy)},
	                                 {"cleaning_report", reports}};

	std::ofstream csv(dir / "prices.csv", std::ios::binary);
	csv << dataset_csv(dataset);
	std::ofstream man(dir / "manifest.json", std::ios::binary);
	man << manifest.dump(2) << '\n';
	if (!csv || !man) {
		throw Error(ErrorKind::io, "io_error", "failed writing dataset to " + dir.string());
	}
}

Dataset load_dataset(const std::filesystem::path &dir) {
	std::ifstream man(dir / "manifest.json", std::ios::binary);
	if (!man) {
		throw Error(ErrorKind::not_found, "dataset_not_found", "no dataset manifest at " + dir.string());
	}
	nlohmann::json manifest;
	try {
		man >> manifest;
	} catch (const nlohmann::json::exception &e) {
		throw Error(ErrorKind::format, "corrupt_dataset", std::string("corrupt manifest: ") + e.what());
	}
	if (!manifest.is_object() || !manifest.contains("format_version") ||
	    !manifest["format_version"].is_number_integer()) {
		throw Error(ErrorKind::format, "corrupt_dataset", "corrupt manifest: missing format_version");
	}
	const int version = manifest["format_version"].get<int>();
	if (version != kDatasetFormatVersion) {
		throw Error(ErrorKind::unsupported_version, "unsupported_version",
		            "unsupported version " + std::to_string(version));
	}

	Dataset dataset;
	CsvSchema schema;
	try {
		dataset.source = manifest.value("source", std::string{});
		if (auto fmt = parse_date_format(manifest.value("date_format", std::string("DD-MM-YYYY")))) {
			schema.date_format = *fmt;
		} else {
			throw Error(ErrorKind::format, "corrupt_dataset", "corrupt manifest: unknown date_format");
		}
	} catch (const nlohmann::json::exception &e) {
		throw Error(ErrorKind::format, "corrupt_dataset", std::string("corrupt manifest: ") + e.what());
	}

	std::ifstream csv(dir / "prices.csv", std::ios::binary);
	if (!csv) {
		throw Error(ErrorKind::format, "corrupt_dataset", "dataset is missing prices.csv");
	}
	ParseResult parsed = parse_price_csv(csv, schema);
	if (!parsed.errors.empty()) {
		throw Error(ErrorKind::format, "corrupt_dataset",
		            "corrupt prices.csv at line " + std::to_string(parsed.errors.front().line) + ": " +
		                parsed.errors.front().reason);
	}
	Dataset rebuilt = build_dataset(parsed, dataset.source);
	dataset.series.reserve(rebuilt.series.size());

	const auto reports = manifest.value("cleaning_report", nlohmann::json::array());
	for (auto &s : rebuilt.series) {
		CleaningReport report = s.cleaning_report();
		for (const auto &r : reports) {
			if (r.value("market", "") == s.market() && r.value("commodity", "") == s.commodity()) {
				report.records_in = r.value("records_in", report.records_in);
				report.dropped_nonpositive = r.value("dropped_nonpositive", report.dropped_nonpositive);
				report.merged = r.value("merged", report.merged);
				report.kept = r.value("kept", report.kept);
			}
		}
		dataset.series.emplace_back(s.market(), s.commodity(), s.entries(), report);
	}
	return dataset;
}

} // namespace favorit
