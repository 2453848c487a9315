#pragma once

#include "favorit/date.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace favorit {

/// One row of an agmarknet-style daily report. Prices are Rs/quintal,
/// arrivals are tonnes.
struct PriceRecord {
	Date date;
	std::string market;
	std::string commodity;
	std::optional<double> min_price;
	std::optional<double> max_price;
	double modal_price = 0.0;
	std::optional<double> arrivals;

	bool operator==(const PriceRecord &) const = default;
};

struct RowError {
	std::size_t line = 0; ///< 1-based physical line in the input, header is line 1
	std::string reason;
};

struct CsvSchema {
	DateFormat date_format = DateFormat::dd_mm_yyyy;
};

struct ParseResult {
	std::vector<PriceRecord> records;
	std::vector<RowError> errors;
	std::size_t rows = 0; ///< data rows seen (excluding header and blank lines)
};

/// Reads `date,market,commodity,min_price,max_price,modal_price,arrivals`
/// (column order free, header required). Malformed rows are reported with
/// their line number; the stream failing or a missing mandatory column
/// throws.
ParseResult parse_price_csv(std::istream &in, const CsvSchema &schema = {});

/// Inverse of parse_price_csv for the same schema.
std::string serialize_price_csv(std::span<const PriceRecord> records, const CsvSchema &schema = {});

/// Row accounting for one (market, commodity) series.
/// records_in == kept + merged + dropped_nonpositive.
struct CleaningReport {
	std::size_t records_in = 0;
	std::size_t dropped_nonpositive = 0;
	std::size_t merged = 0;
	std::size_t kept = 0;

	bool operator==(const CleaningReport &) const = default;
};

struct PricePoint {
	Date date;
	double price = 0.0;

	bool operator==(const PricePoint &) const = default;
};

/// Daily modal-price history of one commodity in one market. Dates are
/// strictly increasing and every price is positive.
class PriceSeries {
public:
	PriceSeries(std::string market, std::string commodity, std::vector<PricePoint> entries,
	            CleaningReport report = {});

	const std::string &market() const { return market_; }
	const std::string &commodity() const { return commodity_; }
	const std::vector<PricePoint> &entries() const { return entries_; }
	const CleaningReport &cleaning_report() const { return report_; }

	std::size_t size() const { return entries_.size(); }
	Date first_date() const { return entries_.front().date; }
	Date last_date() const { return entries_.back().date; }

	bool operator==(const PriceSeries &) const = default;

private:
	std::string market_;
	std::string commodity_;
	std::vector<PricePoint> entries_;
	CleaningReport report_;
};

/// ASCII case-insensitive comparison used for market and commodity lookups.
bool same_name(std::string_view a, std::string_view b);

/// Keeps records of (market, commodity), drops nonpositive prices, merges
/// same-date duplicates by arithmetic mean and sorts by date.
PriceSeries clean_series(std::span<const PriceRecord> records, std::string_view market,
                         std::string_view commodity);

enum class Granularity { month, week };

std::optional<Granularity> parse_granularity(std::string_view text);
std::string_view granularity_name(Granularity g);

/// Weekly periods are consecutive 7-day blocks starting on month/day of
/// each year; week k covers days [7(k-1), 7k) after the start.
struct WeekWindow {
	unsigned month = 9;
	unsigned day = 1;
	unsigned weeks = 8;

	bool operator==(const WeekWindow &) const = default;
};

/// Parses "MM-DD".
std::optional<WeekWindow> parse_window_start(std::string_view text, unsigned weeks);

struct PanelCell {
	double mean = 0.0;
	std::size_t count = 0;
};

/// (period, year) -> mean price. Periods are months 1..12 or weeks 1..K.
class SeasonalPanel {
public:
	using Key = std::pair<unsigned, int>; ///< (period, year)

	SeasonalPanel(Granularity granularity, std::optional<WeekWindow> window);

	Granularity granularity() const { return granularity_; }
	const std::optional<WeekWindow> &window() const { return window_; }
	const std::map<Key, PanelCell> &cells() const { return cells_; }

	unsigned period_count() const;
	std::string period_label(unsigned period) const;
	/// Period number for a label such as "July", "jul", "Week 3" or "3".
	std::optional<unsigned> period_from_label(std::string_view label) const;

	/// Periods with at least one populated cell, ascending.
	std::vector<unsigned> periods() const;
	std::vector<int> years() const;
	/// Yearly means for one period, ordered by year.
	std::vector<double> values_for_period(unsigned period) const;

	void set_cell(unsigned period, int year, PanelCell cell);

private:
	Granularity granularity_;
	std::optional<WeekWindow> window_;
	std::map<Key, PanelCell> cells_;
};

SeasonalPanel aggregate_panel(const PriceSeries &series, Granularity granularity,
                              std::optional<WeekWindow> window = std::nullopt);

struct YearExtremes {
	int year = 0;
	unsigned min_period = 0;
	double min_price = 0.0;
	unsigned max_period = 0;
	double max_price = 0.0;
	double ratio = 1.0; ///< max_price / min_price
};

/// Per-year lowest and highest monthly mean. Ties go to the earlier month.
std::vector<YearExtremes> extremes_by_year(const SeasonalPanel &panel);

/// Calendar-regular daily prices ending on `end()`.
struct DailyWindow {
	Date start;
	std::vector<double> values;
	std::size_t filled = 0; ///< days forward-filled from an earlier observation

	Date end() const { return start + static_cast<int>(values.size()) - 1; }
};

inline constexpr int kMaxFillGap = 3;

/// The last `length_days` calendar days ending at end_date, with gaps of at
/// most kMaxFillGap days forward-filled. Throws gap_too_large or
/// insufficient_data.
DailyWindow slice_recent(const PriceSeries &series, Date end_date, int length_days = 100);

/// Collection of series persisted as one CSV plus a JSON manifest.
struct Dataset {
	std::string source;
	std::vector<PriceSeries> series;

	/// Series for (market, commodity); throws not_found.
	const PriceSeries &find(std::string_view market, std::string_view commodity) const;
	bool has_market(std::string_view market) const;
	std::vector<std::string> markets() const;
	std::vector<std::string> commodities(std::string_view market) const;

	/// Content hash of the serialized price table, hex.
	std::string version() const;

	bool operator==(const Dataset &) const = default;
};

/// Ingest summary; rows == rejected + sum(records_in) over series.
struct IngestReport {
	std::size_t rows = 0;
	std::size_t rejected = 0;
	std::vector<RowError> errors;
};

/// Splits parsed records into one cleaned series per (market, commodity).
Dataset build_dataset(const ParseResult &parsed, std::string source, IngestReport *report = nullptr);

inline constexpr int kDatasetFormatVersion = 1;

/// Writes `<dir>/prices.csv` and `<dir>/manifest.json`.
void save_dataset(const std::filesystem::path &dir, const Dataset &dataset);
Dataset load_dataset(const std::filesystem::path &dir);

} // namespace favorit
