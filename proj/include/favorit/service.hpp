#pragma once

#include "favorit/json_io.hpp"
#include "favorit/market_data.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace httplib {
class Server;
}

namespace favorit {

inline constexpr std::string_view kVersion = "0.1.0";

struct ServiceConfig {
	std::string host = "127.0.0.1";
	int port = 8080;
	std::uint64_t seed = 20211;
	std::size_t replicates = kDefaultReplicates;
	int fit_len = 100;
	std::string cors_origin = "*";
	std::optional<std::filesystem::path> static_dir;
};

/// Reads a JSON config file; absent keys keep their defaults.
ServiceConfig load_service_config(const std::filesystem::path &path);

/// Parses "HOST:PORT" or ":PORT" into the config.
void apply_listen(ServiceConfig &config, std::string_view listen);

struct HttpResponse {
	int status = 200;
	std::string body;
};

using QueryParams = std::map<std::string, std::string>;

/// Read-only JSON API over an immutable dataset snapshot. handle() is
/// thread-safe; the forecast cache is the only shared mutable state.
class Service {
public:
	Service(Dataset dataset, ServiceConfig config);

	HttpResponse handle(std::string_view method, std::string_view path, const QueryParams &query,
	                    std::string_view body) const;

	/// Blocks serving HTTP on config().host:config().port.
	void serve() const;

	const ServiceConfig &config() const { return config_; }
	const Dataset &dataset() const { return dataset_; }
	const std::string &dataset_version() const { return dataset_version_; }
	std::size_t cached_forecasts() const;

private:
	Json meta() const;
	Json get_markets() const;
	Json get_commodities(const QueryParams &q) const;
	Json get_intervals(const QueryParams &q) const;
	Json get_ranking(const QueryParams &q) const;
	Json post_advise(const Json &body) const;
	Json get_forecast(const QueryParams &q) const;
	Json post_backtest(const Json &body) const;

	Dataset dataset_;
	ServiceConfig config_;
	std::string dataset_version_;

	mutable std::mutex cache_mutex_;
	mutable std::map<std::string, std::string> forecast_cache_;
};

/// HTTP binding for a Service: /v1 routes, CORS headers and the optional
/// static-file mount.
class HttpFrontend {
public:
	explicit HttpFrontend(const Service &service);
	~HttpFrontend();
	HttpFrontend(const HttpFrontend &) = delete;
	HttpFrontend &operator=(const HttpFrontend &) = delete;

	/// Binds host:port; port 0 picks a free port. Returns the bound port.
	int bind(const std::string &host, int port);
	/// Blocks until stop() is called.
	void run();
	void stop();

private:
	std::unique_ptr<httplib::Server> server_;
};

} // namespace favorit
