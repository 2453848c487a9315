#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace favorit {

/// Failure categories shared by the library, the CLI exit codes and the
/// HTTP status mapping.
enum class ErrorKind {
	invalid_argument,  ///< caller supplied a bad parameter
	not_found,         ///< unknown market, commodity, period or path
	insufficient_data, ///< too few observations for the requested analysis
	gap_too_large,     ///< calendar gap inside a forecast window
	format,            ///< malformed input file or header
	unsupported_version,
	io,
};

class Error : public std::runtime_error {
public:
	Error(ErrorKind kind, std::string code, const std::string &message)
	    : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

	ErrorKind kind() const noexcept { return kind_; }

	/// Stable machine-readable code, e.g. "gap_too_large".
	const std::string &code() const noexcept { return code_; }

private:
	ErrorKind kind_;
	std::string code_;
};

} // namespace favorit
