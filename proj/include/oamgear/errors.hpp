#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oamgear {

enum class ErrorCode {
    zero_norm,
    unsupported_input,
    all_zero_image,
    empty_annulus,
    flat_profile,
    insufficient_samples,
    unwrap_ambiguity,
    io_failure,
    config,
    malformed_csv,
    invalid_argument,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::zero_norm: return "ZeroNorm";
    case ErrorCode::unsupported_input: return "UnsupportedInput";
    case ErrorCode::all_zero_image: return "AllZeroImage";
    case ErrorCode::empty_annulus: return "EmptyAnnulus";
    case ErrorCode::flat_profile: return "FlatProfile";
    case ErrorCode::insufficient_samples: return "InsufficientSamples";
    case ErrorCode::unwrap_ambiguity: return "UnwrapAmbiguity";
    case ErrorCode::io_failure: return "IoFailure";
    case ErrorCode::config: return "ConfigError";
    case ErrorCode::malformed_csv: return "MalformedCsv";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace oamgear
