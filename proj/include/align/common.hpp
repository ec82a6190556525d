#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace align {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Error taxonomy shared by all modules. CLI maps ValidationError-family to
// exit code 1 and IoError to exit code 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct FormatError : Error {
    using Error::Error;
};

struct ManifestError : Error {
    using Error::Error;
};

struct DegenerateInput : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct RetryableError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

enum class Modality { text, vision, audio, fused };

std::string_view modality_name(Modality m);
Modality modality_from_name(std::string_view name);

enum class Metric { cka, cknna, svcca, cycle_knn, mutual_knn, lcs_knn, edit_knn };

inline constexpr Metric kAllMetrics[] = {
    Metric::cka,        Metric::cknna,   Metric::svcca,    Metric::cycle_knn,
    Metric::mutual_knn, Metric::lcs_knn, Metric::edit_knn,
};

std::string_view metric_name(Metric m);
Metric metric_from_name(std::string_view name);

// One metric evaluation. `value` lies in [0,1] for every metric except
// lcs_knn, which is reported unnormalized in [0,k]. `k` is set for the
// neighbor-parameterized metrics, `degenerate` marks defined zero-value
// outcomes (e.g. an empty mutual-neighbor mask in cknna).
struct AlignmentScore {
    Metric metric;
    double value = 0.0;
    std::optional<int> k;
    bool degenerate = false;
};

}  // namespace align
