#pragma once

// JSON and CSV serialisation of the reports, and atomic file output.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "metaspec/chain.hpp"
#include "metaspec/paths.hpp"
#include "metaspec/spectral.hpp"

namespace metaspec::io {

using json = nlohmann::ordered_json;

/// {"re": .., "im": ..}
json to_json(complex z);
json to_json(const std::vector<complex>& v);
/// Array of rows.
json to_json(const Matrix& a);
json to_json(const SpectrumReport& r);
json to_json(const EigvecReport& e);
json to_json(const LimitGenerator& q);
json to_json(const PathStats& s);
json to_json(const WellRates& w);
json to_json(const std::vector<CharpolyRow>& rows);

/// Scientific notation with 17 significant digits; "NA" for NaN.
std::string format(double x);

/// Comment lines naming the library version and the resolved config.
std::string csv_preamble(const json& config);

/// Pretty-printed JSON with a trailing newline.
std::string dump(const json& j);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Version string compiled into the library.
const char* version();

}  // namespace metaspec::io
