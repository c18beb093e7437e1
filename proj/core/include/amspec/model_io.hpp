#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "amspec/circle_diffeo.hpp"
#include "amspec/fourier_series.hpp"
#include "amspec/twist_model.hpp"

namespace amspec {

/// {"n_modes": N, "re": [...], "im": [...]} with coefficients k = -N..N.
nlohmann::json to_json(const FourierSeries& s);
FourierSeries series_from_json(const nlohmann::json& j);

/// {"mean": m, "series": {...}}.
nlohmann::json to_json(const OffsetSeries& s);
OffsetSeries offset_series_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TwistModel& model);
/// Rebuilds the model and recomputes residuals from the stored series; the
/// residuals recorded in the file are ignored. Throws InvalidArgument on
/// malformed input.
TwistModel model_from_json(const nlohmann::json& j);

void save_model(const TwistModel& model, const std::string& path);
TwistModel load_model(const std::string& path);

/// FNV-1a 64-bit hash of a file's bytes, as 16 hex digits.
std::string file_hash(const std::string& path);

}  // namespace amspec
