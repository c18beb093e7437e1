#include "amspec/model_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>

#include "amspec/error.hpp"

namespace amspec {

using nlohmann::json;

json to_json(const FourierSeries& s) {
  json re = json::array();
  json im = json::array();
  for (const cplx& c : s.coefficients()) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  return {{"n_modes", s.n_modes()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

FourierSeries series_from_json(const json& j) {
  try {
    const int n = j.at("n_modes").get<int>();
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    const std::size_t size = 2 * static_cast<std::size_t>(n) + 1;
    if (n < 0 || re.size() != size || im.size() != size) {
      throw Error(ErrorCode::InvalidArgument, "series coefficient arrays do not match n_modes");
    }
    std::vector<cplx> coeffs(size);
    for (std::size_t k = 0; k < size; ++k) coeffs[k] = {re[k], im[k]};
    return FourierSeries(std::move(coeffs));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed series: ") + e.what());
  }
}

json to_json(const OffsetSeries& s) { return {{"mean", s.mean}, {"series", to_json(s.fluctuation)}}; }

OffsetSeries offset_series_from_json(const json& j) {
  try {
    return {j.at("mean").get<double>(), series_from_json(j.at("series"))};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed offset series: ") + e.what());
  }
}

json to_json(const TwistModel& model) {
  const ModelResiduals& r = model.residuals;
  json h0 = std::isfinite(model.strip_h0) ? json(model.strip_h0) : json(nullptr);
  return {
      {"alpha", {{"tag", model.alpha.tag}, {"value", model.alpha.decimal}}},
      {"phi", to_json(model.phi.periodic_part())},
      {"f", to_json(model.f)},
      {"gamma", to_json(model.gamma)},
      {"V", to_json(model.V)},
      {"meta",
       {{"modes", model.modes},
        {"grid", model.grid},
        {"strip_h0", h0},
        {"residuals",
         {{"invariance", r.invariance},
          {"mean_f", r.mean_f},
          {"g_consistency", r.g_consistency},
          {"derivative_identity", r.derivative_identity}}}}},
  };
}

TwistModel model_from_json(const json& j) {
  try {
    TwistModel model;
    const json& a = j.at("alpha");
    const std::string tag = a.value("tag", std::string{});
    model.alpha = Frequency::parse(tag.empty() ? a.at("value").get<std::string>() : tag);
    model.phi = CircleDiffeo(series_from_json(j.at("phi")));
    model.f = series_from_json(j.at("f"));
    model.gamma = offset_series_from_json(j.at("gamma"));
    model.V = offset_series_from_json(j.at("V"));
    const json& meta = j.at("meta");
    model.modes = meta.at("modes").get<int>();
    model.grid = meta.at("grid").get<int>();
    recertify(model);
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed model: ") + e.what());
  }
}

void save_model(const TwistModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << to_json(model).dump(1) << "\n";
  if (!out) throw Error(ErrorCode::InvalidArgument, "failed writing " + path);
}

TwistModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, path + ": " + e.what());
  }
  return model_from_json(j);
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::istreambuf_iterator<char> it(in), end; it != end; ++it) {
    h ^= static_cast<unsigned char>(*it);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace amspec
