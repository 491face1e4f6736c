#pragma once

// JSON state files, CSV series and report serialisation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwtime/decay.hpp"
#include "qwtime/dispersion.hpp"
#include "qwtime/error.hpp"
#include "qwtime/spectral.hpp"
#include "qwtime/time_operator.hpp"

namespace qwtime::io {

using nlohmann::json;

inline json values_to_json(std::span<const cplx> v) {
  json arr = json::array();
  for (const auto& z : v) arr.push_back({z.real(), z.imag()});
  return arr;
}

inline CVec values_from_json(const json& arr, std::size_t expected, const char* key) {
  if (!arr.is_array()) throw Error(ErrorCode::SchemaViolation, std::string(key) + " must be an array");
  if (arr.size() != expected) {
    throw Error(ErrorCode::SchemaViolation, std::string(key) + " has " + std::to_string(arr.size()) +
                                                " entries, expected " + std::to_string(expected));
  }
  CVec out;
  out.reserve(expected);
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw Error(ErrorCode::SchemaViolation, std::string(key) + " entries must be [re, im] pairs");
    }
    out.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

inline Representation rep_from_json(const json& j) {
  if (!j.contains("rep") || !j["rep"].is_string()) throw Error(ErrorCode::SchemaViolation, "missing \"rep\"");
  const auto s = j["rep"].get<std::string>();
  if (s == "momentum") return Representation::Momentum;
  if (s == "position") return Representation::Position;
  throw Error(ErrorCode::SchemaViolation, "rep must be \"momentum\" or \"position\"");
}

inline MomentumGrid grid_from_json(const json& j) {
  if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<long long>() <= 0) {
    throw Error(ErrorCode::SchemaViolation, "\"n\" must be a positive integer");
  }
  try {
    return MomentumGrid(j["n"].get<std::size_t>());
  } catch (const Error& e) {
    throw Error(ErrorCode::SchemaViolation, e.what());
  }
}

inline json to_json(const Field& f) {
  return {{"n", f.size()}, {"rep", to_string(f.rep())}, {"values", values_to_json(f.values())}};
}

inline json to_json(const SpinorField& f) {
  return {{"n", f.upper.size()},
          {"rep", to_string(f.rep())},
          {"upper", values_to_json(f.upper.values())},
          {"lower", values_to_json(f.lower.values())}};
}

inline json to_json(const TorusField& f) {
  return {{"n", f.side()}, {"rep", to_string(f.rep())}, {"dim", 2}, {"values", values_to_json(f.values())}};
}

enum class StateKind { Scalar, Spinor, Torus };

inline StateKind state_kind(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, "state must be a JSON object");
  if (j.contains("upper") || j.contains("lower")) return StateKind::Spinor;
  if (j.contains("dim")) {
    if (!j["dim"].is_number_integer() || j["dim"].get<int>() != 2) {
      throw Error(ErrorCode::SchemaViolation, "\"dim\" must equal 2");
    }
    return StateKind::Torus;
  }
  return StateKind::Scalar;
}

inline Field field_from_json(const json& j) {
  if (state_kind(j) != StateKind::Scalar) throw Error(ErrorCode::SchemaViolation, "expected a scalar field");
  const MomentumGrid g = grid_from_json(j);
  if (!j.contains("values")) throw Error(ErrorCode::SchemaViolation, "missing \"values\"");
  return Field(g, rep_from_json(j), values_from_json(j["values"], g.size(), "values"));
}

inline SpinorField spinor_from_json(const json& j) {
  if (state_kind(j) != StateKind::Spinor) throw Error(ErrorCode::SchemaViolation, "expected a spinor field");
  const MomentumGrid g = grid_from_json(j);
  const Representation rep = rep_from_json(j);
  if (!j.contains("upper") || !j.contains("lower")) {
    throw Error(ErrorCode::SchemaViolation, "spinor needs \"upper\" and \"lower\"");
  }
  return {Field(g, rep, values_from_json(j["upper"], g.size(), "upper")),
          Field(g, rep, values_from_json(j["lower"], g.size(), "lower"))};
}

inline TorusField torus_from_json(const json& j) {
  if (state_kind(j) != StateKind::Torus) throw Error(ErrorCode::SchemaViolation, "expected a torus field");
  const MomentumGrid g = grid_from_json(j);
  if (!j.contains("values")) throw Error(ErrorCode::SchemaViolation, "missing \"values\"");
  return TorusField(g, rep_from_json(j), values_from_json(j["values"], g.size() * g.size(), "values"));
}

inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("malformed JSON: ") + e.what());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::SchemaViolation, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes to a sibling temporary file, then renames over the target.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidParameter, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::InvalidParameter, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Reports

inline json zeros_to_json(const Band& b) {
  json arr = json::array();
  for (const auto& z : b.zeros) arr.push_back(z.k);
  return arr;
}

inline json band_summary(const Band& b) {
  json zs = json::array();
  for (const auto& z : b.zeros) zs.push_back({{"k", z.k}, {"kind", std::string(to_string(z.kind))}});
  return {{"label", b.label}, {"winding", b.winding}, {"zeros", zs}};
}

/// CSV columns k, Re lambda, Im lambda, gPrime, thetaPrime after a '#' JSON line.
inline std::string band_csv(const Band& b) {
  std::ostringstream out;
  out << "# " << band_summary(b).dump() << "\n";
  out << "k,re_lambda,im_lambda,g_prime,theta_prime\n";
  for (std::size_t j = 0; j < b.lambda.size(); ++j) {
    out << fmt(b.grid.k(j)) << ',' << fmt(b.lambda[j].real()) << ',' << fmt(b.lambda[j].imag()) << ','
        << fmt(b.g_prime[j]) << ',' << fmt(b.theta_prime[j]) << "\n";
  }
  return out.str();
}

inline std::string decay_csv(const std::vector<DecayRecord>& rs) {
  std::ostringstream out;
  out << "t,re_amp,im_amp,abs_amp,bound,satisfied\n";
  for (const auto& r : rs) {
    out << fmt(r.t) << ',' << fmt(r.amplitude.real()) << ',' << fmt(r.amplitude.imag()) << ','
        << fmt(std::abs(r.amplitude)) << ',' << (r.bound_applies ? fmt(r.bound) : std::string("")) << ','
        << (r.satisfied ? "true" : "false") << "\n";
  }
  return out.str();
}

inline json to_json(const TimeOpClassification& c) {
  json j = {{"winding", c.winding},
            {"zero_count", c.zero_count},
            {"deficiency", {c.d_plus, c.d_minus}},
            {"spectrum", spectrum_string(c)},
            {"self_adjoint", c.self_adjoint}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

inline json classification_report(const std::array<Band, 2>& bands, const WalkClassification& w) {
  json j = {{"winding", {bands[0].winding, bands[1].winding}},
            {"zeros", {zeros_to_json(bands[0]), zeros_to_json(bands[1])}},
            {"deficiency", {w.d_plus, w.d_minus}},
            {"spectrum", w.spectrum},
            {"self_adjoint", w.self_adjoint},
            {"bands", {to_json(w.bands[0]), to_json(w.bands[1])}}};
  if (!w.note.empty()) j["note"] = w.note;
  return j;
}

inline json classification_report(const Band& band, const TimeOpClassification& c) {
  json j = {{"winding", json::array({band.winding})},
            {"zeros", json::array({zeros_to_json(band)})},
            {"deficiency", {c.d_plus, c.d_minus}},
            {"spectrum", spectrum_string(c)},
            {"self_adjoint", c.self_adjoint},
            {"bands", json::array({to_json(c)})}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

}  // namespace qwtime::io
