#pragma once

#include <cmath>
#include <string>

#include "json.hpp"

#include "hwbf/contour.hpp"
#include "hwbf/experiments.hpp"
#include "hwbf/synth.hpp"

namespace hwbf {

using Json = nlohmann::ordered_json;

/// Non-finite numbers become null.
inline Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline double num_from(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

inline Json to_json(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Vector(m.row(i).transpose())));
  return a;
}

inline Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::BadValue, "expected a numeric array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = num_from(j[i]);
  return v;
}

inline Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::BadValue, "expected a nonempty array of rows");
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != j[0].size()) throw Error(ErrorKind::BadValue, "ragged matrix");
    m.row(static_cast<Eigen::Index>(i)) = vector_from_json(j[i]).transpose();
  }
  return m;
}

inline Json to_json(const PriorHyper& h) {
  Json j;
  j["model"] = model_name(h.model);
  if (h.mu) j["mu"] = to_json(*h.mu);
  if (h.mu_ell) {
    j["mu_ell"] = Json::array();
    for (const auto& v : *h.mu_ell) j["mu_ell"].push_back(to_json(v));
  }
  if (h.B) j["B"] = to_json(*h.B);
  if (h.B_ell) {
    j["B_ell"] = Json::array();
    for (const auto& m : *h.B_ell) j["B_ell"].push_back(to_json(m));
  }
  if (h.U) j["U"] = to_json(*h.U);
  if (h.nu) j["nu"] = *h.nu;
  if (h.k0) j["k0"] = *h.k0;
  if (h.K0) j["K0"] = to_json(*h.K0);
  if (h.upsilon) j["upsilon"] = *h.upsilon;
  if (h.sigma) {
    j["sigma"] = *h.sigma;
    j["sigma_clamped"] = h.sigma_clamped;
  }
  if (h.eta) j["eta"] = *h.eta;
  return j;
}

inline PriorHyper prior_from_json(const Json& j) {
  PriorHyper h;
  try {
    h.model = parse_model(j.at("model").get<std::string>());
    if (j.contains("mu")) h.mu = vector_from_json(j["mu"]);
    if (j.contains("mu_ell")) {
      h.mu_ell.emplace();
      for (const auto& v : j["mu_ell"]) h.mu_ell->push_back(vector_from_json(v));
    }
    if (j.contains("B")) h.B = matrix_from_json(j["B"]);
    if (j.contains("B_ell")) {
      h.B_ell.emplace();
      for (const auto& m : j["B_ell"]) h.B_ell->push_back(matrix_from_json(m));
    }
    if (j.contains("U")) h.U = matrix_from_json(j["U"]);
    if (j.contains("nu")) h.nu = j["nu"].get<double>();
    if (j.contains("k0")) h.k0 = j["k0"].get<double>();
    if (j.contains("K0")) h.K0 = vector_from_json(j["K0"]);
    if (j.contains("upsilon")) h.upsilon = j["upsilon"].get<double>();
    if (j.contains("sigma")) h.sigma = j["sigma"].get<double>();
    if (j.contains("sigma_clamped")) h.sigma_clamped = j["sigma_clamped"].get<bool>();
    if (j.contains("eta")) h.eta = j["eta"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::BadValue, std::string("prior JSON: ") + e.what());
  }
  h.validate();
  return h;
}

inline Json to_json(const Marginal& m) {
  return Json{{"log_m", num(m.log_m)},
              {"mce", num(m.mce)},
              {"exact", m.exact},
              {"failed_runs", m.failed_runs},
              {"not_converged", m.not_converged}};
}

inline Json to_json(const EvidenceResult& r) {
  Json j;
  j["model"] = model_name(r.model);
  j["log_m_h1"] = to_json(r.h1);
  j["log_m_y1_h2"] = to_json(r.y1_h2);
  j["log_m_y2_h2"] = to_json(r.y2_h2);
  j["log_bf"] = num(r.log_bf);
  j["combined_mce"] = num(r.combined_mce);
  j["identity_holds"] = r.identity_holds();
  j["band"] = evidence_band(r.log_bf);
  j["fingerprint"] = r.fingerprint;
  return j;
}

inline Json to_json(const BridgeResult& r) {
  return Json{{"log_ml", num(r.log_ml)},     {"iterations", r.iterations}, {"converged", r.converged},
              {"relative_change", num(r.relative_change)}, {"t1", r.t1}, {"t2", r.t2}};
}

inline Json to_json(const ModelComparison& c) {
  return Json{{"numerator", model_name(c.numerator)},
              {"denominator", model_name(c.denominator)},
              {"log_m_numerator", to_json(c.m_num)},
              {"log_m_denominator", to_json(c.m_den)},
              {"log_bf", num(c.log_bf)},
              {"combined_mce", num(c.combined_mce)}};
}

inline Json to_json(const StudyReport& r) {
  Json j;
  j["kind"] = r.kind;
  j["rates"] = Json::array();
  for (const auto& s : r.rates) {
    j["rates"].push_back(Json{{"analysis", s.analysis},
                              {"cases", s.cases},
                              {"failed", s.failed},
                              {r.kind == "same-writer" ? "false_negatives" : "false_positives", s.errors},
                              {"rate", num(s.rate)}});
  }
  j["cases"] = Json::array();
  for (const auto& c : r.cases) {
    Json cj{{"case", c.case_index},
            {"questioned_writer", c.questioned_writer},
            {"control_writer", c.control_writer},
            {"repetition", c.repetition},
            {"pi_split", c.pi_split},
            {"analysis", c.analysis.name()}};
    if (c.result) cj["result"] = to_json(*c.result);
    else cj["error"] = c.error;
    j["cases"].push_back(cj);
  }
  return j;
}

inline Json to_json(const SweepReport& r) {
  Json j;
  j["parameter"] = r.parameter;
  j["pairs"] = Json::array();
  for (const auto& [a, b] : r.pairs) j["pairs"].push_back(Json::array({a, b}));
  j["curves"] = Json::array();
  for (const auto& c : r.curves) {
    Json means = Json::array();
    for (double v : c.mean_log_bf) means.push_back(num(v));
    j["curves"].push_back(Json{{"model", model_name(c.model)},
                               {"values", c.values},
                               {"mean_log_bf", means},
                               {"failed", c.failed},
                               {"slope", num(c.slope)},
                               {"strictly_increasing", c.strictly_increasing()}});
  }
  return j;
}

inline Json to_json(const SubsampleReport& r) {
  Json j;
  j["shift_rate"] = Json::object();
  for (const auto& [k, v] : r.shift_rate) j["shift_rate"][k] = num(v);
  j["cases"] = Json::array();
  for (const auto& c : r.cases) {
    Json bfs = Json::array();
    for (double v : c.log_bfs) bfs.push_back(num(v));
    j["cases"].push_back(Json{{"questioned_writer", c.writer_q},
                              {"control_writer", c.writer_c},
                              {"pi_split", c.pi_split},
                              {"analysis", c.analysis.name()},
                              {"reference_log_bf", c.reference_log_bf ? num(*c.reference_log_bf) : Json(nullptr)},
                              {"min_log_bf", num(c.min_log_bf)},
                              {"max_log_bf", num(c.max_log_bf)},
                              {"shifts", c.shifts},
                              {"failed", c.failed},
                              {"log_bfs", bfs}});
  }
  return j;
}

inline Json to_json(const MahalanobisResult& r) {
  return Json{{"writers", r.writers}, {"distance", to_json(r.distance)}, {"raw", to_json(r.raw)}, {"ridged", r.ridged}};
}

inline Json to_json(const synth::Population& pop) {
  Json j = Json::array();
  for (const auto& t : pop.truth) {
    j.push_back(Json{{"writer", t.writer}, {"theta", to_json(t.theta)}, {"within", to_json(t.within)}});
  }
  return j;
}

inline Json to_json(const contour::Coefficients& c) {
  Json pairs = Json::array();
  for (const auto& [a, b] : c.pairs) pairs.push_back(Json::array({a, b}));
  return Json{{"a0", c.a0}, {"pairs", pairs}};
}

inline contour::Coefficients coefficients_from_json(const Json& j) {
  contour::Coefficients c;
  try {
    c.a0 = j.at("a0").get<double>();
    for (const auto& p : j.at("pairs")) c.pairs.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::BadValue, std::string("coefficient JSON: ") + e.what());
  }
  if (c.pairs.empty()) throw Error(ErrorKind::BadValue, "at least one harmonic required");
  return c;
}

}  // namespace hwbf
