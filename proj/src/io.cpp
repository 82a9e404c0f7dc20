#include "srp/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace srp {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw SrpError(ErrorCode::invalid_instance, path + ": " + what);
}

double number_at(const Json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "not a finite number");
  return x;
}

Index integer_at(const Json& v, const std::string& path) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) fail(path, "expected an integer");
  return v.get<Index>();
}

const Json& field(const Json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) fail(path.empty() ? key : path + "." + key, "missing field");
  return obj.at(key);
}

/// (column, value) pairs of a dense or sparse coordinate list.
std::vector<std::pair<Index, double>> coords_from_json(const Json& v, const std::string& path) {
  std::vector<std::pair<Index, double>> out;
  if (v.is_array()) {
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double x = number_at(v[j], path + "[" + std::to_string(j) + "]");
      if (x != 0.0) out.emplace_back(static_cast<Index>(j), x);
    }
    if (v.empty()) fail(path, "empty coordinate list");
    return out;
  }
  if (!v.is_object()) fail(path, "expected an array of numbers or {\"index\", \"value\"}");
  const Json& idx = field(v, "index", path);
  const Json& val = field(v, "value", path);
  if (!idx.is_array() || !val.is_array() || idx.size() != val.size()) {
    fail(path, "\"index\" and \"value\" must be arrays of equal length");
  }
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const Index c = integer_at(idx[j], path + ".index[" + std::to_string(j) + "]");
    if (c < 0) fail(path + ".index[" + std::to_string(j) + "]", "negative coordinate index");
    const double x = number_at(val[j], path + ".value[" + std::to_string(j) + "]");
    if (x != 0.0) out.emplace_back(c, x);
  }
  return out;
}

Json coords_to_json(const std::vector<std::pair<Index, double>>& nz) {
  const Index last = nz.empty() ? 0 : nz.back().first;
  if (last + 1 <= 2 * static_cast<Index>(nz.size()) + 4) {
    std::vector<double> dense(static_cast<std::size_t>(last + 1), 0.0);
    for (const auto& [c, x] : nz) dense[static_cast<std::size_t>(c)] = x;
    return dense;
  }
  Json idx = Json::array(), val = Json::array();
  for (const auto& [c, x] : nz) {
    idx.push_back(c);
    val.push_back(x);
  }
  return Json{{"index", idx}, {"value", val}};
}

Geometry geometry_from(const Json& v, const std::string& path) {
  if (v == "euclidean") return Geometry::euclidean;
  if (v == "sphere") return Geometry::sphere;
  fail(path, "expected \"euclidean\" or \"sphere\"");
}

std::string_view to_string(Geometry g) { return g == Geometry::sphere ? "sphere" : "euclidean"; }
std::string_view to_string(SeriesModel m) { return m == SeriesModel::truncated ? "truncated" : "finite"; }

}  // namespace

Json point_to_json(const Point& p) {
  std::vector<std::pair<Index, double>> nz;
  for (Index j = 0; j < p.size(); ++j) {
    if (p(j) != 0.0) nz.emplace_back(j, p(j));
  }
  return coords_to_json(nz);
}

Point point_from_json(const Json& value, Index n, const std::string& path) {
  Point p = Point::Zero(n);
  for (const auto& [c, x] : coords_from_json(value, path)) {
    if (c >= n) fail(path, "coordinate " + std::to_string(c) + " beyond the truncation " + std::to_string(n));
    p(c) = x;
  }
  return p;
}

InstanceFile parse_instance(const Json& doc) {
  if (!doc.is_object()) fail("$", "expected a JSON object");
  InstanceFile file;

  if (doc.contains("scenario")) {
    const Json& sc = doc.at("scenario");
    if (!sc.is_object()) fail("scenario", "expected an object");
    const Json& name = field(sc, "name", "scenario");
    if (!name.is_string()) fail("scenario.name", "expected a string");
    Index n = kDefaultTruncation;
    if (sc.contains("truncation")) n = integer_at(sc.at("truncation"), "scenario.truncation");
    else if (doc.contains("truncation")) n = integer_at(doc.at("truncation"), "truncation");
    if (n < 4) fail("scenario.truncation", "must be at least 4");
    Scenario gen = generate(name.get<std::string>(), n);
    file.instance = std::move(gen.instance);
    file.ground_truth = std::move(gen.ground_truth);
    file.scenario = ScenarioRef{name.get<std::string>(), n};
    return file;
  }

  SrpInstance& inst = file.instance;
  inst.geometry = geometry_from(field(doc, "geometry", ""), "geometry");
  if (doc.contains("model")) {
    const Json& m = doc.at("model");
    if (m == "finite") inst.model = SeriesModel::finite;
    else if (m == "truncated") inst.model = SeriesModel::truncated;
    else fail("model", "expected \"finite\" or \"truncated\"");
  }

  const Json& sensors = field(doc, "sensors", "");
  if (!sensors.is_array()) fail("sensors", "expected an array");
  if (sensors.empty()) throw SrpError(ErrorCode::empty_sensor_list, "sensors: empty sensor list");
  std::vector<Eigen::Triplet<double>> entries;
  Index width = 0;
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const std::string path = "sensors[" + std::to_string(i) + "]";
    const auto nz = coords_from_json(sensors[i], path);
    if (sensors[i].is_array()) width = std::max(width, static_cast<Index>(sensors[i].size()));
    for (const auto& [c, x] : nz) {
      width = std::max(width, c + 1);
      entries.emplace_back(static_cast<Index>(i), c, x);
    }
  }
  Index n = width;
  if (doc.contains("truncation")) {
    n = integer_at(doc.at("truncation"), "truncation");
    if (n < 1) fail("truncation", "must be positive");
    if (n < width) fail("truncation", "smaller than the longest sensor (" + std::to_string(width) + ")");
  }
  inst.sensors.resize(static_cast<Index>(sensors.size()), n);
  inst.sensors.setFromTriplets(entries.begin(), entries.end());
  inst.sensors.makeCompressed();

  const Json& times = field(doc, "times", "");
  if (!times.is_array()) fail("times", "expected an array");
  if (times.size() != sensors.size()) {
    fail("times", "has " + std::to_string(times.size()) + " entries for " + std::to_string(sensors.size()) +
                      " sensors");
  }
  inst.times.resize(static_cast<Index>(times.size()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    inst.times(static_cast<Index>(i)) = number_at(times[i], "times[" + std::to_string(i) + "]");
  }

  if (doc.contains("ground_truth")) {
    const Json& gt = doc.at("ground_truth");
    if (!gt.is_object()) fail("ground_truth", "expected an object");
    GroundTruth truth;
    truth.s = point_from_json(field(gt, "s", "ground_truth"), n, "ground_truth.s");
    truth.t = number_at(field(gt, "t", "ground_truth"), "ground_truth.t");
    file.ground_truth = std::move(truth);
  }
  return file;
}

InstanceFile parse_instance(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw SrpError(ErrorCode::invalid_instance, "line " + std::to_string(line) + ": malformed JSON (" +
                                                    std::string(e.what()) + ")");
  }
  return parse_instance(doc);
}

InstanceFile read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SrpError(ErrorCode::invalid_instance, path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

Json instance_to_json(const InstanceFile& file) {
  const SrpInstance& inst = file.instance;
  Json doc;
  doc["geometry"] = to_string(inst.geometry);
  doc["model"] = to_string(inst.model);
  doc["truncation"] = inst.truncation();
  Json sensors = Json::array();
  for (Index i = 0; i < inst.size(); ++i) {
    std::vector<std::pair<Index, double>> nz;
    for (SensorRows<double>::InnerIterator it(inst.sensors, i); it; ++it) {
      if (it.value() != 0.0) nz.emplace_back(it.col(), it.value());
    }
    sensors.push_back(coords_to_json(nz));
  }
  doc["sensors"] = std::move(sensors);
  doc["times"] = std::vector<double>(inst.times.data(), inst.times.data() + inst.times.size());
  if (file.ground_truth) doc["ground_truth"] = {{"s", point_to_json(file.ground_truth->s)}, {"t", file.ground_truth->t}};
  if (file.scenario) doc["scenario"] = {{"name", file.scenario->name}, {"truncation", file.scenario->truncation}};
  return doc;
}

InstanceFile with_truncation(const InstanceFile& file, Index n) {
  if (file.scenario) {
    Json doc = {{"scenario", {{"name", file.scenario->name}, {"truncation", n}}}};
    return parse_instance(doc);
  }
  const SrpInstance& inst = file.instance;
  std::vector<Eigen::Triplet<double>> entries;
  for (Index i = 0; i < inst.size(); ++i) {
    for (SensorRows<double>::InnerIterator it(inst.sensors, i); it; ++it) {
      if (it.value() == 0.0) continue;
      if (it.col() >= n) fail("truncation", "sensors[" + std::to_string(i) + "] needs more than " + std::to_string(n) + " coordinates");
      entries.emplace_back(i, it.col(), it.value());
    }
  }
  InstanceFile out = file;
  out.instance.sensors.resize(inst.size(), n);
  out.instance.sensors.setFromTriplets(entries.begin(), entries.end());
  if (out.ground_truth) {
    Point s = Point::Zero(n);
    const Index k = std::min(n, out.ground_truth->s.size());
    s.head(k) = out.ground_truth->s.head(k);
    out.ground_truth->s = s;
  }
  return out;
}

Json verdict_to_json(const ConvergenceVerdict& v) {
  return {{"verdict", to_string(v.verdict)},     {"partial_at_half", v.partial_at_half},
          {"partial_at_full", v.partial_at_full}, {"last_quarter", v.last_quarter},
          {"growth_ratio", v.growth_ratio},       {"length", v.length}};
}

Json uniqueness_to_json(const UniquenessReport& r) {
  Json out = {{"a_dual_exists", r.dual_exists},
              {"b_coincides_with_sensor", r.coincides_with_sensor},
              {"c_orthogonal_subsequence", r.orthogonal_subsequence},
              {"d_antipodal_pair", r.antipodal_pair},
              {"guaranteed_unique", r.guaranteed_unique()}};
  if (r.coinciding_sensor) out["coinciding_sensor"] = *r.coinciding_sensor;
  if (r.antipodal_sensor) out["antipodal_sensor"] = *r.antipodal_sensor;
  out["subsequence_length"] = r.subsequence.size();
  out["norm_band"] = {r.band_lower, r.band_upper};
  return out;
}

Json galerkin_to_json(const GalerkinSequence& seq) {
  Json rows = Json::array();
  for (const auto& row : seq.rows) {
    Json r = {{"n", row.n}};
    if (row.result) {
      r["t_n"] = row.result->t_n;
      r["branch"] = to_string(row.result->branch);
      r["max_residual"] = row.result->max_residual;
      r["t_error"] = row.t_error;
      r["s_error"] = row.s_error;
      r["s_error_identity"] = row.s_error_identity;
    } else {
      r["error"] = row.error;
    }
    rows.push_back(std::move(r));
  }
  const auto& h = seq.hypotheses;
  Json hyp = {{"reference_unique", h.reference_unique},
              {"every_step_unique", h.every_step_unique},
              {"nonzero_sources", h.nonzero_sources},
              {"hold", h.hold()}};
  if (h.c_series) hyp["c_series"] = to_string(*h.c_series);
  return {{"t_reference", seq.t_reference}, {"hypotheses", hyp}, {"rows", rows}};
}

SolutionReport make_report(const EuclidResult& result, const UniquenessReport& uniqueness) {
  SolutionReport rep;
  rep.geometry = Geometry::euclidean;
  rep.truncation = result.setup.normalized.instance.truncation();
  rep.case_label = to_string(result.case_label);
  for (const auto& s : result.solutions) {
    rep.solutions.push_back({std::string(to_string(s.kind)), std::string(to_string(s.case_label)),
                             std::string(to_string(s.status)), "finite", s.t, s.s, s.max_residual, s.tail_norm2});
  }
  Json& d = rep.diagnostics;
  d["uniqueness"] = uniqueness_to_json(uniqueness);
  d["min_pivot"] = result.setup.frame.min_pivot();
  const auto& q = result.quadratic;
  d["quadratic"] = {{"alpha", q.alpha}, {"beta", q.beta}, {"gamma", q.gamma}, {"discriminant", q.discriminant()},
                    {"tail_bb", q.tail_bb}, {"tail_bc", q.tail_bc}, {"tail_cc", q.tail_cc}};
  if (result.b_verdict) d["series"]["b_tilde"] = verdict_to_json(*result.b_verdict);
  if (result.c_verdict) d["series"]["c_tilde"] = verdict_to_json(*result.c_verdict);
  if (result.case1a) {
    d["case1a"] = {{"schedule", result.case1a->schedule},
                   {"iterates", result.case1a->iterates},
                   {"convergence", result.case1a->convergence}};
  }
  Json rejected = Json::array();
  for (const auto& r : result.rejected) {
    rejected.push_back({{"t", r.t}, {"max_residual", r.max_residual}, {"reason", r.reason}});
  }
  d["rejected"] = std::move(rejected);
  return rep;
}

SolutionReport make_report(const SphereResult& result) {
  SolutionReport rep;
  rep.geometry = Geometry::sphere;
  rep.truncation = result.coeffs.frame.ambient_dim();
  rep.case_label = to_string(result.case_label);
  for (const auto& s : result.solutions) {
    rep.solutions.push_back({"source", std::string(to_string(s.case_label)),
                             s.approximate ? "approximate" : "verified",
                             s.set_kind == SolutionSetKind::interval ? "interval" : "finite", s.t, s.s,
                             std::max(s.max_residual, s.unit_error), 0.0});
  }
  const auto& co = result.coeffs;
  Json& d = rep.diagnostics;
  d["delta"] = {co.delta.lo, co.delta.hi};
  d["alpha"] = co.alpha;
  d["beta"] = co.beta;
  d["gamma"] = co.gamma;
  d["min_pivot"] = co.frame.min_pivot();
  if (result.verdicts.p) d["series"]["p_tilde"] = verdict_to_json(*result.verdicts.p);
  if (result.verdicts.q) d["series"]["q_tilde"] = verdict_to_json(*result.verdicts.q);
  const ExclusionCertificate cert = check_exclusion_3b(co);
  d["exclusion_3b"] = {{"applicable", cert.applicable}, {"excluded", cert.excluded}, {"sum", cert.sum}};
  if (result.interval) d["interval"] = {result.interval->lo, result.interval->hi};
  if (!result.sublevel_trace.empty()) {
    Json trace = Json::array();
    for (const auto& st : result.sublevel_trace) {
      const double w = st.intersection.back().hi - st.intersection.front().lo;
      trace.push_back({{"n", st.n}, {"width", w}, {"nested", st.nested}});
    }
    d["sublevel"] = std::move(trace);
  }
  Json rejected = Json::array();
  for (const auto& r : result.rejected) {
    rejected.push_back({{"t", r.t}, {"max_residual", r.max_residual}, {"unit_error", r.unit_error}, {"reason", r.reason}});
  }
  d["rejected"] = std::move(rejected);
  return rep;
}

Json report_to_json(const SolutionReport& rep) {
  Json sols = Json::array();
  for (const auto& s : rep.solutions) {
    sols.push_back({{"kind", s.kind},
                    {"case", s.case_label},
                    {"status", s.status},
                    {"set", s.set_kind},
                    {"t", s.t},
                    {"s", point_to_json(s.s)},
                    {"max_residual", s.max_residual},
                    {"tail_norm2", s.tail_norm2}});
  }
  Json doc = {{"geometry", to_string(rep.geometry)},
              {"truncation", rep.truncation},
              {"case", rep.case_label},
              {"solutions", sols},
              {"diagnostics", rep.diagnostics}};
  if (!rep.galerkin.is_null()) doc["galerkin"] = rep.galerkin;
  return doc;
}

SolutionReport report_from_json(const Json& doc) {
  if (!doc.is_object()) fail("$", "expected a JSON object");
  SolutionReport rep;
  rep.geometry = geometry_from(field(doc, "geometry", ""), "geometry");
  rep.truncation = integer_at(field(doc, "truncation", ""), "truncation");
  const Json& c = field(doc, "case", "");
  if (!c.is_string()) fail("case", "expected a string");
  rep.case_label = c.get<std::string>();
  const Json& sols = field(doc, "solutions", "");
  if (!sols.is_array()) fail("solutions", "expected an array");
  for (std::size_t k = 0; k < sols.size(); ++k) {
    const std::string path = "solutions[" + std::to_string(k) + "]";
    const Json& s = sols[k];
    if (!s.is_object()) fail(path, "expected an object");
    ReportedSolution r;
    r.kind = field(s, "kind", path).get<std::string>();
    r.case_label = field(s, "case", path).get<std::string>();
    r.status = s.value("status", "verified");
    r.set_kind = s.value("set", "finite");
    r.t = number_at(field(s, "t", path), path + ".t");
    r.s = point_from_json(field(s, "s", path), rep.truncation, path + ".s");
    r.max_residual = number_at(field(s, "max_residual", path), path + ".max_residual");
    if (s.contains("tail_norm2")) r.tail_norm2 = number_at(s.at("tail_norm2"), path + ".tail_norm2");
    rep.solutions.push_back(std::move(r));
  }
  if (doc.contains("diagnostics")) rep.diagnostics = doc.at("diagnostics");
  if (doc.contains("galerkin")) rep.galerkin = doc.at("galerkin");
  return rep;
}

std::vector<double> reverify(const SolutionReport& report, const SrpInstance& instance) {
  std::vector<double> out;
  for (const auto& s : report.solutions) {
    if (report.geometry == Geometry::sphere) {
      const double unit = std::abs(s.s.norm() - 1.0);
      out.push_back(std::max(sphere_residuals(instance, s.s, s.t).maxCoeff(), unit));
    } else {
      const Verification v = check_solution(instance, s.s, s.t, 0.0, s.tail_norm2);
      const Eigen::VectorXd& r = s.kind == "dual" ? v.dual_residuals : v.source_residuals;
      out.push_back(r.maxCoeff());
    }
  }
  return out;
}

}  // namespace srp
