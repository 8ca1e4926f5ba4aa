#include "regionq/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "json_codec.hpp"

namespace regionq {
namespace detail {

json encode_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double decode_real(const json& j) {
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::invalid_argument("bad real value: " + s);
  }
  return j.get<double>();
}

json encode_point(PointView p) {
  if (p.size() == 1) return encode_real(p[0]);
  json a = json::array();
  for (double v : p) a.push_back(encode_real(v));
  return a;
}

Point decode_point(const json& j) {
  if (!j.is_array()) return Point{decode_real(j)};
  Point p;
  for (const auto& v : j) p.push_back(decode_real(v));
  return p;
}

json encode_matrix(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd decode_matrix(const json& j) {
  Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols) throw std::invalid_argument("ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

namespace {

json encode_pairs(const std::vector<std::pair<double, double>>& v) {
  json a = json::array();
  for (const auto& [lo, hi] : v) a.push_back(json::array({encode_real(lo), encode_real(hi)}));
  return a;
}

std::vector<std::pair<double, double>> decode_pairs(const json& j) {
  std::vector<std::pair<double, double>> out;
  for (const auto& p : j) out.emplace_back(decode_real(p.at(0)), decode_real(p.at(1)));
  return out;
}

std::string sense_name(Sense s) { return s == Sense::GreaterEq ? ">=" : "<="; }

Sense parse_sense(const json& j) {
  auto s = j.get<std::string>();
  if (s == ">=") return Sense::GreaterEq;
  if (s == "<=") return Sense::LessEq;
  throw std::invalid_argument("bad sense: " + s);
}

json encode_polytope(const HalfspacePolytope& p) {
  json rows = json::array();
  for (const auto& r : p.rows)
    rows.push_back({{"weight", r.weight}, {"offset", encode_real(r.offset)}, {"sense", sense_name(r.sense)}});
  return {{"kind", "halfspace_polytope"}, {"dim", p.dim}, {"rows", rows},
          {"unit_sphere", p.restricted_to_unit_sphere}};
}

HalfspacePolytope decode_polytope(const json& j) {
  HalfspacePolytope p;
  p.dim = j.at("dim").get<std::size_t>();
  p.restricted_to_unit_sphere = j.value("unit_sphere", false);
  for (const auto& r : j.at("rows")) {
    PolytopeRow row{r.at("weight").get<std::vector<double>>(), decode_real(r.at("offset")),
                    parse_sense(r.at("sense"))};
    if (row.weight.size() != p.dim) throw DimensionMismatch(p.dim, row.weight.size());
    p.rows.push_back(std::move(row));
  }
  return p;
}

json encode_interval(const Interval& iv) {
  return {{"kind", "interval"}, {"lo", encode_point(iv.lo)}, {"hi", encode_point(iv.hi)}};
}

Interval decode_interval(const json& j) { return Interval(decode_point(j.at("lo")), decode_point(j.at("hi"))); }

}  // namespace

json encode(const Hypothesis& h) {
  struct {
    json operator()(const UnionOfIntervals& u) const {
      return {{"kind", "union_of_intervals"}, {"intervals", encode_pairs(u.intervals)}};
    }
    json operator()(const AxisBox& b) const { return {{"kind", "axis_box"}, {"bounds", encode_pairs(b.bounds)}}; }
    json operator()(const Halfspace& w) const { return {{"kind", "halfspace"}, {"w", w.w}}; }
    json operator()(const std::shared_ptr<const PointLabeling>& p) const {
      json pts = json::array();
      json labels = json::array();
      for (std::size_t i = 0; i < p->points().size(); ++i) {
        pts.push_back(encode_point(p->points()[i]));
        labels.push_back(to_int(p->labels()[i]));
      }
      return {{"kind", "point_labeling"}, {"points", pts}, {"labels", labels},
              {"fallback", to_int(p->fallback())}};
    }
  } v;
  return std::visit(v, h);
}

Hypothesis decode_hypothesis(const json& j) {
  auto kind = j.at("kind").get<std::string>();
  if (kind == "union_of_intervals") return UnionOfIntervals{decode_pairs(j.at("intervals"))};
  if (kind == "axis_box") return AxisBox{decode_pairs(j.at("bounds"))};
  if (kind == "halfspace") return Halfspace{j.at("w").get<std::vector<double>>()};
  if (kind == "point_labeling") {
    std::vector<Point> pts;
    for (const auto& p : j.at("points")) pts.push_back(decode_point(p));
    std::vector<Sign> labels;
    for (const auto& l : j.at("labels")) labels.push_back(parse_sign(l.get<int>()));
    PointSet s = pts.empty() ? PointSet(1) : PointSet::from_points(pts);
    return make_point_labeling(s, labels, parse_sign(j.at("fallback").get<int>()));
  }
  throw std::invalid_argument("unknown hypothesis kind: " + kind);
}

json encode(const RegionDescriptor& r) {
  struct {
    json operator()(const Interval& iv) const { return encode_interval(iv); }
    json operator()(const AxisHalfspace& h) const {
      return {{"kind", "axis_halfspace"}, {"coord", h.coord}, {"direction", sense_name(h.sense)},
              {"threshold", encode_real(h.threshold)}};
    }
    json operator()(const HalfspacePolytope& p) const { return encode_polytope(p); }
    json operator()(const TransformedPolytope& t) const {
      return {{"kind", "transformed_polytope"},
              {"transform", encode_matrix(t.map->transform)},
              {"subspace_basis", encode_matrix(t.map->basis)},
              {"inner", encode_polytope(t.inner)},
              {"anchor", t.anchor ? json(*t.anchor) : json(nullptr)}};
    }
    json operator()(const HypothesisPositiveSet& h) const {
      return {{"kind", "hypothesis_positive_set"},
              {"hypothesis", encode(h.hypothesis)},
              {"sign", to_int(h.sign)},
              {"interval", h.interval ? encode_interval(*h.interval) : json(nullptr)}};
    }
    json operator()(const FiniteSet& f) const {
      json pts = json::array();
      for (std::size_t i = 0; i < f.size(); ++i) pts.push_back(encode_point(f.points()[i]));
      return {{"kind", "finite_set"}, {"points", pts}};
    }
  } v;
  return std::visit(v, r);
}

RegionDescriptor decode_region(const json& j) {
  auto kind = j.at("kind").get<std::string>();
  if (kind == "interval") return decode_interval(j);
  if (kind == "axis_halfspace")
    return AxisHalfspace{j.at("coord").get<std::size_t>(), parse_sense(j.at("direction")),
                         decode_real(j.at("threshold"))};
  if (kind == "halfspace_polytope") return decode_polytope(j);
  if (kind == "transformed_polytope") {
    auto map = std::make_shared<LinearMap>();
    map->transform = decode_matrix(j.at("transform"));
    map->basis = decode_matrix(j.at("subspace_basis"));
    TransformedPolytope t{map, decode_polytope(j.at("inner")), std::nullopt};
    if (!j.at("anchor").is_null()) t.anchor = j.at("anchor").get<Point>();
    return t;
  }
  if (kind == "hypothesis_positive_set") {
    HypothesisPositiveSet h{decode_hypothesis(j.at("hypothesis")), parse_sign(j.at("sign").get<int>()),
                            std::nullopt};
    if (!j.at("interval").is_null()) h.interval = decode_interval(j.at("interval"));
    return h;
  }
  if (kind == "finite_set") {
    std::vector<Point> pts;
    for (const auto& p : j.at("points")) pts.push_back(decode_point(p));
    return FiniteSet(pts);
  }
  throw std::invalid_argument("unknown region kind: " + kind);
}

}  // namespace detail

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t start = cell.find_first_not_of(' ');
    out.push_back(start == std::string::npos ? std::string() : cell.substr(start));
  }
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number: " + s);
  return v;
}

}  // namespace

PointSet read_points_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty dataset CSV");
  auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "id") throw std::invalid_argument("dataset header must be id,x1,...,xd");
  std::size_t d = header.size() - 1;
  std::map<std::size_t, Point> rows;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \r\t") == std::string::npos) continue;
    auto cells = split_csv(line);
    if (cells.size() != d + 1) throw std::invalid_argument("row has wrong column count: " + line);
    auto id = static_cast<std::size_t>(std::stoull(cells[0]));
    Point p(d);
    for (std::size_t i = 0; i < d; ++i) p[i] = parse_double(cells[i + 1]);
    if (!rows.emplace(id, std::move(p)).second) throw std::invalid_argument("duplicate id " + cells[0]);
  }
  PointSet s(d);
  std::size_t expect = 0;
  for (auto& [id, p] : rows) {
    if (id != expect++) throw std::invalid_argument("ids must be contiguous from 0");
    s.push_back(p);
  }
  return s;
}

PointSet read_points_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_points_csv(in);
}

void write_points_csv(std::ostream& out, const PointSet& s) {
  out << "id";
  for (std::size_t i = 1; i <= s.dim(); ++i) out << ",x" << i;
  out << '\n';
  out.precision(17);
  for (std::size_t id = 0; id < s.size(); ++id) {
    out << id;
    for (double v : s[id]) out << ',' << v;
    out << '\n';
  }
}

std::string region_to_json(const RegionDescriptor& r) { return detail::encode(r).dump(); }
RegionDescriptor region_from_json(const std::string& text) {
  return detail::decode_region(nlohmann::json::parse(text));
}
std::string hypothesis_to_json(const Hypothesis& h) { return detail::encode(h).dump(); }
Hypothesis hypothesis_from_json(const std::string& text) {
  return detail::decode_hypothesis(nlohmann::json::parse(text));
}

void write_transcript_jsonl(std::ostream& out, const std::vector<TranscriptEntry>& transcript,
                            std::size_t begin) {
  for (std::size_t i = begin; i < transcript.size(); ++i) {
    const auto& e = transcript[i];
    nlohmann::json rec = {{"region", detail::encode(e.query.region)},
                          {"label", to_int(e.query.label)},
                          {"answer", e.answer ? 1 : 0}};
    out << rec.dump() << '\n';
  }
}

void write_predictions_csv(std::ostream& out, const LearnResult& r) {
  out << "id,label\n";
  for (std::size_t id = 0; id < r.predictions.size(); ++id) {
    out << id << ',';
    if (r.predictions[id]) out << to_int(*r.predictions[id]);
    out << '\n';
  }
}

}  // namespace regionq
