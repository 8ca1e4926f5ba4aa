#pragma once

// nlohmann::json conversions shared by the library sources. Not installed.

#include <json.hpp>

#include "regionq/hypothesis.hpp"
#include "regionq/regions.hpp"

namespace regionq::detail {

using nlohmann::json;

json encode_real(double v);
double decode_real(const json& j);
json encode_point(PointView p);
Point decode_point(const json& j);
json encode_matrix(const Eigen::MatrixXd& m);
Eigen::MatrixXd decode_matrix(const json& j);

json encode(const Hypothesis& h);
Hypothesis decode_hypothesis(const json& j);
json encode(const RegionDescriptor& r);
RegionDescriptor decode_region(const json& j);

}  // namespace regionq::detail
