#pragma once

#include <json.hpp>

#include "tangraph/report_io.hpp"

namespace tangraph::json_io {

using nlohmann::json;

json number(double v);
json vec(const Vec& v);
json point(const ParamPoint& p);
json params(const Params& p);

json value(const GraphSample& sample);
json value(const NormEstimates& norms);
json value(const Witness& witness);
json value(const PropertyVerdict& verdict);
json value(const RadiusReport& report);
json value(const TheoremVerdict& verdict);
json value(const EnlargementResult& result);
json value(const DistanceResult& result);
json value(const InclusionResult& result);
json value(const CertifiedDuBound& bound);
json value(const IterationConstants& constants);
json value(const CounterexampleReport& report);

}  // namespace tangraph::json_io
