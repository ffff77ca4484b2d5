#pragma once

// JSON and CSV serialization of reports. JSON output is indented text with
// non-finite numbers written as null.

#include <ostream>
#include <string>

#include "tangraph/extract.hpp"
#include "tangraph/radius.hpp"
#include "tangraph/theorem_lab.hpp"

namespace tangraph {

inline constexpr int kSchemaVersion = 1;

const char* version();

std::string to_json(const GraphSample& sample);
std::string to_json(const NormEstimates& norms);
std::string to_json(const PropertyVerdict& verdict);
std::string to_json(const RadiusReport& report);
std::string to_json(const TheoremVerdict& verdict);
std::string to_json(const EnlargementResult& result);
std::string to_json(const DistanceResult& result);
std::string to_json(const InclusionResult& result);
std::string to_json(const CertifiedDuBound& bound);
std::string to_json(const IterationConstants& constants);
std::string to_json(const CounterexampleReport& report);

// Header x1..xm,u1..uk,status,du_norm; du_norm is empty without a derivative.
void write_csv(std::ostream& out, const GraphSample& sample);
// Header x1..xm,certified,actual.
void write_csv(std::ostream& out, const CertifiedDuBound& bound);

}  // namespace tangraph
