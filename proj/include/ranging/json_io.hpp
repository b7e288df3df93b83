#ifndef RANGING_JSON_IO_HPP
#define RANGING_JSON_IO_HPP

#include "ranging/config.hpp"
#include "ranging/detector.hpp"
#include "ranging/handover.hpp"
#include "ranging/harness.hpp"
#include "ranging/ofdma_model.hpp"

#include <json.hpp>

namespace ranging {

using Json = nlohmann::json;

// Complex vectors are written as {"re": [...], "im": [...]}.
Json to_json(const CVector& v);
CVector complex_vector_from_json(const Json& j);

Json to_json(const RunConfig& config);
Json to_json(const RangingScenario& scenario);
RangingScenario scenario_from_json(const Json& j);
Json to_json(const DetectionResult& result);
Json to_json(const HandoverReport& report);
Json to_json(const TrialMetrics& metrics);
Json to_json(const CellSummary& cell);

}  // namespace ranging

#endif  // RANGING_JSON_IO_HPP
