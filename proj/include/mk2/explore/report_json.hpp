#pragma once

#include <nlohmann/json.hpp>

#include "mk2/explore/compare.hpp"
#include "mk2/explore/order.hpp"

namespace mk2::explore {

inline constexpr const char* kToolVersion = "0.1.0";

nlohmann::ordered_json trace_to_json(const Trace& t, const model::ModelDefs& defs);
nlohmann::ordered_json report_to_json(const ExplorationReport& r, const model::ModelDefs& defs,
                                      const std::string& model_id, const std::string& variant);
nlohmann::ordered_json comparison_to_json(const ProtocolComparison& c,
                                          const scj::ModelBundle& current,
                                          const scj::ModelBundle& proposed,
                                          const std::string& topology);
nlohmann::ordered_json order_result_to_json(const OrderResult& r, const model::ModelDefs& defs,
                                            const std::string& model_id);

} // namespace mk2::explore
