#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "ktsim/experimenting.hpp"
#include "ktsim/ground_truth.hpp"
#include "ktsim/knowledge.hpp"
#include "ktsim/labeling.hpp"
#include "ktsim/metrics.hpp"
#include "ktsim/mining.hpp"

namespace ktsim {

// Claims: {"u": int, "v": int, "polarity": "dep"|"indep", "confidence": float}.
nlohmann::json to_json(const WeightedClaim& wc);
nlohmann::json to_json(const KnowledgeBase& kb);
KnowledgeBase knowledge_base_from_json(const nlohmann::json& arr);

nlohmann::json to_json(const TeamId& id);
nlohmann::json to_json(const Datasheet& ds);
Datasheet datasheet_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const Pattern& p);
nlohmann::json to_json(const InfoSheet& s);
nlohmann::json to_json(const Information& info);

nlohmann::json to_json(const LabeledKnowledge& lk);
nlohmann::json to_json(const OpennessReport& r);
nlohmann::json to_json(const GroundTruth& gt);

// Header row of variable ids, then one 0/1 row per sample.
std::string dataset_csv(const Dataset& ds);

// Shortest round-trip decimal form of a double.
std::string format_double(double x);

}  // namespace ktsim
