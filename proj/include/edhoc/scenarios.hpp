#pragma once

#include <string>
#include <vector>

#include "edhoc/game.hpp"

namespace edhoc {

// Result of one scripted adversarial schedule, together with the
// predicate verdicts it produced and whether they match the schedule's
// expected outcome.
struct ScenarioOutcome {
    std::string name;
    bool sound = false;
    bool fresh = false;
    bool explicit_auth = false;
    int finalize_kp = -1;  // -1 when the schedule performs no Test query
    bool forgery = false;  // scenario-specific adversarial event occurred
    uint64_t attempts = 0;
    std::string detail;
    std::vector<std::string> trace;
    bool ok = false;
};

// Scenario names: "honest-N" (N concurrent honest handshakes among four
// users, interleaved at random), "forge-responder" and
// "forge-initiator" (tag-guessing impersonation until first success;
// run these with a small tag length), "corrupt-after-accept" and
// "corrupt-before-accept" (long-term key reveal around a Test query).
std::vector<std::string> scenario_names();
bool is_scenario_name(const std::string& name);

ScenarioOutcome run_scenario(const std::string& name, const SuiteParams& suite,
                             uint64_t seed);

}  // namespace edhoc
