#pragma once

#include <json.hpp>
#include <string>

#include "genlearn/dataset.hpp"
#include "genlearn/diagnostics.hpp"
#include "genlearn/solution.hpp"
#include "genlearn/solver.hpp"

namespace genlearn {

using json = nlohmann::json;

json to_json(const KernelSpec& spec);
KernelSpec kernel_from_json(const json& j);

json to_json(const Functional& xi);
Functional functional_from_json(const json& j);

// {"kernel":{...},"blocks":[{"functionals":[...],"y":[...],
//  "loss":{"loss":"square"|"hinge"|"absolute","weights":[...]},"rho":r}]}
json to_json(const GeneralizedDataset& ds);
GeneralizedDataset dataset_from_json(const json& j);

// Representer, feature and network expansions round-trip; reference
// functions are not serializable.
json to_json(const Solution& f);
Solution solution_from_json(const json& j);

json to_json(const SolverConfig& cfg);
// Fields missing from `j` keep their value in `base`.
SolverConfig solver_config_from_json(const json& j, SolverConfig base = {});

json to_json(const RepresenterReport& r);
json to_json(const MinNormReport& r);
json to_json(const ConditionIIReport& r);
// Verdict summary of a sweep (no per-cell timings).
json verdict_json(const SweepResult& r);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
json read_json(const std::string& path);

GeneralizedDataset load_dataset(const std::string& path);
Solution load_solution(const std::string& path);

}  // namespace genlearn
