#ifndef LCM_REPORT_HPP
#define LCM_REPORT_HPP

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "lcm/ident.hpp"
#include "lcm/ioeq.hpp"
#include "lcm/mammillary.hpp"
#include "lcm/model.hpp"

namespace lcm {

/* JSON renderers for every report the tool emits. All of them use ordered
 * JSON and deterministic value formatting (exact rationals as strings,
 * doubles through the shortest-roundtrip dump), so a fixed seed yields
 * byte-identical output. */
using OrderedJson = nlohmann::ordered_json;

OrderedJson tool_info();  // {"name", "version"}

OrderedJson model_json(const Model& m);
OrderedJson point_json(const ParamPoint& p);  // exact values as "p/q" strings
OrderedJson validation_json(const ValidationReport& v);
OrderedJson coefficient_map_json(const CoefficientMap& cm);
OrderedJson cross_validation_json(const CrossValidation& cv);
OrderedJson evidence_json(const Evidence& e);
OrderedJson verdict_json(const Verdict& v);
OrderedJson verdicts_json(const std::vector<Verdict>& vs);
OrderedJson model_ident_json(const ModelIdentifiability& mi);
OrderedJson fiber_json(const FiberReport& fr);
OrderedJson recovery_json(const Recovery& r);
OrderedJson exact_recovery_json(const ExactRecovery& r);
OrderedJson table_json(const ClassificationTable& t);

// The same table as a markdown document: one row per (family, n, parameter).
std::string table_markdown(const ClassificationTable& t);

// Two-space indented dump with a trailing newline.
std::string render(const OrderedJson& doc);

}  // namespace lcm

#endif
