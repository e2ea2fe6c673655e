#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "interlab/completion.hpp"
#include "interlab/events.hpp"
#include "interlab/experiment.hpp"

namespace interlab {

using ordered_json = nlohmann::ordered_json;

struct TableBlock {
    std::string name;
    ConditionalTable table;
};

struct ReportCheck {
    std::string name;
    bool pass = false;
    double residual = 0.0;
    std::string detail;
};

// One scenario run: summary values, tables, declared checks. JSON keys keep
// insertion order; CSV probabilities carry 12 decimal digits.
struct Report {
    std::string scenario;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::vector<std::pair<std::string, std::string>> summary;
    std::vector<TableBlock> tables;
    std::vector<ReportCheck> checks;
    // Extra artifacts written alongside the report (name -> serialized JSON).
    std::vector<std::pair<std::string, ordered_json>> attachments;

    bool all_pass() const;
    void add_check(const std::string& name, bool pass, double residual,
                   const std::string& detail = "");
    void add_value(const std::string& name, double value);
};

std::string format_probability(double value);  // fixed 12 decimals
std::string table_to_csv(const ConditionalTable& table);

ordered_json report_to_json(const Report& report);

// Writes <dir>/<scenario>.json plus one CSV per table
// (<dir>/<scenario>.<table>.csv) and any attachments; returns the file paths.
std::vector<std::string> write_report_files(const Report& report,
                                            const std::string& dir);

// Matrix / experiment / artifact serialization; complex entries are [re, im]
// pairs, matrices are row-major nested arrays.
ordered_json operator_to_json(const ComplexOperator& op);
ComplexOperator operator_from_json(const ordered_json& j);
ordered_json state_to_json(const StateVector& v);
StateVector state_from_json(const ordered_json& j);
ordered_json triple_to_json(const ExperimentTriple& triple);
ExperimentTriple triple_from_json(const ordered_json& j);
ordered_json artifact_to_json(const CompletionArtifact& artifact);
CompletionArtifact artifact_from_json(const ordered_json& j);
ordered_json pemodel_to_json(const PEModel& model);
PEModel pemodel_from_json(const ordered_json& j);

} // namespace interlab
