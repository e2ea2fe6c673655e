#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "interlab/completion.hpp"
#include "interlab/experiment.hpp"
#include "interlab/fock.hpp"

namespace interlab {

struct Site {
    std::string label;
    std::array<double, 4> coords{};  // (t, x, y, z), units c = 1
};

enum class CausalRelation { precedes, succeeds, spacelike, identical };

// Minkowski interval dt^2 - |dr|^2; null separation counts as causal.
CausalRelation causal_relation(const Site& a, const Site& b);

// Finite probabilistic event model: one outcome alphabet per site and a
// single joint distribution over the full product, stored site-major (the
// first site is the most significant digit). Every marginal is derived from
// the one joint, so marginal consistency holds by construction.
struct PEModel {
    std::vector<Site> sites;
    std::vector<std::vector<std::string>> alphabets;
    std::vector<double> joint;

    // Conserved-count summaries: particle-count distributions entering the
    // input cones and the output cone.
    bool has_number_annotations = false;
    std::map<int, double> input_cone_numbers;
    std::map<int, double> output_cone_numbers;

    std::size_t site_index(const std::string& label) const;  // UnknownLabel
    std::size_t outcome_count(std::size_t site) const;
    std::size_t joint_size() const;
    void validate() const;

    // Marginal over the given sites (ascending site order in the result).
    std::vector<double> marginal(const std::vector<std::size_t>& subset) const;
};

bool geometry_check(const PEModel& model, const std::vector<std::string>& inputs,
                    const std::string& output);

// Parity-correlation interference of the events
// at the inputs against the output. Throws ZeroProbabilityCondition when a
// conditioning input pattern has probability zero.
double event_interference(const PEModel& model, const std::vector<std::string>& inputs,
                          const std::string& output);

// The induced conditional table P(output | inputs), for bridging into the
// interference metrics.
ConditionalTable induced_table(const PEModel& model,
                               const std::vector<std::string>& inputs,
                               const std::string& output);

// maps[site][fine_outcome] = coarse_outcome; every map must be surjective.
using RefinementMaps = std::vector<std::vector<std::size_t>>;

bool is_refinement(const PEModel& fine, const PEModel& coarse,
                   const RefinementMaps& maps);

struct RefinementVerdict {
    bool valid_refinement = false;
    bool implication_holds = false;
    std::string counterexample;
};

struct CommonCauseVerdict {
    // Condition 3 quantifies over all refinements; a finite list can only
    // refute, never decide.
    bool universally_decided = false;
    std::vector<RefinementVerdict> refinements;
    bool all_pass() const;
};

CommonCauseVerdict check_common_cause_exclusion(
    const PEModel& model, const std::vector<std::string>& inputs,
    const std::string& output, const std::string& cause_site,
    const std::vector<std::pair<PEModel, RefinementMaps>>& refinements);

struct LocalCompletionQuery {
    std::vector<std::string> inputs;
    std::string output;
    std::vector<std::string> mediators;
    // subsets[i]: the inputs mediator i may depend on. With a z site, the
    // subsets may additionally depend on z's outcome.
    std::vector<std::vector<std::string>> subsets;
    std::optional<std::string> z_site;
    std::map<std::string, std::vector<std::vector<std::string>>> z_subsets;
};

struct LocalCompletionVerdict {
    bool past_agreement = false;       // condition 1
    double past_residual = 0.0;
    std::string past_note;
    bool preservation = false;         // condition 2
    double preservation_residual = 0.0;
    bool mediation_chain = false;      // condition 3
    double chain_residual = 0.0;
    bool bounded_dependence = false;   // condition 4
    double dependence_residual = 0.0;
    bool no_trivializer_decided = false;  // condition 5 is never decided here
    bool conditions_1_to_4() const {
        return past_agreement && preservation && mediation_chain && bounded_dependence;
    }
};

// Local-completion conditions 1-4 between a base phenomenon and a completed one.
// Geometry violations (mediators outside the input future or the output past,
// or not mutually spacelike) throw GeometryError.
LocalCompletionVerdict check_local_completion(const PEModel& base,
                                              const PEModel& completed,
                                              const LocalCompletionQuery& query);

// Closedness check on the annotated summaries. Throws AnnotationError when
// the annotations are missing.
bool check_closed(const PEModel& model);

// Canonical geometry: inputs on the unit circle at t = 0, mediators above
// them at t = 1, the output at the origin at t = 2.
PEModel export_table_to_pemodel(const ConditionalTable& table);
PEModel export_completion_to_pemodel(const CompletionArtifact& artifact);

// Built-in models.
PEModel example1_pemodel();
PEModel example1_star_pemodel();
// Example-1 base extended with a trivial common-cause site plus a refinement
// exposing it; `conspiratorial` wires the exposed site into the output.
struct CommonCauseScenario {
    PEModel coarse;
    PEModel fine;
    RefinementMaps maps;
};
CommonCauseScenario conspiratorial_scenario();
CommonCauseScenario independent_cause_scenario();

// Count-annotated exports of the bridged scenarios.
PEModel example3_closed_export(int n);
PEModel photon_completion_export();
PEModel electron_completion_export();

} // namespace interlab
