#include "interlab/events.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

namespace interlab {

CausalRelation causal_relation(const Site& a, const Site& b) {
    const double dt = b.coords[0] - a.coords[0];
    double dr2 = 0.0;
    for (int i = 1; i < 4; ++i) {
        const double d = b.coords[i] - a.coords[i];
        dr2 += d * d;
    }
    if (dt == 0.0 && dr2 == 0.0) return CausalRelation::identical;
    const double interval = dt * dt - dr2;
    if (interval < 0.0) return CausalRelation::spacelike;
    if (dt > 0.0) return CausalRelation::precedes;
    if (dt < 0.0) return CausalRelation::succeeds;
    // dt = 0 with zero interval and dr2 > 0 cannot happen; dr2 = 0 handled.
    return CausalRelation::spacelike;
}

// ---------------------------------------------------------------------------
// PEModel

std::size_t PEModel::site_index(const std::string& label) const {
    for (std::size_t i = 0; i < sites.size(); ++i)
        if (sites[i].label == label) return i;
    throw UnknownLabel("unknown site '" + label + "'");
}

std::size_t PEModel::outcome_count(std::size_t site) const {
    return alphabets.at(site).size();
}

std::size_t PEModel::joint_size() const {
    std::size_t total = 1;
    for (const auto& alphabet : alphabets) total *= alphabet.size();
    return total;
}

void PEModel::validate() const {
    if (sites.size() != alphabets.size())
        throw DomainError("site/alphabet count mismatch");
    for (const auto& alphabet : alphabets)
        if (alphabet.empty()) throw DomainError("empty outcome alphabet");
    std::set<std::string> seen;
    for (const auto& site : sites)
        if (!seen.insert(site.label).second)
            throw DomainError("duplicate site label '" + site.label + "'");
    if (joint.size() != joint_size())
        throw DomainError("joint table size mismatch");
    double total = 0.0;
    for (double p : joint) {
        if (p < -EPS_EQ) throw DomainError("negative joint probability");
        total += p;
    }
    if (std::abs(total - 1.0) > EPS_EQ)
        throw DomainError("joint distribution does not sum to 1");
}

std::vector<double> PEModel::marginal(const std::vector<std::size_t>& subset) const {
    std::size_t out_size = 1;
    for (auto s : subset) out_size *= outcome_count(s);
    std::vector<double> out(out_size, 0.0);

    // Strides of each site in the flattened joint index.
    std::vector<std::size_t> strides(sites.size(), 1);
    for (std::size_t i = sites.size(); i-- > 1;)
        strides[i - 1] = strides[i] * outcome_count(i);

    for (std::size_t idx = 0; idx < joint.size(); ++idx) {
        std::size_t reduced = 0;
        for (auto s : subset)
            reduced = reduced * outcome_count(s) + (idx / strides[s]) % outcome_count(s);
        out[reduced] += joint[idx];
    }
    return out;
}

namespace {

// Outcome tuple enumeration over a site subset, joint-major in subset order.
std::vector<std::size_t> tuple_from_index(const PEModel& model,
                                          const std::vector<std::size_t>& subset,
                                          std::size_t index) {
    std::vector<std::size_t> out(subset.size(), 0);
    for (std::size_t i = subset.size(); i-- > 0;) {
        out[i] = index % model.outcome_count(subset[i]);
        index /= model.outcome_count(subset[i]);
    }
    return out;
}

std::size_t subset_size(const PEModel& model, const std::vector<std::size_t>& subset) {
    std::size_t total = 1;
    for (auto s : subset) total *= model.outcome_count(s);
    return total;
}

// P(outcomes at `targets` | outcomes at `given`), flattened over targets, or
// nullopt when the conditioning event has probability zero.
std::optional<std::vector<double>> conditional(
    const PEModel& model, const std::vector<std::size_t>& targets,
    const std::vector<std::size_t>& given, const std::vector<std::size_t>& given_tuple) {
    std::vector<std::size_t> all = targets;
    all.insert(all.end(), given.begin(), given.end());
    // marginal() wants ascending subsets only through outcome arithmetic; the
    // order passed here defines the flattening, which is what we use.
    std::vector<double> joint_tg(subset_size(model, all), 0.0);
    {
        std::vector<std::size_t> strides(model.sites.size(), 1);
        for (std::size_t i = model.sites.size(); i-- > 1;)
            strides[i - 1] = strides[i] * model.outcome_count(i);
        for (std::size_t idx = 0; idx < model.joint.size(); ++idx) {
            std::size_t reduced = 0;
            for (auto s : all)
                reduced = reduced * model.outcome_count(s) +
                          (idx / strides[s]) % model.outcome_count(s);
            joint_tg[reduced] += model.joint[idx];
        }
    }
    const std::size_t target_size = subset_size(model, targets);
    std::size_t given_index = 0;
    for (std::size_t i = 0; i < given.size(); ++i)
        given_index = given_index * model.outcome_count(given[i]) + given_tuple[i];

    double denom = 0.0;
    for (std::size_t t = 0; t < target_size; ++t)
        denom += joint_tg[t * subset_size(model, given) + given_index];
    if (denom <= 0.0) return std::nullopt;

    std::vector<double> out(target_size, 0.0);
    for (std::size_t t = 0; t < target_size; ++t)
        out[t] = joint_tg[t * subset_size(model, given) + given_index] / denom;
    return out;
}

} // namespace

bool geometry_check(const PEModel& model, const std::vector<std::string>& inputs,
                    const std::string& output) {
    const std::size_t out_site = model.site_index(output);
    std::vector<std::size_t> in_sites;
    for (const auto& label : inputs) in_sites.push_back(model.site_index(label));
    for (std::size_t i = 0; i < in_sites.size(); ++i) {
        for (std::size_t j = i + 1; j < in_sites.size(); ++j)
            if (causal_relation(model.sites[in_sites[i]], model.sites[in_sites[j]]) !=
                CausalRelation::spacelike)
                return false;
        if (causal_relation(model.sites[in_sites[i]], model.sites[out_site]) !=
            CausalRelation::precedes)
            return false;
    }
    return true;
}

double event_interference(const PEModel& model, const std::vector<std::string>& inputs,
                          const std::string& output) {
    model.validate();
    const std::size_t out_site = model.site_index(output);
    std::vector<std::size_t> in_sites;
    for (const auto& label : inputs) in_sites.push_back(model.site_index(label));
    if (model.outcome_count(out_site) != 2)
        throw DomainError("output alphabet must be binary");
    for (auto s : in_sites)
        if (model.outcome_count(s) != 2)
            throw DomainError("input alphabets must be binary");
    if (!geometry_check(model, inputs, output))
        throw GeometryError("inputs not mutually spacelike before the output");

    const std::size_t rows = 1ULL << inputs.size();
    double acc = 0.0;
    for (std::size_t k = 0; k < rows; ++k) {
        const auto tuple = tuple_from_index(model, in_sites, k);
        const auto cond = conditional(model, {out_site}, in_sites, tuple);
        if (!cond)
            throw ZeroProbabilityCondition("input pattern " + std::to_string(k) +
                                           " has probability zero");
        std::size_t parity = 0;
        for (auto w : tuple) parity ^= (w & 1ULL);
        acc += (*cond)[parity];
    }
    return acc / static_cast<double>(rows) - 0.5;
}

ConditionalTable induced_table(const PEModel& model,
                               const std::vector<std::string>& inputs,
                               const std::string& output) {
    const std::size_t out_site = model.site_index(output);
    std::vector<std::size_t> in_sites;
    for (const auto& label : inputs) in_sites.push_back(model.site_index(label));

    ConditionalTable table;
    table.input_count = static_cast<int>(inputs.size());
    table.outcome_labels = model.alphabets[out_site];
    const std::size_t rows = 1ULL << inputs.size();
    for (std::size_t k = 0; k < rows; ++k) {
        const auto tuple = tuple_from_index(model, in_sites, k);
        const auto cond = conditional(model, {out_site}, in_sites, tuple);
        if (!cond)
            throw ZeroProbabilityCondition("input pattern has probability zero");
        table.rows.push_back(*cond);
    }
    return table;
}

bool is_refinement(const PEModel& fine, const PEModel& coarse,
                   const RefinementMaps& maps) {
    fine.validate();
    coarse.validate();
    if (fine.sites.size() != coarse.sites.size())
        throw MapError("refinement requires the same site set");
    for (std::size_t s = 0; s < fine.sites.size(); ++s) {
        if (fine.sites[s].label != coarse.sites[s].label)
            throw MapError("site sets differ at position " + std::to_string(s));
        if (maps.at(s).size() != fine.outcome_count(s))
            throw MapError("map domain does not match the fine alphabet");
        std::vector<bool> hit(coarse.outcome_count(s), false);
        for (auto target : maps[s]) {
            if (target >= coarse.outcome_count(s))
                throw MapError("map target outside the coarse alphabet");
            hit[target] = true;
        }
        if (!std::all_of(hit.begin(), hit.end(), [](bool b) { return b; }))
            throw MapError("coarse-graining map is not surjective");
    }

    // Pushforward of the fine joint must reproduce the coarse joint.
    std::vector<double> pushed(coarse.joint.size(), 0.0);
    std::vector<std::size_t> fine_strides(fine.sites.size(), 1);
    for (std::size_t i = fine.sites.size(); i-- > 1;)
        fine_strides[i - 1] = fine_strides[i] * fine.outcome_count(i);
    for (std::size_t idx = 0; idx < fine.joint.size(); ++idx) {
        std::size_t coarse_idx = 0;
        for (std::size_t s = 0; s < fine.sites.size(); ++s) {
            const std::size_t fine_outcome =
                (idx / fine_strides[s]) % fine.outcome_count(s);
            coarse_idx = coarse_idx * coarse.outcome_count(s) + maps[s][fine_outcome];
        }
        pushed[coarse_idx] += fine.joint[idx];
    }
    for (std::size_t i = 0; i < pushed.size(); ++i)
        if (std::abs(pushed[i] - coarse.joint[i]) > EPS_EQ) return false;
    return true;
}

bool CommonCauseVerdict::all_pass() const {
    for (const auto& r : refinements)
        if (!r.valid_refinement || !r.implication_holds) return false;
    return true;
}

CommonCauseVerdict check_common_cause_exclusion(
    const PEModel& model, const std::vector<std::string>& inputs,
    const std::string& output, const std::string& cause_site,
    const std::vector<std::pair<PEModel, RefinementMaps>>& refinements) {
    CommonCauseVerdict verdict;
    verdict.universally_decided = false;  // only the supplied list is checked

    for (const auto& [fine, maps] : refinements) {
        RefinementVerdict entry;
        entry.valid_refinement = is_refinement(fine, model, maps);
        // Alphabets at the inputs and the output must be untouched.
        for (const auto& label : inputs) {
            const std::size_t s = fine.site_index(label);
            if (fine.outcome_count(s) != model.outcome_count(model.site_index(label)))
                entry.valid_refinement = false;
        }
        if (fine.outcome_count(fine.site_index(output)) !=
            model.outcome_count(model.site_index(output)))
            entry.valid_refinement = false;

        std::vector<std::size_t> in_sites;
        for (const auto& label : inputs) in_sites.push_back(fine.site_index(label));
        const std::size_t out_site = fine.site_index(output);
        const std::size_t z_site = fine.site_index(cause_site);

        entry.implication_holds = true;
        const std::size_t in_count = subset_size(fine, in_sites);
        for (std::size_t k = 0; k < in_count && entry.implication_holds; ++k) {
            const auto in_tuple = tuple_from_index(fine, in_sites, k);
            const auto base = conditional(fine, {out_site}, in_sites, in_tuple);
            if (!base) continue;
            for (std::size_t z = 0; z < fine.outcome_count(z_site); ++z) {
                std::vector<std::size_t> given = in_sites;
                given.push_back(z_site);
                auto given_tuple = in_tuple;
                given_tuple.push_back(z);
                const auto with_z = conditional(fine, {out_site}, given, given_tuple);
                if (!with_z) continue;
                bool antecedent = false;
                for (std::size_t b = 0; b < with_z->size(); ++b)
                    if (std::abs((*with_z)[b] - (*base)[b]) > EPS_EQ) antecedent = true;
                if (!antecedent) continue;
                // The cause influences the output beyond the inputs; it must
                // then be uncorrelated with the inputs.
                const auto inputs_given_z =
                    conditional(fine, in_sites, {z_site}, {z});
                const auto inputs_plain =
                    conditional(fine, in_sites, {}, {});
                if (!inputs_given_z || !inputs_plain) continue;
                for (std::size_t t = 0; t < inputs_plain->size(); ++t)
                    if (std::abs((*inputs_given_z)[t] - (*inputs_plain)[t]) > EPS_EQ) {
                        entry.implication_holds = false;
                        entry.counterexample =
                            "input pattern " + std::to_string(k) + ", cause outcome " +
                            std::to_string(z);
                        break;
                    }
                if (!entry.implication_holds) break;
            }
        }
        verdict.refinements.push_back(std::move(entry));
    }
    return verdict;
}

// ---------------------------------------------------------------------------
// Local-completion conditions 1-4

LocalCompletionVerdict check_local_completion(const PEModel& base,
                                              const PEModel& completed,
                                              const LocalCompletionQuery& query) {
    base.validate();
    completed.validate();

    // Geometry of the mediators.
    const std::size_t out_site = completed.site_index(query.output);
    std::vector<std::size_t> mediator_sites;
    for (const auto& label : query.mediators)
        mediator_sites.push_back(completed.site_index(label));
    for (std::size_t i = 0; i < mediator_sites.size(); ++i) {
        const Site& site = completed.sites[mediator_sites[i]];
        bool after_some_input = false;
        for (const auto& in : query.inputs) {
            const CausalRelation rel =
                causal_relation(completed.sites[completed.site_index(in)], site);
            if (rel == CausalRelation::precedes) after_some_input = true;
        }
        if (!after_some_input)
            throw GeometryError("mediator " + query.mediators[i] +
                                " is not in the causal future of the inputs");
        if (causal_relation(site, completed.sites[out_site]) != CausalRelation::precedes)
            throw GeometryError("mediator " + query.mediators[i] +
                                " is not in the causal past of the output");
        for (std::size_t j = i + 1; j < mediator_sites.size(); ++j)
            if (causal_relation(site, completed.sites[mediator_sites[j]]) !=
                CausalRelation::spacelike)
                throw GeometryError("mediators are not mutually spacelike");
    }

    LocalCompletionVerdict verdict;

    // Condition 1: the two joints agree on every site strictly before the
    // inputs (shared by label).
    {
        std::vector<std::size_t> base_past, completed_past;
        for (std::size_t s = 0; s < base.sites.size(); ++s) {
            bool in_past = false;
            for (const auto& in : query.inputs)
                if (causal_relation(base.sites[s],
                                    base.sites[base.site_index(in)]) ==
                    CausalRelation::precedes)
                    in_past = true;
            if (!in_past) continue;
            // Must exist in the completed model too.
            const std::size_t cs = completed.site_index(base.sites[s].label);
            base_past.push_back(s);
            completed_past.push_back(cs);
        }
        if (base_past.empty()) {
            verdict.past_agreement = true;
            verdict.past_note = "no modeled sites strictly before the inputs";
        } else {
            const auto lhs = base.marginal(base_past);
            const auto rhs = completed.marginal(completed_past);
            double residual = 0.0;
            for (std::size_t i = 0; i < lhs.size(); ++i)
                residual = std::max(residual, std::abs(lhs[i] - rhs[i]));
            verdict.past_residual = residual;
            verdict.past_agreement = residual <= EPS_EQ;
        }
    }

    // Condition 2: P*(output | inputs) = P(output | inputs).
    {
        std::vector<std::size_t> base_in, comp_in;
        for (const auto& in : query.inputs) {
            base_in.push_back(base.site_index(in));
            comp_in.push_back(completed.site_index(in));
        }
        const std::size_t base_out = base.site_index(query.output);
        double residual = 0.0;
        const std::size_t count = subset_size(base, base_in);
        for (std::size_t k = 0; k < count; ++k) {
            const auto tuple = tuple_from_index(base, base_in, k);
            const auto lhs = conditional(base, {base_out}, base_in, tuple);
            const auto rhs = conditional(completed, {out_site}, comp_in, tuple);
            if (!lhs || !rhs) continue;
            for (std::size_t b = 0; b < lhs->size(); ++b)
                residual = std::max(residual, std::abs((*lhs)[b] - (*rhs)[b]));
        }
        verdict.preservation_residual = residual;
        verdict.preservation = residual <= EPS_EQ;
    }

    // Condition 3: the chain through the mediators.
    {
        std::vector<std::size_t> comp_in;
        for (const auto& in : query.inputs) comp_in.push_back(completed.site_index(in));
        double residual = 0.0;
        const std::size_t in_count = subset_size(completed, comp_in);
        const std::size_t med_count = subset_size(completed, mediator_sites);
        for (std::size_t k = 0; k < in_count; ++k) {
            const auto in_tuple = tuple_from_index(completed, comp_in, k);
            const auto direct = conditional(completed, {out_site}, comp_in, in_tuple);
            const auto med_given_in =
                conditional(completed, mediator_sites, comp_in, in_tuple);
            if (!direct || !med_given_in) continue;
            std::vector<double> chained(direct->size(), 0.0);
            for (std::size_t w = 0; w < med_count; ++w) {
                if ((*med_given_in)[w] <= 0.0) continue;
                const auto med_tuple = tuple_from_index(completed, mediator_sites, w);
                const auto out_given_med =
                    conditional(completed, {out_site}, mediator_sites, med_tuple);
                if (!out_given_med) continue;
                for (std::size_t b = 0; b < chained.size(); ++b)
                    chained[b] += (*out_given_med)[b] * (*med_given_in)[w];
            }
            for (std::size_t b = 0; b < chained.size(); ++b)
                residual = std::max(residual, std::abs(chained[b] - (*direct)[b]));
        }
        verdict.chain_residual = residual;
        verdict.mediation_chain = residual <= EPS_EQ;
    }

    // Condition 4: each mediator depends on at most ceil(m/n) inputs.
    {
        const std::size_t m = query.inputs.size();
        const std::size_t n = query.mediators.size();
        const std::size_t bound = (m + n - 1) / n;
        std::vector<std::size_t> comp_in;
        for (const auto& in : query.inputs) comp_in.push_back(completed.site_index(in));

        double residual = 0.0;
        bool within_bound = true;

        const auto check_mediator = [&](std::size_t mediator_site,
                                        const std::vector<std::string>& subset,
                                        std::optional<std::size_t> z_site,
                                        std::optional<std::size_t> z_outcome) {
            if (subset.size() > bound) {
                within_bound = false;
                return;
            }
            std::vector<std::size_t> sub_sites;
            for (const auto& label : subset)
                sub_sites.push_back(completed.site_index(label));
            const std::size_t in_count = subset_size(completed, comp_in);
            for (std::size_t k = 0; k < in_count; ++k) {
                auto in_tuple = tuple_from_index(completed, comp_in, k);
                std::vector<std::size_t> full_sites = comp_in;
                auto full_tuple = in_tuple;
                if (z_site) {
                    full_sites.push_back(*z_site);
                    full_tuple.push_back(*z_outcome);
                }
                const auto lhs =
                    conditional(completed, {mediator_site}, full_sites, full_tuple);
                if (!lhs) continue;
                // Restriction of the input tuple to the subset.
                std::vector<std::size_t> sub_tuple;
                for (const auto& label : subset) {
                    const auto it = std::find(query.inputs.begin(), query.inputs.end(),
                                              label);
                    if (it == query.inputs.end())
                        throw UnknownLabel("subset names a non-input site");
                    sub_tuple.push_back(
                        in_tuple[static_cast<std::size_t>(it - query.inputs.begin())]);
                }
                std::vector<std::size_t> sub_sites_full = sub_sites;
                if (z_site) {
                    sub_sites_full.push_back(*z_site);
                    sub_tuple.push_back(*z_outcome);
                }
                const auto rhs = conditional(completed, {mediator_site},
                                             sub_sites_full, sub_tuple);
                if (!rhs) continue;
                for (std::size_t b = 0; b < lhs->size(); ++b)
                    residual = std::max(residual, std::abs((*lhs)[b] - (*rhs)[b]));
            }
        };

        if (query.z_site) {
            const std::size_t z = completed.site_index(*query.z_site);
            for (std::size_t zo = 0; zo < completed.outcome_count(z); ++zo) {
                const auto& subsets =
                    query.z_subsets.count(completed.alphabets[z][zo])
                        ? query.z_subsets.at(completed.alphabets[z][zo])
                        : query.subsets;
                for (std::size_t i = 0; i < mediator_sites.size(); ++i)
                    check_mediator(mediator_sites[i], subsets.at(i), z, zo);
            }
        } else {
            for (std::size_t i = 0; i < mediator_sites.size(); ++i)
                check_mediator(mediator_sites[i], query.subsets.at(i), std::nullopt,
                               std::nullopt);
        }
        verdict.dependence_residual = residual;
        verdict.bounded_dependence = within_bound && residual <= EPS_EQ;
    }

    verdict.no_trivializer_decided = false;  // quantifies over all refinements
    return verdict;
}

bool check_closed(const PEModel& model) {
    if (!model.has_number_annotations)
        throw AnnotationError("model carries no particle-count annotations");
    std::set<int> keys;
    for (const auto& [k, v] : model.input_cone_numbers) keys.insert(k);
    for (const auto& [k, v] : model.output_cone_numbers) keys.insert(k);
    for (int k : keys) {
        const double lhs = model.input_cone_numbers.count(k)
                               ? model.input_cone_numbers.at(k)
                               : 0.0;
        const double rhs = model.output_cone_numbers.count(k)
                               ? model.output_cone_numbers.at(k)
                               : 0.0;
        if (std::abs(lhs - rhs) > EPS_EQ) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Exporters and built-in models

namespace {

Site circle_site(const std::string& label, double t, double radius, double angle) {
    return Site{label, {t, radius * std::cos(angle), radius * std::sin(angle), 0.0}};
}

std::vector<Site> canonical_sites(int inputs, int mediators) {
    std::vector<Site> sites;
    for (int i = 0; i < inputs; ++i)
        sites.push_back(circle_site("x" + std::to_string(i + 1), 0.0, 1.0,
                                    2.0 * M_PI * i / inputs));
    for (int i = 0; i < mediators; ++i)
        sites.push_back(circle_site("m" + std::to_string(i + 1), 1.0, 0.3,
                                    2.0 * M_PI * i / std::max(mediators, 1)));
    sites.push_back(Site{"y", {2.0, 0.0, 0.0, 0.0}});
    return sites;
}

} // namespace

PEModel export_table_to_pemodel(const ConditionalTable& table) {
    if (table.input_arity != 2)
        throw DomainError("event export expects binary inputs");
    PEModel model;
    model.sites = canonical_sites(table.input_count, 0);
    for (int i = 0; i < table.input_count; ++i) model.alphabets.push_back({"0", "1"});
    model.alphabets.push_back(table.outcome_labels);

    const std::size_t rows = table.rows.size();
    const double uniform = 1.0 / static_cast<double>(rows);
    for (std::size_t k = 0; k < rows; ++k)
        for (std::size_t b = 0; b < table.outcome_labels.size(); ++b)
            model.joint.push_back(uniform * table.rows[k][b]);
    model.validate();
    return model;
}

PEModel export_completion_to_pemodel(const CompletionArtifact& artifact) {
    const ConditionalTable& mediators = artifact.pooled_mediator_table;
    const int m = mediators.input_count;
    const int n = artifact.mediator_count;

    PEModel model;
    model.sites = canonical_sites(m, n);
    for (int i = 0; i < m; ++i) model.alphabets.push_back({"0", "1"});
    for (int i = 0; i < n; ++i) model.alphabets.push_back({"0", "1"});
    model.alphabets.push_back({"0", "1"});

    // Joint over (a, bvec, b): uniform inputs, pipeline mediators, parity
    // readout. The mediator table indexes bvec with mediator 1 as the low bit;
    // site order wants mediator 1 most significant, so reverse the bits.
    const std::size_t rows = mediators.rows.size();
    const double uniform = 1.0 / static_cast<double>(rows);
    const std::size_t med_count = 1ULL << n;
    model.joint.assign(rows * med_count * 2, 0.0);
    for (std::size_t k = 0; k < rows; ++k) {
        for (std::size_t bits = 0; bits < med_count; ++bits) {
            std::size_t site_bits = 0;
            for (int i = 0; i < n; ++i)
                site_bits = (site_bits << 1) | ((bits >> i) & 1ULL);
            const int parity = static_cast<int>(std::popcount(bits) & 1U);
            const std::size_t idx =
                (k * med_count + site_bits) * 2 + static_cast<std::size_t>(parity);
            model.joint[idx] += uniform * mediators.rows[k][bits];
        }
    }
    model.validate();
    return model;
}

PEModel example1_pemodel() {
    PEModel model;
    model.sites = canonical_sites(2, 0);
    model.alphabets = {{"0", "1"}, {"0", "1"}, {"0", "1"}};
    model.joint.assign(8, 0.0);
    for (std::size_t a1 = 0; a1 < 2; ++a1)
        for (std::size_t a2 = 0; a2 < 2; ++a2)
            model.joint[(a1 * 2 + a2) * 2 + (a1 ^ a2)] = 0.25;
    model.validate();
    return model;
}

PEModel example1_star_pemodel() {
    PEModel model;
    model.sites = canonical_sites(2, 2);
    model.alphabets.assign(5, {"0", "1"});
    model.joint.assign(32, 0.0);
    for (std::size_t a1 = 0; a1 < 2; ++a1)
        for (std::size_t a2 = 0; a2 < 2; ++a2) {
            const std::size_t idx =
                (((a1 * 2 + a2) * 2 + a1) * 2 + a2) * 2 + (a1 ^ a2);
            model.joint[idx] = 0.25;
        }
    model.validate();
    return model;
}

namespace {

CommonCauseScenario cause_scenario(bool conspiratorial) {
    CommonCauseScenario scenario;
    // Sites: x1, x2 at t = 0; z at t = -1 (before everything); y at t = 2.
    std::vector<Site> sites = {
        circle_site("x1", 0.0, 1.0, 0.0),
        circle_site("x2", 0.0, 1.0, M_PI),
        Site{"z", {-1.0, 0.0, 0.0, 0.0}},
        Site{"y", {2.0, 0.0, 0.0, 0.0}},
    };

    // Coarse model: z carries a single outcome.
    scenario.coarse.sites = sites;
    scenario.coarse.alphabets = {{"0", "1"}, {"0", "1"}, {"*"}, {"0", "1"}};
    scenario.coarse.joint.assign(8, 0.0);

    scenario.fine.sites = sites;
    scenario.fine.alphabets = {{"0", "1"}, {"0", "1"}, {"0", "1"}, {"0", "1"}};
    scenario.fine.joint.assign(16, 0.0);

    for (std::size_t a1 = 0; a1 < 2; ++a1)
        for (std::size_t a2 = 0; a2 < 2; ++a2)
            for (std::size_t z = 0; z < 2; ++z) {
                double pz;
                std::size_t b;
                if (conspiratorial) {
                    // An agent at z reads the inputs (imperfectly) and steers
                    // the readout.
                    pz = (z == (a1 ^ a2)) ? 0.9 : 0.1;
                    b = z;
                } else {
                    pz = 0.5;  // independent fair bit
                    b = a1 ^ a2;
                }
                const std::size_t fine_idx = (((a1 * 2 + a2) * 2 + z) * 2 + b);
                scenario.fine.joint[fine_idx] += 0.25 * pz;
                const std::size_t coarse_idx = (((a1 * 2 + a2) * 1 + 0) * 2 + b);
                scenario.coarse.joint[coarse_idx] += 0.25 * pz;
            }

    scenario.maps = {{0, 1}, {0, 1}, {0, 0}, {0, 1}};
    scenario.coarse.validate();
    scenario.fine.validate();
    return scenario;
}

} // namespace

CommonCauseScenario conspiratorial_scenario() { return cause_scenario(true); }
CommonCauseScenario independent_cause_scenario() { return cause_scenario(false); }

PEModel example3_closed_export(int n) {
    const CompletionArtifact artifact = build_even_completion(example3_triple(n));
    PEModel model = export_completion_to_pemodel(artifact);
    model.has_number_annotations = true;
    model.input_cone_numbers = {{n, 1.0}};
    model.output_cone_numbers = {{n, 1.0}};
    return model;
}

PEModel photon_completion_export() {
    // Correlation table of the interferometric photon mediation, annotated
    // with its number distributions: one photon flows into the inputs, the
    // post-measurement count entering the output cone spreads over {0, 1, 2}.
    ConditionalTable table = photon_mediation_table();
    PEModel model = export_table_to_pemodel(table);
    const PhotonMediationResult sample = photon_mediation(0, 0);
    model.has_number_annotations = true;
    model.input_cone_numbers = {{1, 1.0}};
    model.output_cone_numbers = sample.post_number_dist[0][0];
    return model;
}

PEModel electron_completion_export() {
    ConditionalTable table = electron_mediation_table();
    PEModel model = export_table_to_pemodel(table);
    model.has_number_annotations = true;
    // One electron enters from the inputs; the ancilla doubles the count
    // entering the output cone.
    model.input_cone_numbers = {{1, 1.0}};
    model.output_cone_numbers = {{2, 1.0}};
    return model;
}

} // namespace interlab
