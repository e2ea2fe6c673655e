#include "interlab/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace interlab {

bool Report::all_pass() const {
    for (const auto& check : checks)
        if (!check.pass) return false;
    return true;
}

void Report::add_check(const std::string& name, bool pass, double residual,
                       const std::string& detail) {
    checks.push_back({name, pass, residual, detail});
}

void Report::add_value(const std::string& name, double value) {
    summary.emplace_back(name, format_probability(value));
}

std::string format_probability(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12f", value);
    return buf;
}

std::string table_to_csv(const ConditionalTable& table) {
    std::string out = "config";
    for (const auto& label : table.outcome_labels) out += "," + label;
    out += "\n";
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        out += config_label(
            config_from_index(k, table.input_count, table.input_arity));
        for (double p : table.rows[k]) out += "," + format_probability(p);
        out += "\n";
    }
    return out;
}

ordered_json report_to_json(const Report& report) {
    ordered_json j;
    j["scenario"] = report.scenario;
    j["seed"] = report.seed;
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : report.parameters) params[k] = v;
    j["parameters"] = params;
    ordered_json summary = ordered_json::object();
    for (const auto& [k, v] : report.summary) summary[k] = v;
    j["summary"] = summary;
    ordered_json tables = ordered_json::array();
    for (const auto& block : report.tables) {
        ordered_json t;
        t["name"] = block.name;
        t["csv"] = table_to_csv(block.table);
        tables.push_back(t);
    }
    j["tables"] = tables;
    ordered_json checks = ordered_json::array();
    for (const auto& check : report.checks) {
        ordered_json c;
        c["name"] = check.name;
        c["pass"] = check.pass;
        c["residual"] = check.residual;
        if (!check.detail.empty()) c["detail"] = check.detail;
        checks.push_back(c);
    }
    j["checks"] = checks;
    j["pass"] = report.all_pass();
    return j;
}

std::vector<std::string> write_report_files(const Report& report,
                                            const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> written;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ParseError("cannot create output directory " + dir);

    const auto write = [&](const std::string& path, const std::string& content) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ParseError("cannot write " + path);
        out << content;
        written.push_back(path);
    };

    write(dir + "/" + report.scenario + ".json", report_to_json(report).dump(2) + "\n");
    for (const auto& block : report.tables)
        write(dir + "/" + report.scenario + "." + block.name + ".csv",
              table_to_csv(block.table));
    for (const auto& [name, payload] : report.attachments)
        write(dir + "/" + name, payload.dump(2) + "\n");
    return written;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

ordered_json complex_to_json(const cdouble& c) {
    return ordered_json::array({c.real(), c.imag()});
}

cdouble complex_from_json(const ordered_json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

ordered_json space_to_json(const IndexSpace& space) {
    ordered_json factors = ordered_json::array();
    for (const auto& f : space.factors()) {
        ordered_json entry;
        entry["label"] = f.label;
        entry["dim"] = f.dim;
        factors.push_back(entry);
    }
    return factors;
}

IndexSpace space_from_json(const ordered_json& j) {
    std::vector<Factor> factors;
    for (const auto& entry : j)
        factors.push_back({entry.at("label").get<std::string>(),
                           entry.at("dim").get<std::size_t>()});
    return IndexSpace(std::move(factors));
}

const char* kind_name(OpKind kind) {
    switch (kind) {
        case OpKind::unitary: return "unitary";
        case OpKind::hermitian: return "hermitian";
        case OpKind::psd: return "psd";
        default: return "general";
    }
}

OpKind kind_from_name(const std::string& name) {
    if (name == "unitary") return OpKind::unitary;
    if (name == "hermitian") return OpKind::hermitian;
    if (name == "psd") return OpKind::psd;
    return OpKind::general;
}

ordered_json table_to_json(const ConditionalTable& table) {
    ordered_json j;
    j["input_count"] = table.input_count;
    j["input_arity"] = table.input_arity;
    j["outcomes"] = table.outcome_labels;
    j["csv"] = table_to_csv(table);
    return j;
}

} // namespace

ordered_json operator_to_json(const ComplexOperator& op) {
    ordered_json j;
    j["space"] = space_to_json(op.space());
    j["kind"] = kind_name(op.kind());
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < op.dim(); ++r) {
        ordered_json row = ordered_json::array();
        for (std::size_t c = 0; c < op.dim(); ++c)
            row.push_back(complex_to_json(op.at(r, c)));
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j;
}

ComplexOperator operator_from_json(const ordered_json& j) {
    const IndexSpace space = space_from_json(j.at("space"));
    std::vector<cdouble> entries;
    entries.reserve(space.total_dim() * space.total_dim());
    for (const auto& row : j.at("rows"))
        for (const auto& entry : row) entries.push_back(complex_from_json(entry));
    return ComplexOperator(space, std::move(entries),
                           kind_from_name(j.value("kind", "general")));
}

ordered_json state_to_json(const StateVector& v) {
    ordered_json j;
    j["space"] = space_to_json(v.space);
    ordered_json amps = ordered_json::array();
    for (const auto& a : v.amps) amps.push_back(complex_to_json(a));
    j["amps"] = amps;
    return j;
}

StateVector state_from_json(const ordered_json& j) {
    const IndexSpace space = space_from_json(j.at("space"));
    std::vector<cdouble> amps;
    for (const auto& entry : j.at("amps")) amps.push_back(complex_from_json(entry));
    return StateVector(space, std::move(amps));
}

ordered_json triple_to_json(const ExperimentTriple& triple) {
    ordered_json j;
    ordered_json devices;
    devices["device_count"] = triple.devices.device_count;
    devices["particle_count"] = triple.devices.particle_count;
    devices["internal_dim"] = triple.devices.internal_dim;
    devices["spatial_dim"] = triple.devices.spatial_dim;
    devices["config_arity"] = triple.devices.config_arity;
    ordered_json unitaries = ordered_json::array();
    for (const auto& configs : triple.devices.unitaries) {
        ordered_json per_device = ordered_json::array();
        for (const auto& u : configs) per_device.push_back(operator_to_json(u));
        unitaries.push_back(per_device);
    }
    devices["unitaries"] = unitaries;
    ordered_json overrides = ordered_json::array();
    for (const auto& [key, block] : triple.devices.collision_overrides) {
        ordered_json entry;
        entry["string"] = key.first;
        entry["config"] = key.second;
        entry["block"] = operator_to_json(block);
        overrides.push_back(entry);
    }
    devices["collision_overrides"] = overrides;
    j["devices"] = devices;

    ordered_json ensemble = ordered_json::array();
    for (const auto& [weight, state] : triple.ensemble) {
        ordered_json member;
        member["weight"] = weight;
        member["state"] = state_to_json(state);
        ensemble.push_back(member);
    }
    j["ensemble"] = ensemble;
    j["effect0"] = operator_to_json(triple.measurement.effect0);
    j["effect1"] = operator_to_json(triple.measurement.effect1);
    return j;
}

ExperimentTriple triple_from_json(const ordered_json& j) {
    ExperimentTriple triple;
    const auto& devices = j.at("devices");
    triple.devices.device_count = devices.at("device_count").get<int>();
    triple.devices.particle_count = devices.at("particle_count").get<int>();
    triple.devices.internal_dim = devices.at("internal_dim").get<int>();
    triple.devices.spatial_dim = devices.at("spatial_dim").get<int>();
    triple.devices.config_arity = devices.value("config_arity", 2);
    for (const auto& per_device : devices.at("unitaries")) {
        std::vector<ComplexOperator> configs;
        for (const auto& u : per_device) configs.push_back(operator_from_json(u));
        triple.devices.unitaries.push_back(std::move(configs));
    }
    if (devices.contains("collision_overrides"))
        for (const auto& entry : devices.at("collision_overrides"))
            triple.devices.collision_overrides[{entry.at("string").get<std::vector<int>>(),
                                                entry.at("config").get<std::vector<int>>()}] =
                operator_from_json(entry.at("block"));
    for (const auto& member : j.at("ensemble"))
        triple.ensemble.push_back(
            {member.at("weight").get<double>(), state_from_json(member.at("state"))});
    triple.measurement = BinaryPovm(operator_from_json(j.at("effect0")),
                                    operator_from_json(j.at("effect1")));
    triple.validate();
    return triple;
}

ordered_json artifact_to_json(const CompletionArtifact& artifact) {
    ordered_json j;
    j["type"] = "completion_artifact";
    j["mediator_count"] = artifact.mediator_count;
    j["degenerate"] = artifact.degenerate;
    j["source"] = triple_to_json(artifact.source);
    j["G"] = operator_to_json(artifact.G);
    ordered_json sectors = ordered_json::array();
    for (const auto& sector : artifact.sectors) {
        ordered_json s;
        s["component"] = sector.component;
        s["strings"] = sector.strings;
        s["weight"] = sector.weight;
        s["projector"] = operator_to_json(sector.projector);
        ordered_json stages = ordered_json::array();
        for (const auto& stage : sector.stages) stages.push_back(operator_to_json(stage));
        s["stages"] = stages;
        ordered_json mediators = ordered_json::array();
        for (const auto& med : sector.mediators) {
            ordered_json entry;
            entry["particle"] = med.particle;
            entry["mode_i"] = med.mode_i;
            entry["mode_j"] = med.mode_j;
            mediators.push_back(entry);
        }
        s["mediators"] = mediators;
        sectors.push_back(s);
    }
    j["sectors"] = sectors;

    ordered_json tables;
    tables["sector"] = table_to_json(artifact.sector_table);
    ordered_json mediator_tables = ordered_json::array();
    for (const auto& table : artifact.mediator_tables)
        mediator_tables.push_back(table_to_json(table));
    tables["mediators"] = mediator_tables;
    tables["pooled_mediators"] = table_to_json(artifact.pooled_mediator_table);
    tables["final"] = table_to_json(artifact.final_table);
    j["tables"] = tables;

    ordered_json transcript = ordered_json::array();
    for (const auto& entry : artifact.transcript.entries) {
        ordered_json e;
        e["name"] = entry.name;
        e["pass"] = entry.pass;
        e["residual"] = entry.residual;
        if (!entry.detail.empty()) e["detail"] = entry.detail;
        transcript.push_back(e);
    }
    j["transcript"] = transcript;
    return j;
}

CompletionArtifact artifact_from_json(const ordered_json& j) {
    if (j.value("type", "") != "completion_artifact")
        throw ParseError("not a completion artifact");
    CompletionArtifact artifact;
    artifact.mediator_count = j.at("mediator_count").get<int>();
    artifact.degenerate = j.value("degenerate", false);
    artifact.source = triple_from_json(j.at("source"));
    artifact.G = operator_from_json(j.at("G"));
    for (const auto& s : j.at("sectors")) {
        SectorPipeline sector;
        sector.component = s.at("component").get<int>();
        sector.strings = s.at("strings").get<std::vector<std::vector<int>>>();
        sector.weight = s.at("weight").get<double>();
        sector.projector = operator_from_json(s.at("projector"));
        for (const auto& stage : s.at("stages"))
            sector.stages.push_back(operator_from_json(stage));
        for (const auto& med : s.at("mediators"))
            sector.mediators.push_back({med.at("particle").get<int>(),
                                        med.at("mode_i").get<int>(),
                                        med.at("mode_j").get<int>()});
        artifact.sectors.push_back(std::move(sector));
    }
    return artifact;
}

ordered_json pemodel_to_json(const PEModel& model) {
    ordered_json j;
    ordered_json sites = ordered_json::array();
    for (const auto& site : model.sites) {
        ordered_json s;
        s["label"] = site.label;
        s["coords"] = site.coords;
        sites.push_back(s);
    }
    j["sites"] = sites;
    j["alphabets"] = model.alphabets;
    j["joint"] = model.joint;
    if (model.has_number_annotations) {
        ordered_json input_numbers = ordered_json::object();
        for (const auto& [k, v] : model.input_cone_numbers)
            input_numbers[std::to_string(k)] = v;
        ordered_json output_numbers = ordered_json::object();
        for (const auto& [k, v] : model.output_cone_numbers)
            output_numbers[std::to_string(k)] = v;
        j["input_cone_numbers"] = input_numbers;
        j["output_cone_numbers"] = output_numbers;
    }
    return j;
}

PEModel pemodel_from_json(const ordered_json& j) {
    PEModel model;
    for (const auto& s : j.at("sites")) {
        Site site;
        site.label = s.at("label").get<std::string>();
        const auto coords = s.at("coords").get<std::vector<double>>();
        if (coords.size() != 4) throw ParseError("site coords need 4 entries");
        std::copy(coords.begin(), coords.end(), site.coords.begin());
        model.sites.push_back(site);
    }
    model.alphabets = j.at("alphabets").get<std::vector<std::vector<std::string>>>();
    model.joint = j.at("joint").get<std::vector<double>>();
    if (j.contains("input_cone_numbers")) {
        model.has_number_annotations = true;
        for (const auto& [k, v] : j.at("input_cone_numbers").items())
            model.input_cone_numbers[std::stoi(k)] = v.get<double>();
        for (const auto& [k, v] : j.at("output_cone_numbers").items())
            model.output_cone_numbers[std::stoi(k)] = v.get<double>();
    }
    model.validate();
    return model;
}

} // namespace interlab
