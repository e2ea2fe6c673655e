// interlab: scenario runner for the interference laboratory.
//
//   interlab list
//   interlab run --builtin <name> [--key value ...] [--seed N] [--out DIR]
//   interlab run <spec.json>
//   interlab verify <artifact.json>
//
// Exit codes: 0 all checks pass, 1 check failures, 2 parse/usage errors.
// INTERLAB_THREADS caps the worker count.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "interlab/report.hpp"
#include "interlab/scenario.hpp"

namespace {

using namespace interlab;

void apply_thread_cap() {
#ifdef _OPENMP
    if (const char* env = std::getenv("INTERLAB_THREADS")) {
        const int threads = std::atoi(env);
        if (threads > 0) omp_set_num_threads(threads);
    }
#endif
}

int usage() {
    std::fprintf(stderr,
                 "usage:\n"
                 "  interlab list\n"
                 "  interlab run --builtin <name> [--key value ...] [--seed N] [--out DIR]\n"
                 "  interlab run <spec.json>\n"
                 "  interlab verify <artifact.json>\n");
    return 2;
}

void print_report(const Report& report) {
    std::printf("scenario: %s (seed %llu)\n", report.scenario.c_str(),
                static_cast<unsigned long long>(report.seed));
    for (const auto& [key, value] : report.summary)
        std::printf("  %s = %s\n", key.c_str(), value.c_str());
    for (const auto& check : report.checks)
        std::printf("%s %s (residual %.3e)%s%s\n", check.pass ? "PASS" : "FAIL",
                    check.name.c_str(), check.residual,
                    check.detail.empty() ? "" : " - ", check.detail.c_str());
}

int cmd_list() {
    for (const auto& info : builtin_catalog())
        std::printf("%-18s %s\n", info.name.c_str(), info.description.c_str());
    return 0;
}

int cmd_run(const std::vector<std::string>& args) {
    if (args.empty()) return usage();

    ScenarioSpec spec;
    if (args[0] == "--builtin") {
        if (args.size() < 2) return usage();
        spec.name = args[1];
        spec.parameters["builtin"] = args[1];
        spec.kind = "property_suite";  // kind is informational for builtins
        for (std::size_t i = 2; i + 1 < args.size(); i += 2) {
            if (args[i].rfind("--", 0) != 0) return usage();
            const std::string key = args[i].substr(2);
            if (key == "seed")
                spec.seed = std::strtoull(args[i + 1].c_str(), nullptr, 10);
            else if (key == "out")
                spec.output_dir = args[i + 1];
            else
                spec.parameters[key] = args[i + 1];
        }
        if (args.size() >= 2 && (args.size() - 2) % 2 != 0) return usage();
    } else {
        std::ifstream in(args[0]);
        if (!in) {
            std::fprintf(stderr, "cannot open scenario file %s\n", args[0].c_str());
            return 2;
        }
        ordered_json j;
        try {
            in >> j;
            spec = parse_scenario(j);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "scenario parse error: %s\n", e.what());
            return 2;
        }
        for (std::size_t i = 1; i + 1 < args.size(); i += 2) {
            if (args[i] == "--out") spec.output_dir = args[i + 1];
            if (args[i] == "--seed")
                spec.seed = std::strtoull(args[i + 1].c_str(), nullptr, 10);
        }
    }

    try {
        const Report report = run_scenario(spec);
        print_report(report);
        return report.all_pass() ? 0 : 1;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

int cmd_verify(const std::vector<std::string>& args) {
    if (args.size() != 1) return usage();
    std::ifstream in(args[0]);
    if (!in) {
        std::fprintf(stderr, "cannot open artifact %s\n", args[0].c_str());
        return 2;
    }
    CompletionArtifact artifact;
    try {
        ordered_json j;
        in >> j;
        artifact = artifact_from_json(j);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "artifact parse error: %s\n", e.what());
        return 2;
    }
    const Transcript transcript = verify_mediation(artifact);
    for (const auto& entry : transcript.entries)
        std::printf("%s %s (residual %.3e)%s%s\n", entry.pass ? "PASS" : "FAIL",
                    entry.name.c_str(), entry.residual,
                    entry.detail.empty() ? "" : " - ", entry.detail.c_str());
    return transcript.all_pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    apply_thread_cap();
    if (argc < 2) return usage();
    const std::string command = argv[1];
    std::vector<std::string> args(argv + 2, argv + argc);
    if (command == "list") return cmd_list();
    if (command == "run") return cmd_run(args);
    if (command == "verify") return cmd_verify(args);
    return usage();
}
