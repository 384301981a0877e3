#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gerbejlo/checks.hpp"
#include "gerbejlo/report.hpp"
#include "gerbejlo/scenario.hpp"

namespace {

struct Arguments {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::optional<int> kmax;
    std::optional<int> nmax;
    std::optional<int> samples;
    std::optional<int> pipeline_samples;
    std::optional<std::string> sign_convention;
    std::optional<std::string> json;
    bool timings = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void print_human(const gerbejlo::RunResult& r, const std::string& scenario_name) {
    using gerbejlo::CheckStatus;
    std::cout << r.command << " on " << scenario_name << "\n";
    for (const auto& c : r.checks) {
        const char* tag = c.status == CheckStatus::pass ? "PASS" : c.status == CheckStatus::fail ? "FAIL" : "SKIP";
        std::cout << "  " << tag << "  " << c.id << " (" << c.cases << " cases)";
        if (!c.note.empty()) std::cout << "  " << c.note;
        std::cout << "\n";
        if (!c.witness.empty()) std::cout << "        witness: " << c.witness << "\n";
    }
    for (const auto& [k, v] : r.observations) std::cout << "  " << k << " = " << v << "\n";
    std::cout << r.count(CheckStatus::pass) << " passed, " << r.count(CheckStatus::fail) << " failed, " << r.count(CheckStatus::skip)
              << " skipped\n";
}

int run(const std::string& command, const Arguments& args) {
    using namespace gerbejlo;
    ScenarioFile file;
    RunOptions options;
    try {
        file = parse_scenario_file(read_file(args.scenario), args.scenario);
        options = RunOptions::from_plan(file.plan);
        if (args.seed) options.seed = *args.seed;
        if (args.kmax) options.kmax = *args.kmax;
        if (args.nmax) options.nmax = *args.nmax;
        if (args.samples) options.samples = *args.samples;
        if (args.pipeline_samples) options.pipeline_samples = *args.pipeline_samples;
        if (args.sign_convention) options.sign_convention = parse_sign_convention(*args.sign_convention);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    CheckRunner runner(file, options);
    const RunResult result = runner.run(command);
    const ReportContext ctx{file.name, scenario_digest(file), options, args.timings};
    if (args.json && *args.json == "-") {
        std::cout << render_report(result, ctx);
    } else {
        print_human(result, file.name);
        if (args.json) {
            std::ofstream out(*args.json);
            if (!out) {
                std::cerr << "error: cannot write " << *args.json << "\n";
                return 2;
            }
            out << render_report(result, ctx);
        }
    }
    return result.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gerbe, Dixmier-Douady and JLO identity checks on scenario files"};
    app.require_subcommand(1);
    Arguments args;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"validate", "check the scenario data: cocycles, curvature identities, compatibility"},
        {"dd-class", "compute the Dixmier-Douady form and its integrated class"},
        {"jlo-eval", "evaluate the JLO cochain and check its linearity"},
        {"chain-check", "check the chain-map identities of the JLO cochain and the full pipeline"},
        {"report", "run every check"},
    };
    std::string chosen;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--scenario", args.scenario, "scenario file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", args.seed, "sampling seed (default from the scenario plan)");
        sub->add_option("--kmax", args.kmax, "largest group degree sampled");
        sub->add_option("--nmax", args.nmax, "largest number of non-leading arguments");
        sub->add_option("--samples", args.samples, "samples per sampled check");
        sub->add_option("--pipeline-samples", args.pipeline_samples, "samples for the pipeline check");
        sub->add_option("--sign-convention", args.sign_convention, "theorem, proof or graded")
            ->check(CLI::IsMember({"theorem", "proof", "graded"}));
        sub->add_option("--json", args.json, "write the JSON report here ('-' for stdout)");
        sub->add_flag("--timings", args.timings, "include wall-clock seconds in the JSON report");
        sub->callback([&chosen, n = name] { chosen = n; });
    }
    CLI11_PARSE(app, argc, argv);
    return run(chosen, args);
}
