#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "mfl/suites.hpp"

using namespace mfl;

namespace {

int finish(SuiteResult r, const std::string& out, bool repeat, const std::function<SuiteResult()>& rerun) {
    if (repeat) r.checks.push_back(determinism_check(r, rerun()));
    write_suite_files(r, out);
    std::cout << checks_text(r);
    std::cout << r.suite << ": " << (r.pass() ? "PASS" : "FAIL") << ", reports in " << out << "\n";
    return r.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mean-field convergence laboratory"};
    app.require_subcommand(1);

    std::string config, out = "runs";
    std::uint64_t seed = 7;
    bool repeat = false, checkpoints = false, dump_ops = false, timing = false;

    auto* conv = app.add_subcommand("converge", "N-body vs Hartree convergence scan");
    conv->add_option("--config", config, "config JSON (defaults when omitted)");
    conv->add_option("--out", out, "output directory");
    conv->add_flag("--checkpoints", checkpoints, "write final N-body states");
    conv->add_flag("--timing", timing, "fill the wall_ms column");

    auto* eg = app.add_subcommand("egorov", "semiclassical defect and commutator scans");
    eg->add_option("--config", config, "config JSON (defaults when omitted)");
    eg->add_option("--out", out, "output directory");
    eg->add_flag("--dump-operators", dump_ops, "write the compared operators for the first case");

    auto* alg = app.add_subcommand("algebra", "operator identities and evolution-equation residuals");
    alg->add_option("--seed", seed, "probe seed");
    alg->add_option("--out", out, "output directory");

    auto* cl = app.add_subcommand("classical", "Newton flow, weak Vlasov residuals, Monte Carlo marginals");
    cl->add_option("--config", config, "config JSON (defaults when omitted)");
    cl->add_option("--out", out, "output directory");

    auto* ps = app.add_subcommand("phasespace", "quantization and Wigner calculus checks");
    ps->add_option("--seed", seed, "probe seed");
    ps->add_option("--out", out, "output directory");

    std::string which;
    auto* defs = app.add_subcommand("defaults", "print a default config");
    defs->add_option("suite", which, "converge | egorov | classical")->required();

    for (auto* sc : {conv, eg, alg, cl, ps}) sc->add_flag("--repeat", repeat, "run twice and compare the CSV bytes");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*defs) {
            if (which == "converge") std::cout << default_converge_json();
            else if (which == "egorov") std::cout << default_egorov_json();
            else if (which == "classical") std::cout << default_classical_json();
            else throw Error("no defaults for '" + which + "'");
            return 0;
        }
        if (*conv) {
            ConvergeConfig c = config.empty() ? default_converge_config() : converge_config_from_json(read_json_file(config));
            if (timing) c.timing = true;
            std::string ck = checkpoints ? (std::filesystem::path(out) / "checkpoints").string() : std::string();
            return finish(converge_suite(c, ck), out, repeat, [&] { return converge_suite(c); });
        }
        if (*eg) {
            EgorovConfig c = config.empty() ? default_egorov_config() : egorov_config_from_json(read_json_file(config));
            std::string od = dump_ops ? (std::filesystem::path(out) / "operators").string() : std::string();
            return finish(egorov_suite(c, od), out, repeat, [&] { return egorov_suite(c); });
        }
        if (*alg) return finish(algebra_suite(seed), out, repeat, [&] { return algebra_suite(seed); });
        if (*cl) {
            ClassicalConfig c =
                config.empty() ? default_classical_config() : classical_config_from_json(read_json_file(config));
            return finish(classical_suite(c), out, repeat, [&] { return classical_suite(c); });
        }
        if (*ps) return finish(phasespace_suite(seed), out, repeat, [&] { return phasespace_suite(seed); });
    } catch (const std::exception& e) {
        std::cerr << "meanfield-lab: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
