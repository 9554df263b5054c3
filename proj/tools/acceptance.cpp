// Runs every suite with its defaults, reruns each for the byte-for-byte comparison,
// and prints one PASS/FAIL line per criterion.
#include <cstdio>
#include <iostream>
#include <map>

#include "mfl/suites.hpp"

using namespace mfl;

int main(int argc, char** argv) {
    std::string out = argc > 1 ? argv[1] : "";
    try {
        std::vector<std::pair<std::string, std::function<SuiteResult()>>> suites{
            {"phasespace", [] { return phasespace_suite(7); }},
            {"algebra", [] { return algebra_suite(7); }},
            {"classical", [] { return classical_suite(default_classical_config()); }},
            {"egorov", [] { return egorov_suite(default_egorov_config()); }},
            {"converge", [] { return converge_suite(default_converge_config()); }},
        };
        std::map<int, std::vector<Check>> by;
        for (auto& [name, run] : suites) {
            SuiteResult a = run();
            SuiteResult b = run();
            a.checks.push_back(determinism_check(a, b));
            std::cout << checks_text(a) << std::flush;
            if (!out.empty()) write_suite_files(a, out + "/" + name);
            for (const auto& c : a.checks) by[c.criterion].push_back(c);
        }
        std::cout << "\n";
        bool all = true;
        for (int k = 1; k <= 10; ++k) {
            const auto& cs = by[k];
            int failed = 0;
            for (const auto& c : cs) failed += !c.pass;
            bool ok = !cs.empty() && failed == 0;
            all = all && ok;
            std::printf("criterion %2d: %s (%zu checks, %d failed)\n", k, ok ? "PASS" : "FAIL", cs.size(), failed);
        }
        return all ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "acceptance: " << e.what() << "\n";
        return 2;
    }
}
