#include <cstdio>
#include <filesystem>

#include "mfl/suites.hpp"

namespace mfl {

bool SuiteResult::pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

void SuiteResult::add(int criterion, std::string name, double value, double tolerance, bool pass, std::string note) {
    checks.push_back({criterion, std::move(name), value, tolerance, pass, std::move(note), false});
}

void SuiteResult::add_max(int criterion, std::string name, double value, double tolerance, std::string note) {
    add(criterion, std::move(name), value, tolerance, value <= tolerance, std::move(note));
}

std::string checks_csv(const SuiteResult& r) {
    std::string s = "criterion,check,value,tolerance,pass\n";
    char buf[256];
    for (const auto& c : r.checks) {
        if (c.timing) continue;
        std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%.17g,%d\n", c.criterion, c.name.c_str(), c.value, c.tolerance,
                      int(c.pass));
        s += buf;
    }
    return s;
}

std::string checks_text(const SuiteResult& r) {
    std::string s;
    char buf[512];
    for (const auto& c : r.checks) {
        std::snprintf(buf, sizeof buf, "[%s] C%d %s: %.6g (tol %.3g)%s%s\n", c.pass ? "PASS" : "FAIL", c.criterion,
                      c.name.c_str(), c.value, c.tolerance, c.note.empty() ? "" : "  ", c.note.c_str());
        s += buf;
    }
    return s;
}

void write_suite_files(const SuiteResult& r, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create " + dir + ": " + ec.message());
    for (const auto& [name, body] : r.files) write_text_file((std::filesystem::path(dir) / name).string(), body);
}

int csv_differences(const SuiteResult& a, const SuiteResult& b) {
    auto is_csv = [](const std::string& n) { return n.size() > 4 && n.compare(n.size() - 4, 4, ".csv") == 0; };
    int diff = 0;
    for (const auto& [name, body] : a.files) {
        if (!is_csv(name)) continue;
        auto it = b.files.find(name);
        if (it == b.files.end() || it->second != body) ++diff;
    }
    for (const auto& [name, body] : b.files)
        if (is_csv(name) && !a.files.count(name)) ++diff;
    return diff;
}

Check determinism_check(const SuiteResult& a, const SuiteResult& b) {
    int n = 0;
    for (const auto& [name, body] : a.files) n += name.size() > 4 && name.compare(name.size() - 4, 4, ".csv") == 0;
    int d = csv_differences(a, b);
    return {10, a.suite + "_rerun_csv_differences", double(d), 0.0, d == 0 && n > 0,
            std::to_string(n) + " csv reports compared", false};
}

}  // namespace mfl
