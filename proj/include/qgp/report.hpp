#pragma once

#include <string>
#include <utility>
#include <vector>

namespace qgp {

/** Outcome of a verifier: pass flag, violations with witnesses, and named metrics. */
struct Report {
    std::string name;
    bool passed = true;
    std::vector<std::string> failures;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::string> notes;

    void fail(std::string what) {
        passed = false;
        failures.push_back(std::move(what));
    }
    void metric(std::string key, double v) { metrics.emplace_back(std::move(key), v); }
    double get(const std::string& key, double fallback = 0.0) const {
        for (const auto& [k, v] : metrics)
            if (k == key) return v;
        return fallback;
    }
    void merge(const Report& o) {
        passed = passed && o.passed;
        for (const auto& f : o.failures) failures.push_back(o.name + ": " + f);
        for (const auto& [k, v] : o.metrics) metrics.emplace_back(o.name + "." + k, v);
        for (const auto& n : o.notes) notes.push_back(o.name + ": " + n);
    }
};

}  // namespace qgp
