#pragma once

#include <deque>
#include <string>
#include <vector>

namespace sob {

struct Check {
    std::string name;
    bool pass = true;
    std::string detail;
    std::vector<std::string> witnesses;  // capped, see Report::fail
};

struct Report {
    std::string title;
    std::deque<Check> checks;  // deque keeps Check& stable across add()

    bool ok() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    Check& add(std::string name, bool pass = true, std::string detail = {}) {
        checks.push_back({std::move(name), pass, std::move(detail), {}});
        return checks.back();
    }
    const Check* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
    static void fail(Check& c, std::string witness, size_t cap = 16) {
        c.pass = false;
        if (c.witnesses.size() < cap) c.witnesses.push_back(std::move(witness));
    }
    void merge(const Report& o) {
        for (const auto& c : o.checks) {
            checks.push_back(c);
            if (!o.title.empty()) checks.back().name = o.title + "/" + c.name;
        }
    }
    std::string to_json() const;
    std::string to_text() const;
};

}  // namespace sob
