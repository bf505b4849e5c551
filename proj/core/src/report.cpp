#include "sob/report.hpp"

#include <sstream>

#include "json.hpp"

namespace sob {

std::string Report::to_json() const {
    nlohmann::ordered_json j;
    j["title"] = title;
    j["ok"] = ok();
    auto& arr = j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        e["detail"] = c.detail;
        e["witnesses"] = c.witnesses;
        arr.push_back(std::move(e));
    }
    return j.dump(2);
}

std::string Report::to_text() const {
    std::ostringstream os;
    if (!title.empty()) os << "# " << title << '\n';
    for (const auto& c : checks) {
        os << (c.pass ? "PASS " : "FAIL ") << c.name;
        if (!c.detail.empty()) os << "  " << c.detail;
        os << '\n';
        for (const auto& w : c.witnesses) os << "    witness: " << w << '\n';
    }
    return os.str();
}

}  // namespace sob
