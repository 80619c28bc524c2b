#include "adboin/errors.hpp"
#include "adboin/simulator.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace adboin {

using nlohmann::json;

std::vector<Scenario> scenario_bank() {
    // Five doses, phiT = 0.35, psiE = 0.25. true_obd is zero-based here.
    return {
        {"s01_obd1_plateau", {0.10, 0.20, 0.30, 0.45, 0.55}, {0.50, 0.52, 0.54, 0.55, 0.56}, 0, false},
        {"s02_obd2", {0.05, 0.10, 0.20, 0.35, 0.50}, {0.20, 0.45, 0.48, 0.50, 0.52}, 1, false},
        {"s03_obd3", {0.02, 0.05, 0.10, 0.30, 0.45}, {0.10, 0.25, 0.50, 0.52, 0.55}, 2, false},
        {"s04_obd4", {0.02, 0.04, 0.06, 0.10, 0.40}, {0.05, 0.15, 0.30, 0.55, 0.58}, 3, false},
        {"s05_obd5", {0.01, 0.02, 0.05, 0.08, 0.12}, {0.05, 0.10, 0.20, 0.35, 0.55}, 4, false},
        {"s06_obd2_toxic_above", {0.10, 0.25, 0.45, 0.55, 0.65}, {0.30, 0.55, 0.60, 0.62, 0.65}, 1, false},
        {"s07_obd1_toxic_above", {0.25, 0.40, 0.50, 0.60, 0.70}, {0.45, 0.55, 0.60, 0.62, 0.65}, 0, false},
        {"s08_obd3_plateau", {0.05, 0.08, 0.12, 0.25, 0.40}, {0.20, 0.40, 0.60, 0.60, 0.60}, 2, false},
        {"s09_obd4_increasing", {0.05, 0.10, 0.15, 0.25, 0.50}, {0.10, 0.20, 0.35, 0.60, 0.65}, 3, false},
        {"s10_obd3_umbrella", {0.05, 0.10, 0.15, 0.20, 0.25}, {0.20, 0.40, 0.60, 0.45, 0.35}, 2, false},
        {"s11_obd2_umbrella", {0.05, 0.10, 0.20, 0.30, 0.40}, {0.30, 0.55, 0.40, 0.30, 0.25}, 1, false},
        {"s12_obd5_slow", {0.02, 0.04, 0.06, 0.08, 0.15}, {0.10, 0.15, 0.25, 0.35, 0.50}, 4, false},
        {"s13_obd4_plateau", {0.05, 0.10, 0.15, 0.20, 0.35}, {0.25, 0.35, 0.45, 0.65, 0.65}, 3, false},
        {"s14_obd1_flat", {0.05, 0.15, 0.30, 0.45, 0.60}, {0.35, 0.38, 0.40, 0.42, 0.45}, 0, false},
        {"s15_all_toxic", {0.50, 0.60, 0.70, 0.80, 0.85}, {0.30, 0.40, 0.50, 0.55, 0.60}, std::nullopt, false},
        {"s16_all_futile", {0.05, 0.10, 0.15, 0.20, 0.25}, {0.05, 0.06, 0.08, 0.10, 0.12}, std::nullopt, false},
    };
}

std::vector<Scenario> parse_scenarios(const std::string& json_text) {
    std::vector<Scenario> bank;
    try {
        const auto doc = json::parse(json_text);
        for (const auto& s : doc.at("scenarios")) {
            Scenario sc;
            sc.name = s.at("name").get<std::string>();
            sc.pT = s.at("pT").get<std::vector<double>>();
            sc.pE = s.at("pE").get<std::vector<double>>();
            const auto it = s.find("true_obd");
            if (it == s.end() || (it->is_string() && it->get<std::string>() == "derived")) {
                sc.obd_derived = true;
            } else if (it->is_null()) {
                sc.true_obd.reset();
            } else {
                sc.true_obd = it->get<int>() - 1;
            }
            if (sc.pT.size() != sc.pE.size())
                fail(ErrorCode::Schema, "scenario '" + sc.name + "' has mismatched pT/pE");
            bank.push_back(std::move(sc));
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::Schema, std::string("malformed scenario file: ") + e.what());
    }
    return bank;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::InvalidArgument, "cannot open scenario file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenarios(buf.str());
}

std::string scenarios_json(const std::vector<Scenario>& bank) {
    json arr = json::array();
    for (const auto& s : bank) {
        json obd = s.obd_derived ? json("derived")
                                 : (s.true_obd ? json(*s.true_obd + 1) : json(nullptr));
        arr.push_back({{"name", s.name}, {"pT", s.pT}, {"pE", s.pE}, {"true_obd", obd}});
    }
    return json{{"scenarios", arr}}.dump(2) + "\n";
}

} // namespace adboin
