#include "iecc/adversaries.hpp"

#include "iecc/errors.hpp"

#include <istream>
#include <ostream>

namespace iecc {

void write_plan(std::ostream& os, const AttackPlan& plan) {
    nlohmann::ordered_json header;
    header["type"] = "header";
    header["description"] = plan.description;
    header["total_cost"] = plan.total_cost;
    header["params"] = plan.params;
    os << header.dump() << '\n';
    for (const auto& e : plan.masks) {
        nlohmann::ordered_json rec;
        rec["chunk"] = e.chunk;
        rec["speaker"] = to_string(e.speaker);
        rec["mask"] = e.mask.to_string();
        os << rec.dump() << '\n';
    }
}

AttackPlan read_plan(std::istream& is) {
    AttackPlan plan;
    std::string line;
    std::size_t line_no = 0;
    bool seen_header = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto j = nlohmann::json::parse(line);
            if (!seen_header) {
                if (j.value("type", "") != "header") throw ParseError("first record is not a header");
                plan.description = j.value("description", "");
                plan.total_cost = j.at("total_cost").get<std::size_t>();
                plan.params = j.value("params", nlohmann::json::object());
                seen_header = true;
                continue;
            }
            PlanEntry e;
            e.chunk = j.at("chunk").get<std::size_t>();
            const auto who = j.at("speaker").get<std::string>();
            if (who == "alice")
                e.speaker = Speaker::Alice;
            else if (who == "bob")
                e.speaker = Speaker::Bob;
            else
                throw ParseError("unknown speaker '" + who + "'");
            e.mask = BitWord::from_string(j.at("mask").get<std::string>());
            plan.masks.push_back(std::move(e));
        } catch (const nlohmann::json::exception& ex) {
            throw ParseError("plan line " + std::to_string(line_no) + ": " + ex.what());
        } catch (const ParseError& ex) {
            throw ParseError("plan line " + std::to_string(line_no) + ": " + ex.what());
        }
    }
    if (!seen_header) throw ParseError("plan has no header");
    if (plan.recompute_cost() != plan.total_cost)
        throw ParseError("plan total_cost " + std::to_string(plan.total_cost) + " disagrees with its masks");
    return plan;
}

} // namespace iecc
