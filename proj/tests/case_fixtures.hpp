#pragma once

#include <string>
#include <vector>

#include "tmp3/curves.hpp"

namespace tmp3::fixtures {

struct NamedCase {
    std::string name;
    CurveCase curve;
};

// One valid parameter choice per case; P6 appears once per sign of d.
inline std::vector<NamedCase> all_named_cases() {
    std::vector<NamedCase> out;
    for (CaseId id : all_cases()) {
        switch (id) {
            case CaseId::P1: out.push_back({"P1", make_case(id, {{"a", 1.0}, {"b", 2.0}})}); break;
            case CaseId::P2: out.push_back({"P2", make_case(id, {{"c", 1.0}})}); break;
            case CaseId::P6:
                out.push_back({"P6_dneg", make_case(id, {{"a", 1.0}, {"d", -1.0}, {"e", 1.0}})});
                out.push_back({"P6_dzero", make_case(id, {{"a", 0.0}, {"d", 0.0}, {"e", 1.0}})});
                out.push_back({"P6_dpos", make_case(id, {{"a", 1.0}, {"d", 1.0}, {"e", 2.0}})});
                break;
            case CaseId::P7: out.push_back({"P7", make_case(id, {{"a", 1.0}, {"d", 1.0}, {"e", 1.0}})}); break;
            case CaseId::P8:
            case CaseId::P9:
                out.push_back({to_string(id), make_case(id, {{"c", 1.0}, {"d", 1.0}, {"e", 1.0}})});
                break;
            case CaseId::P10:
            case CaseId::P11:
                out.push_back({to_string(id), make_case(id, {{"a", 1.0}, {"c", 1.0}, {"d", 1.0}, {"e", 1.0}})});
                break;
            case CaseId::P12: out.push_back({"P12", make_case(id, {{"c", 0.0}, {"d", 1.0}, {"e", 1.0}})}); break;
            case CaseId::P15: out.push_back({"P15", make_case(id, {{"a", 3.0}})}); break;
            case CaseId::P26: out.push_back({"P26", make_case(id, {{"a", 1.0}, {"b", 2.0}})}); break;
            default: {
                std::map<std::string, double> prm;
                for (const auto& n : param_names(id)) prm[n] = 1.0;
                out.push_back({to_string(id), make_case(id, prm)});
            }
        }
    }
    return out;
}

inline std::vector<NamedCase> constructive_named_cases() {
    std::vector<NamedCase> out;
    for (auto& nc : all_named_cases())
        if (is_constructive(nc.curve.id)) out.push_back(nc);
    return out;
}

}  // namespace tmp3::fixtures
