#pragma once

#include <json.hpp>

#include "speclab/mode_field.hpp"

namespace speclab {

/// ModeField wire format:
///   {n, M, l, flags:{real_valued, solenoidal}, entries:[{i, alpha, re, im}]}
/// with 1-based component index i and zero entries omitted.
inline nlohmann::json field_to_json(const ModeField& v) {
    nlohmann::json j;
    j["n"] = v.dim();
    j["M"] = v.truncation();
    j["l"] = v.torus_length();
    j["flags"] = {{"real_valued", v.real_valued()}, {"solenoidal", v.solenoidal()}};
    nlohmann::json entries = nlohmann::json::array();
    const Lattice& lat = v.lattice();
    for (int i = 0; i < v.dim(); ++i) {
        const auto& c = v.component(i);
        for (std::int64_t k = 0; k < lat.size(); ++k) {
            const cplx z = c[k];
            if (z == cplx(0.0, 0.0)) continue;
            entries.push_back({{"i", i + 1},
                               {"alpha", lat.mode_index(k)},
                               {"re", z.real()},
                               {"im", z.imag()}});
        }
    }
    j["entries"] = std::move(entries);
    return j;
}

inline ModeField field_from_json(const nlohmann::json& j) {
    const int n = j.at("n").get<int>();
    const int M = j.at("M").get<int>();
    ModeField v(Lattice(n, M), j.value("l", 1.0));
    if (j.contains("flags")) {
        v.set_real_valued(j["flags"].value("real_valued", false));
        v.set_solenoidal(j["flags"].value("solenoidal", false));
    }
    for (const auto& e : j.at("entries")) {
        const int i = e.at("i").get<int>() - 1;
        if (i < 0 || i >= n) throw validation_error("entries.i", "component out of range");
        const ModeIndex alpha = e.at("alpha").get<ModeIndex>();
        if (!v.lattice().contains(alpha))
            throw validation_error("entries.alpha", "mode index outside lattice");
        v.at(i, alpha) = cplx(e.at("re").get<double>(), e.at("im").get<double>());
    }
    return v;
}

}  // namespace speclab
