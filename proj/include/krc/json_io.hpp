#ifndef KRC_JSON_IO_HPP
#define KRC_JSON_IO_HPP

#include <cmath>
#include <string>

#include <json.hpp>

#include "krc/assignment.hpp"
#include "krc/krca.hpp"
#include "krc/ranking.hpp"

namespace krc {

/// Non-finite doubles become the strings "inf", "-inf" or "nan".
inline nlohmann::json json_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

inline nlohmann::json to_json(const Ranking& r) { return r.vector(); }

inline nlohmann::json to_json(const KrcSolution& s) {
    nlohmann::json c = nlohmann::json::array();
    for (const auto& y : s.centroids) c.push_back(to_json(y));
    return {{"centroids", c}, {"labels", s.labels}, {"objective", s.objective}};
}

inline nlohmann::json to_json(const BnbStats& s) {
    return {{"nodes_created", s.nodes_created},
            {"nodes_expanded", s.nodes_expanded},
            {"max_depth", s.max_depth},
            {"eliminations", s.eliminations},
            {"leaf_fallbacks", s.leaf_fallbacks}};
}

inline nlohmann::json to_json(const KrcaReport& r, bool with_labels = true) {
    auto base = to_json(r.baseline);
    auto fin = to_json(r.final);
    if (!with_labels) {
        base.erase("labels");
        fin.erase("labels");
    }
    return {{"baseline", base},
            {"final", fin},
            {"baseline_kmc_objective", json_number(r.baseline_kmc_objective)},
            {"iterations", r.iterations},
            {"per_iteration_objectives", r.per_iteration_objectives},
            {"relative_improvement_pct", json_number(r.relative_improvement_pct)},
            {"wall_time_s", r.wall_time},
            {"stop_reason", r.stop_reason}};
}

} // namespace krc

#endif
