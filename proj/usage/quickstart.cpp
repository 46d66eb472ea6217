// Clusters a small synthetic instance and prints the centroids.

#include <iostream>

#include "krc/krc.hpp"

int main() {
    // 2000 rankings of 6 options scattered around 3 hidden centroids.
    const auto data = krc::gen_swap_clustered({2000, 6, 3, 1, 42});

    krc::KrcaConfig cfg;
    cfg.k = 3;
    cfg.seed = 7;
    const auto report = krc::krca(data.dataset, cfg);

    std::cout << "baseline objective " << report.baseline.objective << ", final " << report.final.objective << " ("
              << report.relative_improvement_pct << "% better, " << report.iterations << " iterations, "
              << report.stop_reason << ")\n";
    for (const auto& c : report.final.centroids) std::cout << "  centroid " << c << '\n';
    std::cout << "hidden centroids:\n";
    for (const auto& c : data.centroids) std::cout << "  " << c << '\n';
}
