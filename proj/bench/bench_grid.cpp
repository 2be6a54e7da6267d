// Benchmark: OpenMP grid search vs the single-threaded reference on a
// synthetic weight-optimization problem. Verifies both produce identical
// results (same surface, same argmax) and reports wall times.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "escan/weight_optimizer.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// A deterministic synthetic problem: `measures` measures, `docs` documents,
// every document retained in every field so the surface is dense.
std::vector<escan::MeasureParts> make_parts(std::size_t measures,
                                            std::size_t docs,
                                            escan::CitationGold& gold) {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> num(0.0, 5.0);
    std::uniform_real_distribution<double> den(0.5, 3.0);
    std::vector<escan::MeasureParts> parts;
    for (std::size_t m = 0; m < measures; ++m) {
        escan::MeasureParts mp;
        mp.measure_id = "M" + std::to_string(m);
        for (auto& field : mp.parts.fields) {
            field.denominator = den(rng);
            for (std::size_t d = 0; d < docs; ++d) {
                field.numerator["D" + std::to_string(1000 + d)] = num(rng);
            }
            field.fill_numerator = 0.0;
        }
        std::uniform_int_distribution<std::size_t> pick(0, docs - 1);
        for (int c = 0; c < 4; ++c) {
            gold.by_measure[mp.measure_id].insert(
                "D" + std::to_string(1000 + pick(rng)));
        }
        parts.push_back(std::move(mp));
    }
    return parts;
}

}  // namespace

int main() {
    escan::CitationGold gold;
    auto parts = make_parts(8, 100, gold);

#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not available; comparing two serial runs\n");
#endif

    auto t0 = Clock::now();
    escan::GridSearchResult serial = escan::grid_search_serial(parts, gold);
    double serial_s = seconds_since(t0);

    t0 = Clock::now();
    escan::GridSearchResult parallel = escan::grid_search(parts, gold);
    double parallel_s = seconds_since(t0);

    bool same = serial.best_mean_mrr == parallel.best_mean_mrr &&
                serial.best_weights.w == parallel.best_weights.w &&
                serial.surface.size() == parallel.surface.size();
    if (same) {
        for (std::size_t i = 0; i < serial.surface.size(); ++i) {
            if (serial.surface[i].mean_mrr != parallel.surface[i].mean_mrr ||
                serial.surface[i].weights.w != parallel.surface[i].weights.w) {
                same = false;
                break;
            }
        }
    }

    std::printf("grid points: %zu\n", serial.surface.size());
    std::printf("serial:   %.3f s\n", serial_s);
    std::printf("parallel: %.3f s  (speedup %.2fx)\n", parallel_s,
                parallel_s > 0 ? serial_s / parallel_s : 0.0);
    std::printf("best weights: %s  mean MRR: %.6f\n",
                serial.best_weights.str().c_str(), serial.best_mean_mrr);
    if (!same) {
        std::printf("MISMATCH between serial and parallel results\n");
        return 1;
    }
    std::printf("serial and parallel results identical\n");
    return 0;
}
