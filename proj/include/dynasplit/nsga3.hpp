#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "dynasplit/config_space.hpp"
#include "dynasplit/pareto.hpp"

namespace dynasplit {

struct NsgaParams {
    int population = 32;
    int reference_divisions = 6;  // Das-Dennis p; C(p+2,2) = 28 points for 3 objectives
    double crossover_prob = 0.9;
    double mutation_prob = 0.25;  // per gene: resample from its domain
    std::uint64_t seed = 0;
    double budget_fraction = 0.20;  // distinct evaluations / |feasible space|
    int jobs = 1;

    void validate() const;
};

struct Trial {
    std::uint64_t index = 0;
    Configuration config;
    ObjectiveVector objectives;
};

struct SolveResult {
    std::vector<Trial> trials;  // every evaluated (config, objectives), in order
    ParetoFront front;          // non-dominated set over ALL trials
    /// Final-population members that no recorded trial dominates (rank 0
    /// under the global dominance relation, so always a subset of `front` up
    /// to duplicate objective vectors). Empty for grid search.
    std::vector<FrontEntry> final_rank0;
};

/// Evaluator contract: deterministic per (configuration, trial index) under
/// the run seed, so results are identical at any parallelism level.
using Evaluator =
    std::function<ObjectiveVector(const Configuration&, std::uint64_t trial_index)>;

/// NSGA-III over the discrete constrained space. Evaluates at most
/// ceil(budget_fraction * |feasible|) DISTINCT configurations; duplicate
/// genomes are served from a memo cache and never consume budget.
SolveResult run_nsga3(const SearchSpace& s, const Evaluator& evaluate,
                      const NsgaParams& params);

/// Comparison search: the first round(fraction * |feasible|) configurations
/// of a seed-shuffled enumeration. fraction 1.0 is the exhaustive oracle.
SolveResult grid_search(const SearchSpace& s, const Evaluator& evaluate,
                        double fraction, std::uint64_t seed, int jobs = 1);

// Internals exposed for the test suite.
namespace nsga3_detail {

/// Das-Dennis reference points on the 3-objective unit simplex.
std::vector<std::array<double, 3>> das_dennis_points(int divisions);

/// Indices grouped by non-domination rank (rank 0 first).
std::vector<std::vector<std::size_t>> fast_nondominated_sort(
    const std::vector<ObjectiveVector>& objs);

/// Minimal feasibility repair: k=0 forces the TPU off, k=L forces the GPU
/// off, model-specific predicates last.
Configuration repair(Configuration c, const SearchSpace& s);

}  // namespace nsga3_detail

}  // namespace dynasplit
