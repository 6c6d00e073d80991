#pragma once

#include <string>
#include <vector>

#include "dynasplit/config_space.hpp"
#include "dynasplit/cost_model.hpp"

namespace dynasplit {

/// The three minimization objectives: latency, energy, negated accuracy.
struct ObjectiveVector {
    double latency_ms = 0.0;
    double energy_j = 0.0;
    double neg_accuracy = 0.0;

    double accuracy() const { return -neg_accuracy; }

    friend bool operator==(const ObjectiveVector& a, const ObjectiveVector& b) {
        return a.latency_ms == b.latency_ms && a.energy_j == b.energy_j &&
               a.neg_accuracy == b.neg_accuracy;
    }
};

ObjectiveVector objectives_of(const Observation& obs);

/// Strict Pareto dominance: a <= b in every component, a < b in at least one.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

struct FrontEntry {
    Configuration config;
    ObjectiveVector objectives;
};

/// Non-dominated set, sorted by (energy ascending, accuracy descending,
/// latency ascending, configuration lexicographic).
using ParetoFront = std::vector<FrontEntry>;

struct ExtractResult {
    ParetoFront front;
    /// Entries whose objective vector exactly ties a kept front member
    /// (weak Pareto points); recorded but excluded from the scheduler's set.
    std::vector<FrontEntry> duplicates;
};

/// O(n^2) pairwise filter; n stays in the hundreds so the naive form is its
/// own oracle. Objective-space duplicates keep the lexicographically smallest
/// configuration.
ExtractResult extract_front_detailed(const std::vector<FrontEntry>& points);
ParetoFront extract_front(const std::vector<FrontEntry>& points);

/// Stable sort per the ParetoFront invariant; idempotent.
void sort_front(ParetoFront& front);

/// Offline-to-online handoff artifact.
inline constexpr const char* kFrontCsvTag = "dynasplit front v1";
void write_front_csv(const std::string& path, const ParetoFront& front,
                     const std::string& model_id);
ParetoFront read_front_csv(const std::string& path);

}  // namespace dynasplit
