#include "dynasplit/nsga3.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

#include "dynasplit/rng.hpp"

namespace dynasplit {

namespace nsga3_detail {

std::vector<std::array<double, 3>> das_dennis_points(int divisions) {
    if (divisions < 1) throw std::invalid_argument("das-dennis: divisions must be >= 1");
    std::vector<std::array<double, 3>> pts;
    const double p = divisions;
    for (int i = 0; i <= divisions; ++i)
        for (int j = 0; j <= divisions - i; ++j) {
            const int k = divisions - i - j;
            pts.push_back({i / p, j / p, k / p});
        }
    return pts;
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(
    const std::vector<ObjectiveVector>& objs) {
    const std::size_t n = objs.size();
    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<int> dom_count(n, 0);
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (dominates(objs[i], objs[j])) dominated_by[i].push_back(j);
            else if (dominates(objs[j], objs[i])) ++dom_count[i];
        }
        if (dom_count[i] == 0) current.push_back(i);
    }
    while (!current.empty()) {
        fronts.push_back(current);
        std::vector<std::size_t> next;
        for (std::size_t i : current)
            for (std::size_t j : dominated_by[i])
                if (--dom_count[j] == 0) next.push_back(j);
        std::sort(next.begin(), next.end());
        current = std::move(next);
    }
    return fronts;
}

Configuration repair(Configuration c, const SearchSpace& s) {
    auto has_mode = [&](TpuMode m) {
        return std::find(s.tpu_modes.begin(), s.tpu_modes.end(), m) !=
               s.tpu_modes.end();
    };
    if (c.split_layer == 0 && c.tpu_mode != TpuMode::Off) {
        if (has_mode(TpuMode::Off)) c.tpu_mode = TpuMode::Off;
        else c.split_layer = 1;
    }
    if (c.split_layer == s.layer_count && c.use_gpu) c.use_gpu = false;
    for (NamedConstraint nc : s.extra_constraints) {
        switch (nc) {
            case NamedConstraint::NoTpu:
                if (has_mode(TpuMode::Off)) c.tpu_mode = TpuMode::Off;
                break;
            case NamedConstraint::NoEdgeOnly:
                if (c.split_layer >= s.layer_count) {
                    c.split_layer = s.layer_count - 1;
                    if (c.split_layer == 0 && c.tpu_mode != TpuMode::Off &&
                        has_mode(TpuMode::Off))
                        c.tpu_mode = TpuMode::Off;
                }
                break;
        }
    }
    if (!is_feasible(c, s))
        throw std::runtime_error("nsga3: repair failed for " + c.describe());
    return c;
}

}  // namespace nsga3_detail

void NsgaParams::validate() const {
    if (population < 2) throw std::invalid_argument("nsga3: population must be >= 2");
    const auto n_ref = nsga3_detail::das_dennis_points(reference_divisions).size();
    if (static_cast<std::size_t>(population) < n_ref)
        throw std::invalid_argument(
            "nsga3: population smaller than reference point count (" +
            std::to_string(n_ref) + ")");
    if (budget_fraction <= 0.0 || budget_fraction > 1.0)
        throw std::invalid_argument("nsga3: budget fraction must be in (0, 1]");
    if (crossover_prob < 0.0 || crossover_prob > 1.0 || mutation_prob < 0.0 ||
        mutation_prob > 1.0)
        throw std::invalid_argument("nsga3: probabilities must be in [0, 1]");
    if (jobs < 1) throw std::invalid_argument("nsga3: jobs must be >= 1");
}

namespace {

using nsga3_detail::fast_nondominated_sort;

struct Individual {
    Configuration genome;
    ObjectiveVector objectives;
    int rank = 0;
};

using ConfigKey = std::tuple<double, int, bool, int>;

/// Shared trial bookkeeping: memo cache + ordered trial log. Duplicate
/// evaluations are served from the cache and never consume budget.
class TrialLog {
public:
    TrialLog(const Evaluator& evaluate, std::size_t budget, int jobs)
        : evaluate_(evaluate), budget_(budget), jobs_(jobs) {}

    std::size_t evaluated() const { return trials_.size(); }
    bool exhausted() const { return trials_.size() >= budget_; }
    const std::vector<Trial>& trials() const { return trials_; }

    bool known(const Configuration& c) const { return memo_.count(c.key()) > 0; }

    /// Evaluates the new distinct genomes of `genomes` (up to the remaining
    /// budget, in order), then returns every genome that has objectives,
    /// preserving input order. Evaluation may run on several threads; trial
    /// indices and the log are assigned in input order either way.
    std::vector<Individual> evaluate_batch(const std::vector<Configuration>& genomes) {
        std::vector<std::pair<Configuration, std::uint64_t>> fresh;
        std::set<ConfigKey> batch_seen;
        for (const auto& g : genomes) {
            if (memo_.count(g.key()) || batch_seen.count(g.key())) continue;
            if (trials_.size() + fresh.size() >= budget_) continue;
            batch_seen.insert(g.key());
            fresh.emplace_back(g, trials_.size() + fresh.size());
        }

        std::vector<ObjectiveVector> results(fresh.size());
        auto work = [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i)
                results[i] = evaluate_(fresh[i].first, fresh[i].second);
        };
        if (jobs_ <= 1 || fresh.size() < 2) {
            work(0, fresh.size());
        } else {
            const std::size_t nthreads =
                std::min<std::size_t>(static_cast<std::size_t>(jobs_), fresh.size());
            std::vector<std::thread> threads;
            const std::size_t chunk = (fresh.size() + nthreads - 1) / nthreads;
            for (std::size_t t = 0; t < nthreads; ++t) {
                const std::size_t b = t * chunk;
                const std::size_t e = std::min(fresh.size(), b + chunk);
                if (b < e) threads.emplace_back(work, b, e);
            }
            for (auto& th : threads) th.join();
        }
        for (std::size_t i = 0; i < fresh.size(); ++i) {
            trials_.push_back(Trial{fresh[i].second, fresh[i].first, results[i]});
            memo_.emplace(fresh[i].first.key(), results[i]);
        }

        std::vector<Individual> out;
        out.reserve(genomes.size());
        for (const auto& g : genomes) {
            auto it = memo_.find(g.key());
            if (it != memo_.end()) out.push_back(Individual{g, it->second, 0});
        }
        return out;
    }

private:
    const Evaluator& evaluate_;
    std::size_t budget_;
    int jobs_;
    std::vector<Trial> trials_;
    std::map<ConfigKey, ObjectiveVector> memo_;
};

std::array<double, 3> to_array(const ObjectiveVector& v) {
    return {v.latency_ms, v.energy_j, v.neg_accuracy};
}

/// Per-generation normalization: ideal point plus extreme-point intercepts,
/// falling back to max-per-objective spans when the hyperplane degenerates.
struct Normalizer {
    std::array<double, 3> ideal{};
    std::array<double, 3> intercept{};

    explicit Normalizer(const std::vector<std::array<double, 3>>& objs) {
        for (int j = 0; j < 3; ++j) {
            ideal[j] = std::numeric_limits<double>::infinity();
            for (const auto& f : objs) ideal[j] = std::min(ideal[j], f[j]);
        }
        std::array<std::array<double, 3>, 3> extreme{};
        for (int j = 0; j < 3; ++j) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& f : objs) {
                double asf = 0.0;
                for (int m = 0; m < 3; ++m) {
                    const double w = (m == j) ? 1.0 : 1e-6;
                    asf = std::max(asf, (f[m] - ideal[m]) / w);
                }
                if (asf < best) {
                    best = asf;
                    extreme[static_cast<std::size_t>(j)] = f;
                }
            }
        }
        if (!solve_intercepts(extreme)) fallback(objs);
    }

    std::array<double, 3> normalize(const std::array<double, 3>& f) const {
        std::array<double, 3> out{};
        for (int j = 0; j < 3; ++j) out[j] = (f[j] - ideal[j]) / intercept[j];
        return out;
    }

private:
    bool solve_intercepts(const std::array<std::array<double, 3>, 3>& extreme) {
        // Solve E a = 1 for the hyperplane through the translated extremes;
        // intercepts are 1/a_j. 3x3 Cramer's rule.
        double m[3][3];
        for (int r = 0; r < 3; ++r)
            for (int cidx = 0; cidx < 3; ++cidx)
                m[r][cidx] = extreme[static_cast<std::size_t>(r)][cidx] - ideal[cidx];
        const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        if (std::abs(det) < 1e-12) return false;
        auto det3 = [&](int col) {
            double t[3][3];
            for (int r = 0; r < 3; ++r)
                for (int cidx = 0; cidx < 3; ++cidx)
                    t[r][cidx] = (cidx == col) ? 1.0 : m[r][cidx];
            return t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1]) -
                   t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0]) +
                   t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0]);
        };
        for (int j = 0; j < 3; ++j) {
            const double a = det3(j) / det;
            if (a <= 1e-12) return false;
            intercept[j] = 1.0 / a;
        }
        return true;
    }

    void fallback(const std::vector<std::array<double, 3>>& objs) {
        for (int j = 0; j < 3; ++j) {
            double span = 0.0;
            for (const auto& f : objs) span = std::max(span, f[j] - ideal[j]);
            intercept[j] = span > 1e-12 ? span : 1.0;
        }
    }
};

double perpendicular_distance(const std::array<double, 3>& f,
                              const std::array<double, 3>& dir_unit) {
    double dot = 0.0;
    for (int j = 0; j < 3; ++j) dot += f[j] * dir_unit[j];
    double d2 = 0.0;
    for (int j = 0; j < 3; ++j) {
        const double r = f[j] - dot * dir_unit[j];
        d2 += r * r;
    }
    return std::sqrt(d2);
}

struct Association {
    std::size_t ref = 0;
    double distance = 0.0;
};

/// NSGA-III environmental selection: rank-fill plus reference-point niching
/// on the last admitted front.
std::vector<Individual> environmental_selection(
    std::vector<Individual> pool, std::size_t target,
    const std::vector<std::array<double, 3>>& ref_dirs, rng::Stream& rng) {
    std::vector<ObjectiveVector> objs;
    objs.reserve(pool.size());
    for (const auto& ind : pool) objs.push_back(ind.objectives);
    const auto fronts = fast_nondominated_sort(objs);
    for (std::size_t r = 0; r < fronts.size(); ++r)
        for (std::size_t i : fronts[r]) pool[i].rank = static_cast<int>(r);

    std::vector<Individual> next;
    std::size_t level = 0;
    while (level < fronts.size() &&
           next.size() + fronts[level].size() <= target) {
        for (std::size_t i : fronts[level]) next.push_back(pool[i]);
        ++level;
    }
    if (next.size() == target || level >= fronts.size()) return next;

    // Niching over S_t = accepted fronts plus the split front.
    std::vector<std::size_t> considered;
    for (std::size_t r = 0; r <= level; ++r)
        for (std::size_t i : fronts[r]) considered.push_back(i);
    std::vector<std::array<double, 3>> considered_objs;
    considered_objs.reserve(considered.size());
    for (std::size_t i : considered) considered_objs.push_back(to_array(objs[i]));
    const Normalizer norm(considered_objs);

    std::vector<std::array<double, 3>> unit_dirs(ref_dirs.size());
    for (std::size_t d = 0; d < ref_dirs.size(); ++d) {
        double len = 0.0;
        for (int j = 0; j < 3; ++j) len += ref_dirs[d][j] * ref_dirs[d][j];
        len = std::sqrt(std::max(len, 1e-300));
        for (int j = 0; j < 3; ++j) unit_dirs[d][j] = ref_dirs[d][j] / len;
    }
    auto associate = [&](std::size_t pool_idx) {
        const auto f = norm.normalize(to_array(objs[pool_idx]));
        Association a{0, std::numeric_limits<double>::infinity()};
        for (std::size_t d = 0; d < unit_dirs.size(); ++d) {
            const double dist = perpendicular_distance(f, unit_dirs[d]);
            if (dist < a.distance) a = Association{d, dist};
        }
        return a;
    };

    std::vector<std::size_t> niche_count(ref_dirs.size(), 0);
    for (std::size_t r = 0; r < level; ++r)
        for (std::size_t i : fronts[r]) ++niche_count[associate(i).ref];

    struct Candidate {
        std::size_t pool_idx;
        Association assoc;
        bool taken = false;
    };
    std::vector<Candidate> last;
    for (std::size_t i : fronts[level]) last.push_back(Candidate{i, associate(i), false});

    std::vector<bool> dir_active(ref_dirs.size(), true);
    while (next.size() < target) {
        // Reference direction with the lowest niche count among those that
        // still have unclaimed members in the split front.
        std::size_t best_count = std::numeric_limits<std::size_t>::max();
        for (std::size_t d = 0; d < ref_dirs.size(); ++d)
            if (dir_active[d]) best_count = std::min(best_count, niche_count[d]);
        std::vector<std::size_t> min_dirs;
        for (std::size_t d = 0; d < ref_dirs.size(); ++d)
            if (dir_active[d] && niche_count[d] == best_count) min_dirs.push_back(d);
        if (min_dirs.empty()) break;  // every direction exhausted
        const std::size_t dir = min_dirs[rng.uniform_index(min_dirs.size())];

        std::vector<std::size_t> members;
        for (std::size_t c = 0; c < last.size(); ++c)
            if (!last[c].taken && last[c].assoc.ref == dir) members.push_back(c);
        if (members.empty()) {
            dir_active[dir] = false;
            continue;
        }
        std::size_t chosen;
        if (niche_count[dir] == 0) {
            chosen = members[0];
            for (std::size_t c : members)
                if (last[c].assoc.distance < last[chosen].assoc.distance) chosen = c;
        } else {
            chosen = members[rng.uniform_index(members.size())];
        }
        last[chosen].taken = true;
        next.push_back(pool[last[chosen].pool_idx]);
        ++niche_count[dir];
    }
    return next;
}

struct GeneDomains {
    std::vector<double> freqs;
    std::vector<TpuMode> modes;
    std::vector<bool> gpus;
    int layer_count;
};

Configuration random_genome(const GeneDomains& d, const std::string& model_id,
                            rng::Stream& rng) {
    Configuration c;
    c.cpu_freq_ghz = d.freqs[rng.uniform_index(d.freqs.size())];
    c.tpu_mode = d.modes[rng.uniform_index(d.modes.size())];
    c.use_gpu = d.gpus[rng.uniform_index(d.gpus.size())];
    c.split_layer = static_cast<int>(
        rng.uniform_index(static_cast<std::size_t>(d.layer_count) + 1));
    c.model_id = model_id;
    return c;
}

void mutate(Configuration& c, const GeneDomains& d, double pm, rng::Stream& rng) {
    if (rng.bernoulli(pm)) c.cpu_freq_ghz = d.freqs[rng.uniform_index(d.freqs.size())];
    if (rng.bernoulli(pm)) c.tpu_mode = d.modes[rng.uniform_index(d.modes.size())];
    if (rng.bernoulli(pm)) c.use_gpu = d.gpus[rng.uniform_index(d.gpus.size())];
    if (rng.bernoulli(pm))
        c.split_layer = static_cast<int>(
            rng.uniform_index(static_cast<std::size_t>(d.layer_count) + 1));
}

const Individual& tournament(const std::vector<Individual>& pop, rng::Stream& rng) {
    const auto& a = pop[rng.uniform_index(pop.size())];
    const auto& b = pop[rng.uniform_index(pop.size())];
    if (a.rank != b.rank) return a.rank < b.rank ? a : b;
    return rng.bernoulli(0.5) ? a : b;
}

ParetoFront front_of_trials(const std::vector<Trial>& trials) {
    std::vector<FrontEntry> pts;
    pts.reserve(trials.size());
    for (const auto& t : trials) pts.push_back(FrontEntry{t.config, t.objectives});
    return extract_front(pts);
}

}  // namespace

SolveResult run_nsga3(const SearchSpace& s, const Evaluator& evaluate,
                      const NsgaParams& params) {
    params.validate();
    const auto feasible = enumerate(s);
    if (feasible.empty()) throw std::invalid_argument("nsga3: infeasible-only space");
    const auto budget = static_cast<std::size_t>(
        std::ceil(params.budget_fraction * static_cast<double>(feasible.size())));
    if (budget < static_cast<std::size_t>(params.population))
        throw std::invalid_argument("nsga3: budget (" + std::to_string(budget) +
                                    ") smaller than population size");

    const GeneDomains domains{s.cpu_grid, s.tpu_modes, s.gpu_options, s.layer_count};
    const auto ref_dirs = nsga3_detail::das_dennis_points(params.reference_divisions);
    rng::Stream rng(rng::substream(params.seed, "nsga3"));
    TrialLog log(evaluate, budget, params.jobs);

    std::vector<Configuration> init;
    for (int i = 0; i < params.population; ++i)
        init.push_back(nsga3_detail::repair(random_genome(domains, s.model_id, rng), s));
    auto pop = log.evaluate_batch(init);
    pop = environmental_selection(std::move(pop),
                                  static_cast<std::size_t>(params.population),
                                  ref_dirs, rng);

    while (!log.exhausted()) {
        std::vector<Configuration> offspring;
        offspring.reserve(static_cast<std::size_t>(params.population));
        while (offspring.size() < static_cast<std::size_t>(params.population)) {
            Configuration c1 = tournament(pop, rng).genome;
            Configuration c2 = tournament(pop, rng).genome;
            if (rng.bernoulli(params.crossover_prob)) {
                if (rng.bernoulli(0.5)) std::swap(c1.cpu_freq_ghz, c2.cpu_freq_ghz);
                if (rng.bernoulli(0.5)) std::swap(c1.tpu_mode, c2.tpu_mode);
                if (rng.bernoulli(0.5)) std::swap(c1.use_gpu, c2.use_gpu);
                if (rng.bernoulli(0.5)) std::swap(c1.split_layer, c2.split_layer);
            }
            mutate(c1, domains, params.mutation_prob, rng);
            mutate(c2, domains, params.mutation_prob, rng);
            offspring.push_back(nsga3_detail::repair(c1, s));
            if (offspring.size() < static_cast<std::size_t>(params.population))
                offspring.push_back(nsga3_detail::repair(c2, s));
        }

        const std::size_t before = log.evaluated();
        auto children = log.evaluate_batch(offspring);
        if (log.evaluated() == before && !log.exhausted()) {
            // The whole generation hit the memo cache; inject one unexplored
            // configuration so the distinct-evaluation budget is actually spent.
            std::vector<Configuration> unexplored;
            for (const auto& c : feasible)
                if (!log.known(c)) unexplored.push_back(c);
            if (!unexplored.empty()) {
                auto extra = log.evaluate_batch(
                    {unexplored[rng.uniform_index(unexplored.size())]});
                children.insert(children.end(), extra.begin(), extra.end());
            }
        }

        for (auto& ind : children) pop.push_back(std::move(ind));
        pop = environmental_selection(std::move(pop),
                                      static_cast<std::size_t>(params.population),
                                      ref_dirs, rng);
    }

    SolveResult result{log.trials(), front_of_trials(log.trials()), {}};
    // Rank 0 against everything ever evaluated, not just the survivors: with
    // small populations the niching step can truncate a non-dominated set, so
    // population-local ranks may disagree with the recorded archive.
    for (const auto& ind : pop) {
        bool dominated = false;
        for (const auto& t : result.trials)
            if (dominates(t.objectives, ind.objectives)) {
                dominated = true;
                break;
            }
        if (!dominated)
            result.final_rank0.push_back(FrontEntry{ind.genome, ind.objectives});
    }
    return result;
}

SolveResult grid_search(const SearchSpace& s, const Evaluator& evaluate,
                        double fraction, std::uint64_t seed, int jobs) {
    if (fraction <= 0.0 || fraction > 1.0)
        throw std::invalid_argument("grid: fraction must be in (0, 1]");
    auto configs = enumerate(s);
    if (configs.empty()) throw std::invalid_argument("grid: infeasible-only space");

    rng::Stream rng(rng::substream(seed, "grid"));
    for (std::size_t i = configs.size() - 1; i > 0; --i)
        std::swap(configs[i], configs[rng.uniform_index(i + 1)]);

    const auto count = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::llround(fraction * static_cast<double>(configs.size()))));
    configs.resize(std::min(count, configs.size()));

    TrialLog log(evaluate, configs.size(), jobs);
    log.evaluate_batch(configs);
    return SolveResult{log.trials(), front_of_trials(log.trials()), {}};
}

}  // namespace dynasplit
