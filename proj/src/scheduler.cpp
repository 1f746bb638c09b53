#include "adaffect/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace adaffect {

namespace {

constexpr double kTieEps = 1e-9;

// Hungarian algorithm (shortest augmenting paths with potentials) on an
// n x m cost matrix, n <= m, minimizing. Returns matched column per row.
std::pair<double, std::vector<int>> assignment_min(const MatX& cost)
{
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    constexpr double inf = std::numeric_limits<double>::infinity();

    std::vector<double> u(n + 1, 0), v(m + 1, 0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<bool> used(m + 1, false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> match(n, -1);
    double total = 0;
    for (int j = 1; j <= m; ++j) {
        if (p[j] > 0) {
            match[p[j] - 1] = j - 1;
            total += cost(p[j] - 1, j - 1);
        }
    }
    return {total, match};
}

// best (maximal) assignment value of slots x ads relevance matrix
double assignment_max_value(const MatX& rel)
{
    if (rel.rows() == 0) return 0.0;
    return -assignment_min(-rel).first;
}

std::vector<double> breakpoint_positions(const SchedulingProblem& p)
{
    std::vector<double> pos;
    double acc = 0;
    for (size_t s = 0; s + 1 < p.scenes.size(); ++s) {
        acc += p.scenes[s].length_s;
        pos.push_back(acc);
    }
    return pos;
}

// Largest spacing-feasible selection containing `required` (sorted breakpoint
// indices); -1 if the required set itself violates spacing. Earliest-fit.
int max_chain_with(const std::vector<double>& pos, double spacing,
                   const std::vector<int>& required)
{
    double last = -std::numeric_limits<double>::infinity();
    size_t ri = 0;
    int count = 0;
    for (int b = 0; b < static_cast<int>(pos.size()); ++b) {
        const bool is_required = ri < required.size() && required[ri] == b;
        if (is_required) {
            if (pos[b] - last < spacing - kTieEps) return -1;
            last = pos[b];
            ++count;
            ++ri;
        } else {
            const bool fits_prev = pos[b] - last >= spacing - kTieEps;
            const bool fits_next =
                ri >= required.size() || pos[required[ri]] - pos[b] >= spacing - kTieEps;
            if (fits_prev && fits_next) {
                last = pos[b];
                ++count;
            }
        }
    }
    return count;
}

} // namespace

void SchedulingProblem::validate() const
{
    if (scenes.empty()) throw ValidationError("scheduling problem: no scenes");
    if (insertions < 0) throw ValidationError("scheduling problem: negative K");
    if (insertions > breakpoint_count() || insertions > static_cast<int>(ads.size()))
        throw ValidationError("scheduling problem: K=" + std::to_string(insertions) +
                              " exceeds breakpoints (" + std::to_string(breakpoint_count()) +
                              ") or ads (" + std::to_string(ads.size()) + ")");
    auto check_item = [](const AffectItem& it, const char* what) {
        if (it.arousal < 0 || it.arousal > 1 || it.valence < 0 || it.valence > 1)
            throw ValidationError(std::string(what) + " '" + it.id +
                                  "': affect scores must lie in [0,1]");
        if (!(it.length_s > 0))
            throw ValidationError(std::string(what) + " '" + it.id +
                                  "': length must be positive");
    };
    std::set<std::string> ids;
    for (const auto& s : scenes) check_item(s, "scene");
    for (const auto& a : ads) {
        check_item(a, "ad");
        if (!ids.insert(a.id).second)
            throw ValidationError("duplicate ad id '" + a.id + "'");
    }
}

double relevance(const AffectItem& scene, const AffectItem& ad, const RelevanceWeights& w)
{
    if (w.valence < 0 || w.arousal < 0 || std::abs(w.valence + w.arousal - 1.0) > 1e-9)
        throw ValidationError("relevance: weights must be nonnegative and sum to 1");
    const double v_match = 1.0 - std::abs(scene.valence - ad.valence);
    const double a_match = 1.0 - std::abs(scene.arousal - ad.arousal);
    if (w.contrast) return w.valence * (1.0 - v_match) + w.arousal * (1.0 - a_match);
    return w.valence * v_match + w.arousal * a_match;
}

int max_feasible_insertions(const SchedulingProblem& problem, double spacing_min_s)
{
    const auto pos = breakpoint_positions(problem);
    const int chain = max_chain_with(pos, spacing_min_s, {});
    return std::min(chain, static_cast<int>(problem.ads.size()));
}

namespace {

MatX relevance_matrix(const SchedulingProblem& p, const std::vector<int>& breakpoints,
                      const std::vector<int>& ad_ix, const RelevanceWeights& w)
{
    MatX rel(static_cast<Eigen::Index>(breakpoints.size()),
             static_cast<Eigen::Index>(ad_ix.size()));
    for (size_t s = 0; s < breakpoints.size(); ++s)
        for (size_t a = 0; a < ad_ix.size(); ++a)
            rel(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) = relevance(
                p.scenes[static_cast<size_t>(breakpoints[s])], p.ads[static_cast<size_t>(ad_ix[a])], w);
    return rel;
}

// lexicographically smallest (by ad id, slot by slot) assignment achieving
// the optimal value for this breakpoint subset
std::vector<int> lexicographic_assignment(const SchedulingProblem& p,
                                          const std::vector<int>& breakpoints,
                                          const RelevanceWeights& w, double optimal)
{
    std::vector<int> ads_by_id(p.ads.size());
    std::iota(ads_by_id.begin(), ads_by_id.end(), 0);
    std::sort(ads_by_id.begin(), ads_by_id.end(),
              [&](int a, int b) { return p.ads[static_cast<size_t>(a)].id <
                                         p.ads[static_cast<size_t>(b)].id; });

    std::vector<int> chosen; // ad index per slot
    double fixed_value = 0;
    std::vector<bool> used(p.ads.size(), false);
    for (size_t slot = 0; slot < breakpoints.size(); ++slot) {
        bool placed = false;
        for (int cand : ads_by_id) {
            if (used[static_cast<size_t>(cand)]) continue;
            const double r = relevance(p.scenes[static_cast<size_t>(breakpoints[slot])],
                                       p.ads[static_cast<size_t>(cand)], w);
            // value of remaining slots with remaining ads
            std::vector<int> rest_slots(breakpoints.begin() + static_cast<long>(slot) + 1,
                                        breakpoints.end());
            std::vector<int> rest_ads;
            for (size_t a = 0; a < p.ads.size(); ++a)
                if (!used[a] && static_cast<int>(a) != cand) rest_ads.push_back(static_cast<int>(a));
            const double rest =
                rest_slots.empty()
                    ? 0.0
                    : assignment_max_value(relevance_matrix(p, rest_slots, rest_ads, w));
            if (fixed_value + r + rest >= optimal - kTieEps) {
                chosen.push_back(cand);
                used[static_cast<size_t>(cand)] = true;
                fixed_value += r;
                placed = true;
                break;
            }
        }
        if (!placed)
            throw ValidationError("solver invariant violated: no ad completes the optimum");
    }
    return chosen;
}

} // namespace

InsertionSchedule solve_schedule(const SchedulingProblem& problem, const SolverOptions& opts)
{
    problem.validate();
    const int K = problem.insertions;
    const auto pos = breakpoint_positions(problem);
    const int B = problem.breakpoint_count();

    const int feasible = max_feasible_insertions(problem, opts.spacing_min_s);
    if (feasible < K)
        throw ValidationError("infeasible spacing: at most " + std::to_string(feasible) +
                              " insertions fit with spacing " +
                              std::to_string(opts.spacing_min_s) + " s");

    InsertionSchedule best;
    if (K == 0) return best;

    if (opts.method == SolveMethod::Exact) {
        // lexicographic K-subsets of breakpoints
        double subset_count = 1;
        for (int i = 0; i < K; ++i) subset_count *= static_cast<double>(B - i) / (i + 1);
        if (subset_count > 5e6)
            throw ValidationError("exact solver: too many breakpoint subsets; use greedy");

        double best_value = -std::numeric_limits<double>::infinity();
        std::vector<int> best_subset;
        std::vector<int> comb(static_cast<size_t>(K));
        std::iota(comb.begin(), comb.end(), 0);
        std::vector<int> all_ads(problem.ads.size());
        std::iota(all_ads.begin(), all_ads.end(), 0);
        for (;;) {
            bool spaced = true;
            for (int i = 1; i < K && spaced; ++i)
                spaced = pos[static_cast<size_t>(comb[static_cast<size_t>(i)])] -
                             pos[static_cast<size_t>(comb[static_cast<size_t>(i - 1)])] >=
                         opts.spacing_min_s - kTieEps;
            if (spaced) {
                const double v = assignment_max_value(
                    relevance_matrix(problem, comb, all_ads, opts.weights));
                if (v > best_value + kTieEps) {
                    best_value = v;
                    best_subset = comb;
                }
            }
            // next combination
            int i = K - 1;
            while (i >= 0 && comb[static_cast<size_t>(i)] == B - K + i) --i;
            if (i < 0) break;
            ++comb[static_cast<size_t>(i)];
            for (int j = i + 1; j < K; ++j)
                comb[static_cast<size_t>(j)] = comb[static_cast<size_t>(j - 1)] + 1;
        }

        const auto ads = lexicographic_assignment(problem, best_subset, opts.weights, best_value);
        double total = 0;
        for (size_t s = 0; s < best_subset.size(); ++s) {
            const double r = relevance(problem.scenes[static_cast<size_t>(best_subset[s])],
                                       problem.ads[static_cast<size_t>(ads[s])], opts.weights);
            total += r;
            best.assignments.push_back({best_subset[s], problem.ads[static_cast<size_t>(ads[s])].id});
        }
        best.objective_value = total;
        return best;
    }

    // greedy: best feasible (breakpoint, ad) pair while completion remains possible
    std::vector<bool> bp_used(static_cast<size_t>(B), false);
    std::vector<bool> ad_used(problem.ads.size(), false);
    std::vector<int> chosen_bps;
    double total = 0;
    for (int step = 0; step < K; ++step) {
        double best_r = -std::numeric_limits<double>::infinity();
        int pick_b = -1, pick_a = -1;
        for (int b = 0; b < B; ++b) {
            if (bp_used[static_cast<size_t>(b)]) continue;
            std::vector<int> with = chosen_bps;
            with.push_back(b);
            std::sort(with.begin(), with.end());
            if (max_chain_with(pos, opts.spacing_min_s, with) < K) continue;
            for (size_t a = 0; a < problem.ads.size(); ++a) {
                if (ad_used[a]) continue;
                const double r = relevance(problem.scenes[static_cast<size_t>(b)],
                                           problem.ads[a], opts.weights);
                bool better = r > best_r + kTieEps;
                if (!better && r > best_r - kTieEps && pick_b >= 0) {
                    better = b < pick_b ||
                             (b == pick_b &&
                              problem.ads[a].id < problem.ads[static_cast<size_t>(pick_a)].id);
                }
                if (better || pick_b < 0) {
                    best_r = std::max(best_r, r);
                    pick_b = b;
                    pick_a = static_cast<int>(a);
                }
            }
        }
        if (pick_b < 0)
            throw ValidationError("greedy solver: no feasible pair left at step " +
                                  std::to_string(step));
        bp_used[static_cast<size_t>(pick_b)] = true;
        ad_used[static_cast<size_t>(pick_a)] = true;
        chosen_bps.push_back(pick_b);
        total += relevance(problem.scenes[static_cast<size_t>(pick_b)],
                           problem.ads[static_cast<size_t>(pick_a)], opts.weights);
        best.assignments.push_back({pick_b, problem.ads[static_cast<size_t>(pick_a)].id});
    }
    std::sort(best.assignments.begin(), best.assignments.end(),
              [](const auto& a, const auto& b) { return a.breakpoint < b.breakpoint; });
    best.objective_value = total;
    return best;
}

std::optional<std::string> validate_schedule(const SchedulingProblem& problem,
                                             const InsertionSchedule& schedule,
                                             double spacing_min_s)
{
    if (static_cast<int>(schedule.assignments.size()) != problem.insertions)
        return "assignment count " + std::to_string(schedule.assignments.size()) +
               " differs from K=" + std::to_string(problem.insertions);
    const auto pos = breakpoint_positions(problem);
    std::set<std::string> ads_seen;
    int prev_bp = -1;
    double prev_pos = -std::numeric_limits<double>::infinity();
    for (const auto& a : schedule.assignments) {
        if (a.breakpoint < 0 || a.breakpoint >= problem.breakpoint_count())
            return "breakpoint " + std::to_string(a.breakpoint) + " out of range";
        if (a.breakpoint <= prev_bp)
            return "breakpoints not strictly increasing at " + std::to_string(a.breakpoint);
        const bool known = std::any_of(problem.ads.begin(), problem.ads.end(),
                                       [&](const AffectItem& ad) { return ad.id == a.ad_id; });
        if (!known) return "unknown ad '" + a.ad_id + "'";
        if (!ads_seen.insert(a.ad_id).second) return "ad '" + a.ad_id + "' repeated";
        const double p = pos[static_cast<size_t>(a.breakpoint)];
        if (p - prev_pos < spacing_min_s - kTieEps)
            return "spacing violated before breakpoint " + std::to_string(a.breakpoint);
        prev_bp = a.breakpoint;
        prev_pos = p;
    }
    return std::nullopt;
}

std::map<std::string, std::pair<double, double>>
score_ads(const std::map<std::string, AdAffectSource>& sources, CurveWindow window)
{
    std::vector<std::string> gaps;
    std::map<std::string, std::pair<double, double>> out;
    for (const auto& [id, src] : sources) {
        const int provided = (src.curves ? 1 : 0) + (src.posteriors ? 1 : 0) + (src.manual ? 1 : 0);
        if (provided != 1) {
            gaps.push_back(id + (provided == 0 ? " (no source)" : " (multiple sources)"));
            continue;
        }
        double arousal = 0, valence = 0;
        if (src.curves) {
            arousal = curve_mean(src.curves->first, window).value;
            valence = curve_mean(src.curves->second, window).value;
        } else if (src.posteriors) {
            if (src.posteriors->first.size() == 0 || src.posteriors->second.size() == 0) {
                gaps.push_back(id + " (empty posteriors)");
                continue;
            }
            arousal = src.posteriors->first.mean();
            valence = src.posteriors->second.mean();
        } else {
            const auto& mr = *src.manual;
            arousal = (mr.arousal - mr.arousal_scale.lo) / (mr.arousal_scale.hi - mr.arousal_scale.lo);
            valence = (mr.valence - mr.valence_scale.lo) / (mr.valence_scale.hi - mr.valence_scale.lo);
        }
        out[id] = {arousal, valence};
    }
    if (!gaps.empty()) {
        std::ostringstream msg;
        msg << "score_ads: unusable sources for " << gaps.size() << " ad(s):";
        for (const auto& g : gaps) msg << ' ' << g << ';';
        throw ValidationError(msg.str());
    }
    return out;
}

ScheduleReport schedule_report(const InsertionSchedule& schedule,
                               const SchedulingProblem& problem, const RelevanceWeights& w)
{
    ScheduleReport rep;
    rep.objective_value = 0;

    std::map<std::string, const AffectItem*> ads_by_id;
    for (const auto& ad : problem.ads) ads_by_id.emplace(ad.id, &ad);

    std::map<int, const AffectItem*> insertion_at; // breakpoint -> ad
    for (const auto& a : schedule.assignments) {
        const auto it = ads_by_id.find(a.ad_id);
        if (it == ads_by_id.end())
            throw ValidationError("schedule_report: unknown ad '" + a.ad_id + "'");
        insertion_at[a.breakpoint] = it->second;

        ScheduleReport::Insertion ins;
        ins.breakpoint = a.breakpoint;
        ins.ad_id = a.ad_id;
        ins.scene_id = problem.scenes[static_cast<size_t>(a.breakpoint)].id;
        ins.relevance =
            relevance(problem.scenes[static_cast<size_t>(a.breakpoint)], *it->second, w);
        rep.insertions.push_back(ins);
        rep.objective_value += ins.relevance;
    }

    double t = 0;
    for (size_t s = 0; s < problem.scenes.size(); ++s) {
        rep.timeline.push_back({"scene", problem.scenes[s].id, t, problem.scenes[s].length_s});
        t += problem.scenes[s].length_s;
        const auto it = insertion_at.find(static_cast<int>(s));
        if (it != insertion_at.end()) {
            rep.timeline.push_back({"ad", it->second->id, t, it->second->length_s});
            t += it->second->length_s;
        }
    }
    return rep;
}

} // namespace adaffect
