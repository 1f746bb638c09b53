#pragma once

#include "adaffect/curves.hpp"
#include "adaffect/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace adaffect {

/// One program scene or candidate ad with its affect scores in [0,1].
struct AffectItem {
    std::string id;
    double arousal = 0.5;
    double valence = 0.5;
    double length_s = 0.0;
};

/// Ad insertion instance: breakpoint candidates are the N-1 scene
/// boundaries; exactly K distinct ads go to K distinct breakpoints.
struct SchedulingProblem {
    std::vector<AffectItem> scenes; // ordered
    std::vector<AffectItem> ads;
    int insertions = 0; // K

    int breakpoint_count() const { return static_cast<int>(scenes.size()) - 1; }
    void validate() const;
};

struct RelevanceWeights {
    double valence = 0.6;
    double arousal = 0.4;
    bool contrast = false; // reward affect mismatch instead of match
};

/// Affect match of a scene/ad pair in [0,1]:
/// w_v (1 - |v_s - v_a|) + w_a (1 - |a_s - a_a|), flipped under contrast.
double relevance(const AffectItem& scene, const AffectItem& ad, const RelevanceWeights& w);

struct InsertionSchedule {
    struct Assignment {
        int breakpoint = 0; // boundary after scenes[breakpoint]
        std::string ad_id;
    };
    std::vector<Assignment> assignments; // strictly increasing breakpoints
    double objective_value = 0.0;
};

enum class SolveMethod { Exact, Greedy };

struct SolverOptions {
    RelevanceWeights weights;
    double spacing_min_s = 60.0; // min program time between chosen breakpoints
    SolveMethod method = SolveMethod::Exact;
};

/// Maximizes the summed relevance of (scene before breakpoint, assigned ad)
/// under the distinctness and spacing constraints. Exact enumerates
/// breakpoint subsets with an optimal assignment per subset; greedy takes
/// best pairs while completion stays feasible. Ties resolve to the earliest
/// breakpoint set, then lexicographically smallest ad ids.
InsertionSchedule solve_schedule(const SchedulingProblem& problem, const SolverOptions& opts);

/// Largest K for which a spacing-feasible breakpoint subset exists.
int max_feasible_insertions(const SchedulingProblem& problem, double spacing_min_s);

/// Independent feasibility check (count, distinctness, spacing, known ads).
/// Returns an explanation for the first violation, or nothing when valid.
std::optional<std::string> validate_schedule(const SchedulingProblem& problem,
                                             const InsertionSchedule& schedule,
                                             double spacing_min_s);

/// Per-ad affect sources for score_ads; exactly one source per ad.
struct ManualRating {
    double arousal = 0, valence = 0;
    ScaleRange arousal_scale{0, 4};
    ScaleRange valence_scale{-2, 2};
};

struct AdAffectSource {
    std::optional<std::pair<AffectCurve, AffectCurve>> curves; // arousal, valence
    std::optional<std::pair<VecX, VecX>> posteriors;           // per-frame arousal, valence
    std::optional<ManualRating> manual;
};

/// Arousal/valence in [0,1] per ad: curve means, mean posteriors, or
/// affine-rescaled manual ratings. Ads with no or multiple sources are
/// reported together in one error.
std::map<std::string, std::pair<double, double>>
score_ads(const std::map<std::string, AdAffectSource>& sources,
          CurveWindow window = CurveWindow::All);

/// Per-insertion relevance breakdown plus the composed program timeline.
struct ScheduleReport {
    struct Insertion {
        int breakpoint = 0;
        std::string ad_id;
        std::string scene_id;
        double relevance = 0.0;
    };
    struct TimelineEntry {
        std::string kind; // "scene" | "ad"
        std::string id;
        double start_s = 0.0;
        double length_s = 0.0;
    };
    std::vector<Insertion> insertions;
    std::vector<TimelineEntry> timeline;
    double objective_value = 0.0;
};

ScheduleReport schedule_report(const InsertionSchedule& schedule,
                               const SchedulingProblem& problem, const RelevanceWeights& w);

} // namespace adaffect
