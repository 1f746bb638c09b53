#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adaffect/rng.hpp"
#include "adaffect/scheduler.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <set>

using namespace adaffect;

namespace {

SchedulingProblem random_problem(Rng& rng, int scenes, int ads, int K)
{
    SchedulingProblem p;
    for (int s = 0; s < scenes; ++s)
        p.scenes.push_back({"s" + std::to_string(s), rng.uniform(), rng.uniform(),
                            rng.uniform(40, 200)});
    for (int a = 0; a < ads; ++a)
        p.ads.push_back({"a" + std::to_string(a), rng.uniform(), rng.uniform(),
                         rng.uniform(10, 60)});
    p.insertions = K;
    return p;
}

MatX problem_relevance_matrix(const SchedulingProblem& p, const RelevanceWeights& w)
{
    MatX rel(p.breakpoint_count(), static_cast<Eigen::Index>(p.ads.size()));
    for (int b = 0; b < p.breakpoint_count(); ++b)
        for (size_t a = 0; a < p.ads.size(); ++a)
            rel(b, static_cast<Eigen::Index>(a)) =
                relevance(p.scenes[static_cast<size_t>(b)], p.ads[a], w);
    return rel;
}

std::vector<double> problem_positions(const SchedulingProblem& p)
{
    std::vector<double> pos;
    double acc = 0;
    for (size_t s = 0; s + 1 < p.scenes.size(); ++s) {
        acc += p.scenes[s].length_s;
        pos.push_back(acc);
    }
    return pos;
}

std::vector<std::string> ad_ids(const SchedulingProblem& p)
{
    std::vector<std::string> ids;
    for (const auto& a : p.ads) ids.push_back(a.id);
    return ids;
}

} // namespace

TEST_CASE("relevance formula")
{
    RelevanceWeights w;
    const AffectItem same{"x", 0.3, 0.8, 10};
    CHECK(relevance(same, {"y", 0.3, 0.8, 10}, w) == doctest::Approx(1.0));
    CHECK(relevance({"s", 0, 0, 10}, {"a", 1, 1, 10}, w) == doctest::Approx(0.0));

    // valence matches exactly, arousal off by 0.5 with weights (0.6, 0.4)
    const AffectItem scene{"s", 0.5, 0.5, 10};
    const AffectItem ad{"a", 0.0, 0.5, 10};
    CHECK(relevance(scene, ad, w) == doctest::Approx(0.8));

    RelevanceWeights contrast = w;
    contrast.contrast = true;
    CHECK(relevance(same, {"y", 0.3, 0.8, 10}, contrast) == doctest::Approx(0.0));

    RelevanceWeights bad;
    bad.valence = 0.9;
    bad.arousal = 0.3;
    CHECK_THROWS_AS(relevance(scene, ad, bad), ValidationError);
}

TEST_CASE("K=1 with one ad picks the best breakpoint, ties to the earliest")
{
    SchedulingProblem p;
    // identical scenes -> all breakpoints tie -> earliest wins
    for (int s = 0; s < 4; ++s) p.scenes.push_back({"s" + std::to_string(s), 0.5, 0.5, 100});
    p.ads.push_back({"ad", 0.5, 0.5, 20});
    p.insertions = 1;
    SolverOptions opts;
    opts.spacing_min_s = 50;
    const InsertionSchedule sched = solve_schedule(p, opts);
    REQUIRE(sched.assignments.size() == 1);
    CHECK(sched.assignments[0].breakpoint == 0);

    // a clearly better middle scene moves the choice
    p.scenes[2].arousal = 0.9;
    p.scenes[2].valence = 0.9;
    p.ads[0] = {"ad", 0.9, 0.9, 20};
    const InsertionSchedule sched2 = solve_schedule(p, opts);
    CHECK(sched2.assignments[0].breakpoint == 2);
}

TEST_CASE("full-size instance: 8 scenes, 28 ads, K=5")
{
    Rng rng(401);
    SchedulingProblem p = random_problem(rng, 8, 28, 5);
    for (auto& s : p.scenes) s.length_s = rng.uniform(80, 160); // ~118 s scenes
    SolverOptions opts;
    opts.spacing_min_s = 60;
    const InsertionSchedule sched = solve_schedule(p, opts);
    CHECK(sched.assignments.size() == 5);
    std::set<std::string> distinct;
    for (const auto& a : sched.assignments) distinct.insert(a.ad_id);
    CHECK(distinct.size() == 5);
    CHECK_FALSE(validate_schedule(p, sched, opts.spacing_min_s).has_value());
}

TEST_CASE("exact solver equals the exhaustive oracle on random small instances")
{
    Rng rng(402);
    for (int trial = 0; trial < 100; ++trial) {
        const int scenes = rng.uniform_int(3, 6); // up to 5 breakpoints
        const int ads = rng.uniform_int(1, 7);
        const int K = std::min({rng.uniform_int(1, 3), scenes - 1, ads});
        SchedulingProblem p = random_problem(rng, scenes, ads, K);
        SolverOptions opts;
        opts.spacing_min_s = rng.uniform(0, 120);
        if (max_feasible_insertions(p, opts.spacing_min_s) < K) continue;

        const InsertionSchedule got = solve_schedule(p, opts);
        const auto want = oracles::schedule_bruteforce(problem_relevance_matrix(p, opts.weights),
                                                       problem_positions(p), ad_ids(p),
                                                       opts.spacing_min_s, K);
        REQUIRE(want.found);
        CHECK(got.objective_value == doctest::Approx(want.value).epsilon(1e-9));
        REQUIRE(got.assignments.size() == static_cast<size_t>(K));
        for (int i = 0; i < K; ++i) {
            CHECK(got.assignments[static_cast<size_t>(i)].breakpoint ==
                  want.breakpoints[static_cast<size_t>(i)]);
            CHECK(got.assignments[static_cast<size_t>(i)].ad_id ==
                  p.ads[static_cast<size_t>(want.ad_index[static_cast<size_t>(i)])].id);
        }
    }
}

TEST_CASE("exact solver never scores below greedy")
{
    Rng rng(403);
    for (int trial = 0; trial < 60; ++trial) {
        const int scenes = rng.uniform_int(3, 8);
        const int ads = rng.uniform_int(2, 10);
        const int K = std::min({rng.uniform_int(1, 4), scenes - 1, ads});
        SchedulingProblem p = random_problem(rng, scenes, ads, K);
        SolverOptions exact;
        exact.spacing_min_s = 30;
        if (max_feasible_insertions(p, exact.spacing_min_s) < K) continue;
        SolverOptions greedy = exact;
        greedy.method = SolveMethod::Greedy;
        const InsertionSchedule e = solve_schedule(p, exact);
        const InsertionSchedule g = solve_schedule(p, greedy);
        CHECK(e.objective_value >= g.objective_value - 1e-9);
        CHECK_FALSE(validate_schedule(p, g, greedy.spacing_min_s).has_value());
    }
}

TEST_CASE("objective is invariant under order-preserving ad relabeling")
{
    Rng rng(404);
    SchedulingProblem p = random_problem(rng, 5, 6, 2);
    SolverOptions opts;
    opts.spacing_min_s = 40;
    const InsertionSchedule base = solve_schedule(p, opts);

    SchedulingProblem renamed = p;
    for (auto& ad : renamed.ads) ad.id = "zz_" + ad.id; // keeps relative order
    const InsertionSchedule re = solve_schedule(renamed, opts);
    CHECK(re.objective_value == doctest::Approx(base.objective_value).epsilon(1e-12));
    REQUIRE(re.assignments.size() == base.assignments.size());
    for (size_t i = 0; i < base.assignments.size(); ++i) {
        CHECK(re.assignments[i].breakpoint == base.assignments[i].breakpoint);
        CHECK(re.assignments[i].ad_id == "zz_" + base.assignments[i].ad_id);
    }

    // shuffled renaming keeps the objective (tie-broken choice may differ)
    SchedulingProblem shuffled = p;
    std::vector<std::string> names = ad_ids(p);
    rng.shuffle(names);
    for (size_t a = 0; a < shuffled.ads.size(); ++a) shuffled.ads[a].id = names[a];
    const InsertionSchedule sh = solve_schedule(shuffled, opts);
    CHECK(sh.objective_value == doctest::Approx(base.objective_value).epsilon(1e-12));
}

TEST_CASE("identical ads: deterministic lexicographically smallest schedule")
{
    Rng rng(405);
    SchedulingProblem p;
    for (int s = 0; s < 5; ++s)
        p.scenes.push_back({"s" + std::to_string(s), rng.uniform(), rng.uniform(), 100});
    for (int a = 0; a < 4; ++a) p.ads.push_back({"ad" + std::to_string(a), 0.4, 0.6, 15});
    p.insertions = 2;
    SolverOptions opts;
    opts.spacing_min_s = 0;
    const InsertionSchedule got = solve_schedule(p, opts);
    const auto want = oracles::schedule_bruteforce(problem_relevance_matrix(p, opts.weights),
                                                   problem_positions(p), ad_ids(p),
                                                   opts.spacing_min_s, 2);
    for (size_t i = 0; i < 2; ++i) {
        CHECK(got.assignments[i].breakpoint == want.breakpoints[i]);
        CHECK(got.assignments[i].ad_id == p.ads[static_cast<size_t>(want.ad_index[i])].id);
    }
    // rerunning gives the identical schedule
    const InsertionSchedule again = solve_schedule(p, opts);
    CHECK(again.assignments[0].ad_id == got.assignments[0].ad_id);
    CHECK(again.assignments[1].ad_id == got.assignments[1].ad_id);
}

TEST_CASE("pointwise dominance keeps an included ad included (oracle check)")
{
    Rng rng(406);
    for (int trial = 0; trial < 40; ++trial) {
        const int scenes = rng.uniform_int(3, 6);
        const int ads = rng.uniform_int(2, 6);
        const int K = std::min({rng.uniform_int(1, 3), scenes - 1, ads});
        SchedulingProblem p = random_problem(rng, scenes, ads, K);
        SolverOptions opts;
        opts.spacing_min_s = 20;
        if (max_feasible_insertions(p, opts.spacing_min_s) < K) continue;

        MatX rel = problem_relevance_matrix(p, opts.weights);
        const auto pos = problem_positions(p);
        const auto base =
            oracles::schedule_bruteforce(rel, pos, ad_ids(p), opts.spacing_min_s, K);
        REQUIRE(base.found);

        // raise every relevance of one included ad strictly
        const int chosen = base.ad_index.front();
        MatX raised = rel;
        for (Eigen::Index b = 0; b < raised.rows(); ++b) raised(b, chosen) += 0.05;
        const auto after =
            oracles::schedule_bruteforce(raised, pos, ad_ids(p), opts.spacing_min_s, K);
        const bool still_in = std::find(after.ad_index.begin(), after.ad_index.end(), chosen) !=
                              after.ad_index.end();
        CHECK(still_in);
    }
}

TEST_CASE("infeasible spacing reports the maximum feasible K")
{
    SchedulingProblem p;
    for (int s = 0; s < 4; ++s) p.scenes.push_back({"s" + std::to_string(s), 0.5, 0.5, 30});
    for (int a = 0; a < 3; ++a) p.ads.push_back({"a" + std::to_string(a), 0.5, 0.5, 10});
    p.insertions = 3;
    SolverOptions opts;
    opts.spacing_min_s = 100; // separations are 30 s
    CHECK(max_feasible_insertions(p, opts.spacing_min_s) == 1);
    CHECK_THROWS_WITH_AS(solve_schedule(p, opts), doctest::Contains("at most 1"),
                         ValidationError);
}

TEST_CASE("problem validation")
{
    SchedulingProblem p;
    p.scenes.push_back({"s0", 0.5, 0.5, 10});
    p.scenes.push_back({"s1", 0.5, 0.5, 10});
    p.ads.push_back({"a", 1.5, 0.5, 10}); // out of range
    p.insertions = 1;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.ads[0].arousal = 0.5;
    p.insertions = 2; // exceeds breakpoints and ads
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.insertions = 1;
    p.ads.push_back({"a", 0.5, 0.5, 10}); // duplicate id
    CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("validate_schedule catches corruption independently")
{
    Rng rng(407);
    SchedulingProblem p = random_problem(rng, 5, 5, 2);
    SolverOptions opts;
    opts.spacing_min_s = 10;
    InsertionSchedule s = solve_schedule(p, opts);
    CHECK_FALSE(validate_schedule(p, s, opts.spacing_min_s).has_value());

    InsertionSchedule repeated = s;
    repeated.assignments[1].ad_id = repeated.assignments[0].ad_id;
    CHECK(validate_schedule(p, repeated, opts.spacing_min_s).has_value());

    InsertionSchedule unknown = s;
    unknown.assignments[0].ad_id = "nope";
    CHECK(validate_schedule(p, unknown, opts.spacing_min_s).has_value());

    InsertionSchedule swapped = s;
    std::swap(swapped.assignments[0], swapped.assignments[1]);
    CHECK(validate_schedule(p, swapped, opts.spacing_min_s).has_value());

    InsertionSchedule short_one = s;
    short_one.assignments.pop_back();
    CHECK(validate_schedule(p, short_one, opts.spacing_min_s).has_value());
}

TEST_CASE("score_ads sources")
{
    SUBCASE("constant posterior 0.8 scores 0.8")
    {
        std::map<std::string, AdAffectSource> src;
        src["x"].posteriors = {VecX::Constant(12, 0.8), VecX::Constant(12, 0.8)};
        const auto scores = score_ads(src);
        CHECK(scores.at("x").first == doctest::Approx(0.8));
        CHECK(scores.at("x").second == doctest::Approx(0.8));
    }
    SUBCASE("manual valence 2 on [-2,2] rescales to 1")
    {
        std::map<std::string, AdAffectSource> src;
        ManualRating mr;
        mr.arousal = 1;
        mr.valence = 2;
        src["x"].manual = mr;
        const auto scores = score_ads(src);
        CHECK(scores.at("x").first == doctest::Approx(0.25));
        CHECK(scores.at("x").second == doctest::Approx(1.0));
    }
    SUBCASE("posterior mean matches a summation oracle")
    {
        Rng rng(408);
        VecX pa(10), pv(10);
        double sa = 0, sv = 0;
        for (int i = 0; i < 10; ++i) {
            pa[i] = rng.uniform();
            pv[i] = rng.uniform();
            sa += pa[i];
            sv += pv[i];
        }
        std::map<std::string, AdAffectSource> src;
        src["x"].posteriors = {pa, pv};
        const auto scores = score_ads(src);
        CHECK(scores.at("x").first == doctest::Approx(sa / 10).epsilon(1e-12));
        CHECK(scores.at("x").second == doctest::Approx(sv / 10).epsilon(1e-12));
    }
    SUBCASE("curve source uses curve_mean over the window")
    {
        AffectCurve a, v;
        a.values = VecX::Constant(40, 0.3);
        v.values.resize(40);
        for (int i = 0; i < 40; ++i) v.values[i] = i < 30 ? 0.0 : 1.0;
        std::map<std::string, AdAffectSource> src;
        src["x"].curves = {a, v};
        CHECK(score_ads(src, CurveWindow::Last10s).at("x").second == doctest::Approx(1.0));
        CHECK(score_ads(src, CurveWindow::All).at("x").second == doctest::Approx(0.25));
    }
    SUBCASE("missing and duplicated sources are reported together")
    {
        std::map<std::string, AdAffectSource> src;
        src["none"]; // no source at all
        ManualRating mr;
        src["both"].manual = mr;
        src["both"].posteriors = {VecX::Constant(2, 0.5), VecX::Constant(2, 0.5)};
        try {
            score_ads(src);
            FAIL("expected error");
        } catch (const ValidationError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("none") != std::string::npos);
            CHECK(msg.find("both") != std::string::npos);
        }
    }
}

TEST_CASE("schedule_report totals and timeline")
{
    Rng rng(409);
    SUBCASE("K=0: empty insertions, scene-only timeline, objective 0")
    {
        SchedulingProblem p = random_problem(rng, 3, 2, 0);
        SolverOptions opts;
        const InsertionSchedule s = solve_schedule(p, opts);
        const ScheduleReport rep = schedule_report(s, p, opts.weights);
        CHECK(rep.insertions.empty());
        CHECK(rep.objective_value == 0.0);
        CHECK(rep.timeline.size() == 3);
    }
    SUBCASE("single insertion: total equals the pair relevance")
    {
        SchedulingProblem p = random_problem(rng, 4, 3, 1);
        SolverOptions opts;
        opts.spacing_min_s = 0;
        const InsertionSchedule s = solve_schedule(p, opts);
        const ScheduleReport rep = schedule_report(s, p, opts.weights);
        REQUIRE(rep.insertions.size() == 1);
        CHECK(rep.objective_value == doctest::Approx(rep.insertions[0].relevance));
        CHECK(rep.objective_value == doctest::Approx(s.objective_value));
    }
    SUBCASE("five insertions: per-insertion relevances sum to the objective")
    {
        SchedulingProblem p = random_problem(rng, 8, 28, 5);
        SolverOptions opts;
        opts.spacing_min_s = 30;
        const InsertionSchedule s = solve_schedule(p, opts);
        const ScheduleReport rep = schedule_report(s, p, opts.weights);
        double sum = 0;
        for (const auto& i : rep.insertions) sum += i.relevance;
        CHECK(sum == doctest::Approx(rep.objective_value).epsilon(1e-12));
        CHECK(rep.objective_value == doctest::Approx(s.objective_value).epsilon(1e-12));
        // timeline alternates correctly: scene count + K entries
        CHECK(rep.timeline.size() == 8 + 5);
        double t = 0;
        for (const auto& e : rep.timeline) {
            CHECK(e.start_s == doctest::Approx(t).epsilon(1e-12));
            t += e.length_s;
        }
    }
}
