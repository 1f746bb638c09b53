#include "adaffect/crossval.hpp"

#include "adaffect/metrics.hpp"
#include "adaffect/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

namespace adaffect {

namespace {

struct AdGroup {
    std::string id;
    std::vector<Eigen::Index> rows;
    int label = +1;
};

std::vector<AdGroup> group_by_ad(const FeatureTable& table)
{
    std::vector<AdGroup> groups;
    std::map<std::string, size_t> index;
    for (Eigen::Index i = 0; i < table.size(); ++i) {
        const auto& m = table.rows[static_cast<size_t>(i)];
        auto [it, fresh] = index.try_emplace(m.ad_id, groups.size());
        if (fresh) groups.push_back(AdGroup{m.ad_id, {}, m.label});
        AdGroup& g = groups[it->second];
        if (g.label != m.label)
            throw ValidationError("cross_validate: ad '" + m.ad_id + "' has inconsistent labels");
        g.rows.push_back(i);
    }
    return groups;
}

// fold id per ad; stratified within each class
std::vector<int> stratified_folds(const std::vector<AdGroup>& groups, int folds, Rng rng)
{
    std::vector<size_t> pos, neg;
    for (size_t i = 0; i < groups.size(); ++i)
        (groups[i].label > 0 ? pos : neg).push_back(i);
    std::vector<int> fold(groups.size(), 0);
    for (auto* cls : {&pos, &neg}) {
        rng.shuffle(*cls);
        for (size_t k = 0; k < cls->size(); ++k)
            fold[(*cls)[k]] = static_cast<int>(k % static_cast<size_t>(folds));
    }
    return fold;
}

bool folds_ok(const std::vector<AdGroup>& groups, const std::vector<int>& fold, int folds)
{
    // every training split must contain both classes
    for (int f = 0; f < folds; ++f) {
        bool pos = false, neg = false;
        for (size_t i = 0; i < groups.size(); ++i) {
            if (fold[i] == f) continue;
            (groups[i].label > 0 ? pos : neg) = true;
        }
        if (!pos || !neg) return false;
    }
    return true;
}

struct Split {
    MatX X;
    VecI y;
};

Split gather(const FeatureTable& table, const std::vector<AdGroup>& groups,
             const std::vector<size_t>& ads)
{
    Eigen::Index n = 0;
    for (size_t a : ads) n += static_cast<Eigen::Index>(groups[a].rows.size());
    Split s;
    s.X.resize(n, table.dimension());
    s.y.resize(n);
    Eigen::Index r = 0;
    for (size_t a : ads) {
        for (Eigen::Index row : groups[a].rows) {
            s.X.row(r) = table.features.row(row);
            s.y[r] = groups[a].label;
            ++r;
        }
    }
    return s;
}

ClassifierModel train_spec(const Split& tr, const ClfSpec& clf, double C, double gamma)
{
    if (clf.kind == ClassifierKind::Lda) return train_lda(tr.X, tr.y, clf.lda_shrinkage);
    SvmParams p;
    p.kernel = clf.kind;
    p.C = C;
    p.gamma = gamma;
    p.tol = clf.svm_tol;
    p.max_iter = clf.svm_max_iter;
    return train_svm(tr.X, tr.y, p);
}

// majority vote over the ad's frames; ties -> L
int vote(const ClassifierModel& model, const FeatureTable& table, const AdGroup& g)
{
    int balance = 0;
    for (Eigen::Index row : g.rows)
        balance += model.predict(table.features.row(row).transpose());
    return balance > 0 ? +1 : -1;
}

struct FoldScore {
    double accuracy = 0, f1 = 0;
};

FoldScore score_fold(const ClassifierModel& model, const FeatureTable& table,
                     const std::vector<AdGroup>& groups, const std::vector<size_t>& test_ads)
{
    std::vector<int> pred, truth;
    for (size_t a : test_ads) {
        pred.push_back(vote(model, table, groups[a]));
        truth.push_back(groups[a].label);
    }
    return FoldScore{accuracy(pred, truth), f1_score(pred, truth)};
}

} // namespace

FeatureTable window_table(const FeatureTable& table, CurveWindow window, double frame_period_s)
{
    if (window == CurveWindow::All) return table;
    if (frame_period_s <= 0)
        throw ValidationError("window_table: frame period must be positive");

    std::map<std::string, int> max_index;
    for (const auto& m : table.rows) {
        auto [it, fresh] = max_index.try_emplace(m.ad_id, m.frame_index);
        if (!fresh) it->second = std::max(it->second, m.frame_index);
    }
    const int span = window == CurveWindow::Last30s
                         ? static_cast<int>(std::ceil(30.0 / frame_period_s))
                         : 1;

    FeatureTable out;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < table.size(); ++i) {
        const auto& m = table.rows[static_cast<size_t>(i)];
        if (m.frame_index > max_index[m.ad_id] - span) keep.push_back(i);
    }
    out.features.resize(static_cast<Eigen::Index>(keep.size()), table.dimension());
    for (size_t k = 0; k < keep.size(); ++k) {
        out.features.row(static_cast<Eigen::Index>(k)) = table.features.row(keep[k]);
        out.rows.push_back(table.rows[static_cast<size_t>(keep[k])]);
    }
    out.task_count = table.task_count;
    return out;
}

CvReport cross_validate(const FeatureTable& table, const ClfSpec& clf, const CvConfig& cfg)
{
    const FeatureTable windowed = window_table(table, cfg.window, cfg.frame_period_s);
    const auto groups = group_by_ad(windowed);

    int n_pos = 0, n_neg = 0;
    for (const auto& g : groups) (g.label > 0 ? n_pos : n_neg)++;
    if (n_pos < cfg.folds || n_neg < cfg.folds)
        throw ValidationError("cross_validate: need at least " + std::to_string(cfg.folds) +
                              " ads per class (have " + std::to_string(n_pos) + "/" +
                              std::to_string(n_neg) + ")");

    const RngStream streams(cfg.seed);
    const bool grid_search = clf.kind != ClassifierKind::Lda;
    const std::vector<double> gammas =
        clf.kind == ClassifierKind::RbfSvm ? clf.gamma_grid : std::vector<double>{0.0};

    // fold assignments per repetition, drawn ahead of the parallel section
    std::vector<std::vector<int>> folds_of_rep(static_cast<size_t>(cfg.repetitions));
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
        bool ok = false;
        for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
            auto f = stratified_folds(groups, cfg.folds, streams.get("cv/fold", rep, attempt));
            if (folds_ok(groups, f, cfg.folds)) {
                folds_of_rep[static_cast<size_t>(rep)] = std::move(f);
                ok = true;
            }
        }
        if (!ok)
            throw ValidationError("cross_validate: could not draw folds with both classes");
    }

    const int n_cells = cfg.repetitions * cfg.folds;
    std::vector<CvRun> runs(static_cast<size_t>(n_cells));

    auto run_cell = [&](int cell) {
        const int rep = cell / cfg.folds;
        const int fold = cell % cfg.folds;
        const auto& fold_of = folds_of_rep[static_cast<size_t>(rep)];

        std::vector<size_t> train_ads, test_ads;
        for (size_t a = 0; a < groups.size(); ++a)
            (fold_of[a] == fold ? test_ads : train_ads).push_back(a);

        double best_c = 0, best_gamma = 0;
        if (grid_search) {
            // inner stratified folds on the training ads
            std::vector<int> inner(groups.size(), -1);
            {
                std::vector<size_t> pos, neg;
                for (size_t a : train_ads) (groups[a].label > 0 ? pos : neg).push_back(a);
                Rng rng = streams.get("cv/inner", rep, fold);
                rng.shuffle(pos);
                rng.shuffle(neg);
                for (auto* cls : {&pos, &neg})
                    for (size_t k = 0; k < cls->size(); ++k)
                        inner[(*cls)[k]] = static_cast<int>(k % static_cast<size_t>(cfg.inner_folds));
            }
            double best_score = -1;
            for (double c : clf.c_grid) {
                for (double g : gammas) {
                    double sum = 0;
                    int cnt = 0;
                    for (int inf = 0; inf < cfg.inner_folds; ++inf) {
                        std::vector<size_t> itr, ite;
                        for (size_t a : train_ads)
                            (inner[a] == inf ? ite : itr).push_back(a);
                        if (ite.empty()) continue;
                        bool pos = false, neg = false;
                        for (size_t a : itr) (groups[a].label > 0 ? pos : neg) = true;
                        if (!pos || !neg) continue;
                        const Split tr = gather(windowed, groups, itr);
                        const auto model = train_spec(tr, clf, c, g);
                        sum += score_fold(model, windowed, groups, ite).f1;
                        ++cnt;
                    }
                    const double score = cnt > 0 ? sum / cnt : 0.0;
                    if (score > best_score) { // ties keep the earlier grid point
                        best_score = score;
                        best_c = c;
                        best_gamma = g;
                    }
                }
            }
        }

        const Split tr = gather(windowed, groups, train_ads);
        const auto model = train_spec(tr, clf, best_c, best_gamma);
        const FoldScore s = score_fold(model, windowed, groups, test_ads);

        CvRun& out = runs[static_cast<size_t>(cell)];
        out.repetition = rep;
        out.fold = fold;
        out.accuracy = s.accuracy;
        out.f1 = s.f1;
        out.chosen_c = best_c;
        out.chosen_gamma = best_gamma;
    };

    const int jobs = std::max(1, cfg.jobs);
    if (jobs == 1) {
        for (int cell = 0; cell < n_cells; ++cell) run_cell(cell);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int w = 0; w < jobs; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const int cell = next.fetch_add(1);
                    if (cell >= n_cells) return;
                    run_cell(cell);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    CvReport rep;
    rep.runs = std::move(runs);
    rep.window = cfg.window;
    rep.seed = cfg.seed;
    rep.classifier = classifier_name(clf.kind);
    auto mean_std = [&](auto get) {
        double m = 0;
        for (const auto& r : rep.runs) m += get(r);
        m /= static_cast<double>(rep.runs.size());
        double v = 0;
        for (const auto& r : rep.runs) v += (get(r) - m) * (get(r) - m);
        const double sd = rep.runs.size() > 1
                              ? std::sqrt(v / static_cast<double>(rep.runs.size() - 1))
                              : 0.0;
        return std::pair<double, double>{m, sd};
    };
    std::tie(rep.accuracy_mean, rep.accuracy_std) =
        mean_std([](const CvRun& r) { return r.accuracy; });
    std::tie(rep.f1_mean, rep.f1_std) = mean_std([](const CvRun& r) { return r.f1; });
    return rep;
}

} // namespace adaffect
