// adaffect: command-line driver wiring the library into reproducible batch
// pipelines. Every subcommand validates its inputs, writes artifacts
// atomically and drops a manifest with the effective config next to them.

#include "adaffect/agreement.hpp"
#include "adaffect/audio.hpp"
#include "adaffect/crossval.hpp"
#include "adaffect/csv.hpp"
#include "adaffect/curves.hpp"
#include "adaffect/dataset.hpp"
#include "adaffect/frames.hpp"
#include "adaffect/fusion.hpp"
#include "adaffect/json_io.hpp"
#include "adaffect/lexicon.hpp"
#include "adaffect/mtl.hpp"
#include "adaffect/pipeline.hpp"
#include "adaffect/scheduler.hpp"
#include "adaffect/spectrogram.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace adaffect;

namespace {

std::string parent_dir(const std::string& out)
{
    const fs::path p(out);
    return p.has_parent_path() ? p.parent_path().string() : std::string(".");
}

void write_manifest(const std::string& subcommand, const json& config,
                    const std::vector<std::string>& input_paths, const std::string& out_dir)
{
    RunManifest m;
    m.subcommand = subcommand;
    m.config = config;
    for (const auto& p : input_paths) m.inputs[p] = file_digest(p);
    fs::create_directories(out_dir);
    atomic_write_file((fs::path(out_dir) / (subcommand + ".manifest.json")).string(),
                      m.to_json().dump(2) + "\n");
}

// ad_id,p posterior files used by `fuse`
std::vector<std::pair<std::string, double>> load_posteriors(const std::string& path)
{
    const csv::File f = csv::read_file(path);
    if (f.header.size() < 2 || f.header[0] != "ad_id" || f.header[1] != "p")
        throw ParseError("'" + path + "': expected header ad_id,p");
    std::vector<std::pair<std::string, double>> out;
    for (const auto& row : f.rows) {
        if (row.fields.size() < 2)
            throw ParseError("'" + path + "': short row at line " + std::to_string(row.line_no));
        out.emplace_back(row.fields[0],
                         csv::parse_double(row.fields[1], "'" + path + "'", row.line_no));
    }
    return out;
}

std::map<std::string, int> load_truth(const std::string& path)
{
    const csv::File f = csv::read_file(path);
    if (f.header.size() < 2 || f.header[0] != "ad_id" || f.header[1] != "label")
        throw ParseError("'" + path + "': expected header ad_id,label");
    std::map<std::string, int> out;
    for (const auto& row : f.rows)
        out[row.fields[0]] = label_sign(parse_label(row.fields[1]));
    return out;
}

std::vector<AffectItem> load_affect_items(const std::string& path, const char* id_col)
{
    const csv::File f = csv::read_file(path);
    if (f.header.size() < 4 || f.header[0] != id_col || f.header[1] != "arousal" ||
        f.header[2] != "valence" || f.header[3] != "length_s")
        throw ParseError("'" + path + "': expected header " + std::string(id_col) +
                         ",arousal,valence,length_s");
    std::vector<AffectItem> items;
    for (const auto& row : f.rows) {
        if (row.fields.size() < 4)
            throw ParseError("'" + path + "': short row at line " + std::to_string(row.line_no));
        AffectItem it;
        it.id = row.fields[0];
        it.arousal = csv::parse_double(row.fields[1], "'" + path + "'", row.line_no);
        it.valence = csv::parse_double(row.fields[2], "'" + path + "'", row.line_no);
        it.length_s = csv::parse_double(row.fields[3], "'" + path + "'", row.line_no);
        items.push_back(std::move(it));
    }
    return items;
}

std::string matrix_csv(const MatX& m)
{
    std::ostringstream out;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << csv::format_double(m(r, c));
        }
        out << '\n';
    }
    return out.str();
}

json curve_means_json(const AffectCurve& curve)
{
    json j;
    for (CurveWindow w : {CurveWindow::All, CurveWindow::Last30s, CurveWindow::Last10s}) {
        const CurveMean cm = curve_mean(curve, w);
        j[curve_window_name(w)] = {{"value", cm.value}, {"clamped", cm.clamped}};
    }
    return j;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"content-centric ad affect analytics toolkit"};
    app.require_subcommand(1);
    app.set_config("--config")->description("TOML config file; flags override file values");

    // ---- agree ----------------------------------------------------------
    struct {
        std::string ratings, ads, dim = "V", metric = "ordinal", out = "agreement.json";
    } agree;
    {
        auto* cmd = app.add_subcommand("agree", "inter-rater agreement report");
        cmd->configurable();
        cmd->fallthrough();
        cmd->add_option("--ratings", agree.ratings, "ratings CSV")->required();
        cmd->add_option("--ads", agree.ads, "ads CSV with expert labels (enables kappa)");
        cmd->add_option("--dim", agree.dim, "dimension A|V|E");
        cmd->add_option("--metric", agree.metric, "alpha metric ordinal|interval|nominal");
        cmd->add_option("--out", agree.out, "output JSON path");
    }

    // ---- corr -----------------------------------------------------------
    struct {
        std::string ratings, out = "correlation.json";
        double q = 0.05;
    } corr;
    {
        auto* cmd = app.add_subcommand("corr", "dimension correlations with BH-FDR");
        cmd->configurable();
        cmd->fallthrough();
        cmd->add_option("--ratings", corr.ratings, "ratings CSV")->required();
        cmd->add_option("--q", corr.q, "FDR level");
        cmd->add_option("--out", corr.out, "output JSON path");
    }

    // ---- spectrogram ----------------------------------------------------
    struct {
        std::string wav, out = "spectrograms";
        double segment = 10.0, min_partial = 2.0;
    } spect;
    {
        auto* cmd = app.add_subcommand("spectrogram", "per-segment STFT magnitude matrices");
        cmd->configurable();
        cmd->fallthrough();
        cmd->add_option("--wav", spect.wav, "input PCM WAV")->required();
        cmd->add_option("--out", spect.out, "output directory");
        cmd->add_option("--segment", spect.segment, "segment length in seconds");
        cmd->add_option("--min-partial", spect.min_partial,
                        "drop a final partial segment shorter than this");
    }

    // ---- hanjalic -------------------------------------------------------
    struct {
        std::string wav, frames, out = "curves.json";
        double shot_k = 3.0, kaiser_beta = 5.0, voicing = 0.5;
        int smooth_len = 11;
        bool no_smooth = false, triangular = false, no_normalize = false;
        std::vector<double> aw = {1.0 / 3, 1.0 / 3, 1.0 / 3};
        std::vector<double> vw = {0.5, 0.5};
    } han;
    {
        auto* cmd = app.add_subcommand("hanjalic", "time-continuous arousal/valence curves");
        cmd->configurable();
        cmd->fallthrough();
        cmd->add_option("--wav", han.wav, "input PCM WAV")->required();
        cmd->add_option("--frames", han.frames, "directory of <seconds>.ppm keyframes")
            ->required();
        cmd->add_option("--out", han.out, "output JSON path");
        cmd->add_option("--shot-k", han.shot_k, "shot threshold k (mean + k*std)");
        cmd->add_option("--smooth-len", han.smooth_len, "smoother length in seconds");
        cmd->add_option("--kaiser-beta", han.kaiser_beta, "Kaiser window beta");
        cmd->add_option("--voicing", han.voicing, "pitch voicing threshold");
        cmd->add_flag("--no-smooth", han.no_smooth, "disable curve smoothing");
        cmd->add_flag("--triangular", han.triangular, "triangular smoother instead of Kaiser");
        cmd->add_flag("--no-normalize", han.no_normalize, "skip final min-max normalization");
        cmd->add_option("--arousal-weights", han.aw,
                        "motion,shot_rate,energy component weights (sum to 1)")
            ->delimiter(',')
            ->expected(3);
        cmd->add_option("--valence-weights", han.vw,
                        "pitch,color component weights (sum to 1)")
            ->delimiter(',')
            ->expected(2);
    }

    // ---- lexicon-score --------------------------------------------------
    struct {
        std::string lexicon, captions, out = "lexicon_scores.json";
        bool stem = false, drop_stopwords = false;
    } lex;
    {
        auto* cmd = app.add_subcommand("lexicon-score", "lexicon V/A scoring of captions");
        cmd->configurable();
        cmd->fallthrough();
        cmd->add_option("--lexicon", lex.lexicon, "word,valence_mean,arousal_mean CSV")
            ->required();
        cmd->add_option("--captions", lex.captions, "ad_id,text CSV")->required();
        cmd->add_option("--out", lex.out, "output JSON path");
        cmd->add_flag("--stem", lex.stem, "enable crude suffix stripping");
        cmd->add_flag("--drop-stopwords", lex.drop_stopwords, "drop a small stopword list");
    }

    // ---- cv --------------------------------------------------------------
    struct {
        std::string features, clf = "rsvm", window = "all", out = "cv_report.json";
        uint64_t seed = 0;
        int jobs = 1, reps = 10, folds = 5;
        double frame_period = 3.0;
    } cv;
    {
        auto* cmd = app.add_subcommand("cv", "repeated stratified cross-validation");
        cmd->configurable();
        cmd->fallthrough();
        cmd->add_option("--features", cv.features, "features CSV")->required();
        cmd->add_option("--clf", cv.clf, "classifier lda|lsvm|rsvm");
        cmd->add_option("--window", cv.window, "frame window all|l3|l");
        cmd->add_option("--seed", cv.seed, "RNG seed");
        cmd->add_option("--jobs", cv.jobs, "worker threads");
        cmd->add_option("--reps", cv.reps, "repetitions");
        cmd->add_option("--folds", cv.folds, "folds");
        cmd->add_option("--frame-period", cv.frame_period, "seconds per frame_index step");
        cmd->add_option("--out", cv.out, "output JSON path");
    }

    // ---- fuse -------------------------------------------------------------
    struct {
        std::string audio, video, truth, out = "fusion.json";
        double f1_audio = 0, f1_video = 0, grid_step = 0.01;
        bool validation = false;
        int folds = 5;
        uint64_t seed = 0;
    } fuse;
    {
        auto* cmd = app.add_subcommand("fuse", "posterior decision fusion");
        cmd->configurable();
        cmd->fallthrough();
        cmd->add_option("--audio", fuse.audio, "ad_id,p audio posteriors CSV")->required();
        cmd->add_option("--video", fuse.video, "ad_id,p video posteriors CSV")->required();
        cmd->add_option("--truth", fuse.truth, "ad_id,label CSV")->required();
        cmd->add_option("--f1-audio", fuse.f1_audio, "training F1 of the audio model")
            ->required();
        cmd->add_option("--f1-video", fuse.f1_video, "training F1 of the video model")
            ->required();
        cmd->add_option("--grid-step", fuse.grid_step, "alpha grid step");
        cmd->add_flag("--validation-fusion", fuse.validation,
                      "tune weights on inner folds instead of the scored labels");
        cmd->add_option("--folds", fuse.folds, "folds for --validation-fusion");
        cmd->add_option("--seed", fuse.seed, "fold RNG seed for --validation-fusion");
        cmd->add_option("--out", fuse.out, "output JSON path");
    }

    // ---- mtl --------------------------------------------------------------
    struct {
        std::string tasks, out = "mtl_model.json";
        double alpha = 1.0, beta = 0.1, gamma = 0.1, tol = 1e-10;
        int max_iter = 2000;
    } mtl;
    {
        auto* cmd = app.add_subcommand("mtl", "sparse graph-regularized multi-task training");
        cmd->configurable();
        cmd->fallthrough();
        cmd->add_option("--tasks", mtl.tasks, "directory of per-task feature CSVs")->required();
        cmd->add_option("--alpha", mtl.alpha, "graph coupling weight");
        cmd->add_option("--beta", mtl.beta, "l1 weight");
        cmd->add_option("--gamma", mtl.gamma, "Frobenius weight");
        cmd->add_option("--max-iter", mtl.max_iter, "iteration cap");
        cmd->add_option("--tol", mtl.tol, "relative objective tolerance");
        cmd->add_option("--out", mtl.out, "output JSON path");
    }

    // ---- schedule ----------------------------------------------------------
    struct {
        std::string scenes, ads, method = "exact", out = "schedule.json";
        int k = 5;
        double spacing = 60.0, wv = 0.6, wa = 0.4;
        bool contrast = false;
    } sched;
    {
        auto* cmd = app.add_subcommand("schedule", "emotion-aware ad insertion");
        cmd->configurable();
        cmd->fallthrough();
        cmd->add_option("--scenes", sched.scenes, "scene_id,arousal,valence,length_s CSV")
            ->required();
        cmd->add_option("--ads", sched.ads, "ad_id,arousal,valence,length_s CSV")->required();
        cmd->add_option("--k", sched.k, "number of insertions")->required();
        cmd->add_option("--method", sched.method, "exact|greedy");
        cmd->add_option("--spacing", sched.spacing, "min program seconds between insertions");
        cmd->add_option("--wv", sched.wv, "valence match weight");
        cmd->add_option("--wa", sched.wa, "arousal match weight");
        cmd->add_flag("--contrast", sched.contrast, "reward affect mismatch instead of match");
        cmd->add_option("--out", sched.out, "output JSON path");
    }

    // ---- report -------------------------------------------------------------
    struct {
        std::string schedule, scenes, ads, out = "schedule_report.json";
        double wv = 0.6, wa = 0.4;
        bool contrast = false;
    } rept;
    {
        auto* cmd = app.add_subcommand("report", "per-insertion breakdown of a schedule");
        cmd->configurable();
        cmd->fallthrough();
        cmd->add_option("--schedule", rept.schedule, "schedule JSON from `schedule`")
            ->required();
        cmd->add_option("--scenes", rept.scenes, "scene CSV")->required();
        cmd->add_option("--ads", rept.ads, "ad score CSV")->required();
        cmd->add_option("--wv", rept.wv, "valence match weight");
        cmd->add_option("--wa", rept.wa, "arousal match weight");
        cmd->add_flag("--contrast", rept.contrast, "contrast mode");
        cmd->add_option("--out", rept.out, "output JSON path");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("agree")) {
            const RatingsTable table = load_ratings(agree.ratings);
            std::vector<AdRecord> ads;
            const bool with_ads = !agree.ads.empty();
            if (with_ads) ads = load_ads(agree.ads);
            const auto rep = agreement_report(table, parse_dimension(agree.dim),
                                              parse_alpha_metric(agree.metric),
                                              with_ads ? &ads : nullptr);
            write_artifact(agree.out, agreement_to_json(rep));
            json cfg{{"ratings", agree.ratings}, {"ads", agree.ads}, {"dim", agree.dim},
                     {"metric", agree.metric}, {"out", agree.out}};
            std::vector<std::string> inputs{agree.ratings};
            if (with_ads) inputs.push_back(agree.ads);
            write_manifest("agree", cfg, inputs, parent_dir(agree.out));
        } else if (app.got_subcommand("corr")) {
            const RatingsTable table = load_ratings(corr.ratings);
            const auto rep = pearson_with_fdr(table, corr.q);
            write_artifact(corr.out, correlation_to_json(rep));
            write_manifest("corr", json{{"ratings", corr.ratings}, {"q", corr.q},
                                        {"out", corr.out}},
                           {corr.ratings}, parent_dir(corr.out));
        } else if (app.got_subcommand("spectrogram")) {
            const AudioClip clip = read_wav(spect.wav);
            const auto segments = segment_spectrograms(clip, spect.segment, spect.min_partial);
            fs::create_directories(spect.out);
            json meta;
            meta["segments"] = json::array();
            for (size_t i = 0; i < segments.size(); ++i) {
                char name[32];
                std::snprintf(name, sizeof(name), "segment_%03zu.csv", i);
                atomic_write_file((fs::path(spect.out) / name).string(),
                                  matrix_csv(segments[i].magnitudes));
                meta["segments"].push_back({{"file", name},
                                            {"start_s", segments[i].segment_span.first},
                                            {"end_s", segments[i].segment_span.second},
                                            {"zero_padded", segments[i].zero_padded},
                                            {"n_windows", segments[i].n_windows()},
                                            {"n_bins", segments[i].n_bins()}});
            }
            meta["window_s"] = 0.040;
            meta["hop_s"] = 0.020;
            write_artifact((fs::path(spect.out) / "segments.json").string(), meta);
            write_manifest("spectrogram",
                           json{{"wav", spect.wav}, {"segment", spect.segment},
                                {"min_partial", spect.min_partial}, {"out", spect.out}},
                           {spect.wav}, spect.out);
        } else if (app.got_subcommand("hanjalic")) {
            const AudioClip clip = read_wav(han.wav);
            const FrameSequence frames = read_frames(han.frames);
            HanjalicConfig cfg;
            std::copy(han.aw.begin(), han.aw.end(), cfg.arousal_weights);
            std::copy(han.vw.begin(), han.vw.end(), cfg.valence_weights);
            cfg.shot_threshold_k = han.shot_k;
            cfg.voicing_threshold = han.voicing;
            cfg.smoother.enabled = !han.no_smooth;
            cfg.smoother.length_s = han.smooth_len;
            cfg.smoother.kaiser_beta = han.kaiser_beta;
            cfg.smoother.kind =
                han.triangular ? SmootherKind::Triangular : SmootherKind::Kaiser;
            cfg.normalize = !han.no_normalize;
            const HanjalicCurves curves = hanjalic_pipeline(clip, frames, cfg);
            json doc = curves_to_json(curves);
            doc["means"] = {{"arousal", curve_means_json(curves.arousal)},
                            {"valence", curve_means_json(curves.valence)}};
            write_artifact(han.out, doc);
            write_manifest("hanjalic",
                           json{{"wav", han.wav}, {"frames", han.frames},
                                {"arousal_weights", han.aw}, {"valence_weights", han.vw},
                                {"shot_k", han.shot_k}, {"smooth_len", han.smooth_len},
                                {"kaiser_beta", han.kaiser_beta}, {"voicing", han.voicing},
                                {"no_smooth", han.no_smooth}, {"triangular", han.triangular},
                                {"no_normalize", han.no_normalize}, {"out", han.out}},
                           {han.wav}, parent_dir(han.out));
        } else if (app.got_subcommand("lexicon-score")) {
            const AffectLexicon lexicon = load_lexicon(lex.lexicon);
            const csv::File capfile = csv::read_file(lex.captions);
            if (capfile.header.size() < 2 || capfile.header[0] != "ad_id" ||
                capfile.header[1] != "text")
                throw ParseError("'" + lex.captions + "': expected header ad_id,text");
            LexiconOptions opts;
            opts.stem = lex.stem;
            opts.drop_stopwords = lex.drop_stopwords;

            std::vector<std::string> ids;
            std::vector<TextScore> scores;
            for (const auto& row : capfile.rows) {
                ids.push_back(row.fields[0]);
                scores.push_back(
                    score_text(row.fields.size() > 1 ? row.fields[1] : "", lexicon, opts));
            }
            std::vector<std::optional<double>> vs, as;
            for (const auto& s : scores) {
                vs.push_back(s.valence);
                as.push_back(s.arousal);
            }
            const auto v_labels = label_corpus(vs);
            const auto a_labels = label_corpus(as);

            json doc;
            doc["lexicon_size"] = lexicon.size();
            doc["ads"] = json::array();
            for (size_t i = 0; i < ids.size(); ++i) {
                json row{{"ad_id", ids[i]}, {"coverage", scores[i].coverage}};
                row["valence"] = scores[i].valence ? json(*scores[i].valence) : json();
                row["arousal"] = scores[i].arousal ? json(*scores[i].arousal) : json();
                row["label_v"] =
                    v_labels[i] ? json(std::string(1, label_char(*v_labels[i]))) : json();
                row["label_a"] =
                    a_labels[i] ? json(std::string(1, label_char(*a_labels[i]))) : json();
                doc["ads"].push_back(row);
            }
            write_artifact(lex.out, doc);
            write_manifest("lexicon-score",
                           json{{"lexicon", lex.lexicon}, {"captions", lex.captions},
                                {"stem", lex.stem}, {"drop_stopwords", lex.drop_stopwords},
                                {"out", lex.out}},
                           {lex.lexicon, lex.captions}, parent_dir(lex.out));
        } else if (app.got_subcommand("cv")) {
            const FeatureTable table = load_features(cv.features);
            ClfSpec spec;
            spec.kind = parse_classifier(cv.clf);
            CvConfig cfg;
            cfg.window = parse_curve_window(cv.window);
            cfg.seed = cv.seed;
            cfg.jobs = cv.jobs;
            cfg.repetitions = cv.reps;
            cfg.folds = cv.folds;
            cfg.frame_period_s = cv.frame_period;
            const CvReport rep = cross_validate(table, spec, cfg);
            write_artifact(cv.out, cv_report_to_json(rep));
            write_manifest("cv",
                           json{{"features", cv.features}, {"clf", cv.clf},
                                {"window", cv.window}, {"seed", cv.seed}, {"jobs", cv.jobs},
                                {"reps", cv.reps}, {"folds", cv.folds},
                                {"frame_period", cv.frame_period}, {"out", cv.out}},
                           {cv.features}, parent_dir(cv.out));
        } else if (app.got_subcommand("fuse")) {
            const auto pa = load_posteriors(fuse.audio);
            const auto pv = load_posteriors(fuse.video);
            const auto truth_map = load_truth(fuse.truth);
            if (pa.size() != pv.size())
                throw ValidationError("fuse: audio/video posterior files differ in length");
            std::vector<double> a, v;
            std::vector<int> truth;
            for (size_t i = 0; i < pa.size(); ++i) {
                if (pa[i].first != pv[i].first)
                    throw ValidationError("fuse: ad order mismatch at '" + pa[i].first + "'");
                const auto t = truth_map.find(pa[i].first);
                if (t == truth_map.end())
                    throw ValidationError("fuse: no truth label for '" + pa[i].first + "'");
                a.push_back(pa[i].second);
                v.push_back(pv[i].second);
                truth.push_back(t->second);
            }
            json doc;
            if (fuse.validation) {
                const ValidationFusionResult res =
                    validation_fusion(a, v, fuse.f1_audio, fuse.f1_video, truth,
                                      fuse.grid_step, fuse.folds, fuse.seed);
                doc["mode"] = "validation";
                doc["f1"] = res.f1;
                doc["labels"] = res.labels;
                doc["per_fold"] = json::array();
                for (const auto& fr : res.per_fold) doc["per_fold"].push_back(fusion_to_json(fr));
            } else {
                const FusionResult res = decision_fusion(a, v, fuse.f1_audio, fuse.f1_video,
                                                         truth, fuse.grid_step);
                doc = fusion_to_json(res);
                doc["mode"] = "optimistic";
                doc["note"] = "weights maximize F1 on the supplied labels; "
                              "optimistic when those labels are the test set";
            }
            write_artifact(fuse.out, doc);
            write_manifest("fuse",
                           json{{"audio", fuse.audio}, {"video", fuse.video},
                                {"truth", fuse.truth}, {"f1_audio", fuse.f1_audio},
                                {"f1_video", fuse.f1_video}, {"grid_step", fuse.grid_step},
                                {"validation", fuse.validation}, {"folds", fuse.folds},
                                {"seed", fuse.seed}, {"out", fuse.out}},
                           {fuse.audio, fuse.video, fuse.truth}, parent_dir(fuse.out));
        } else if (app.got_subcommand("mtl")) {
            std::vector<std::string> files;
            for (const auto& e : fs::directory_iterator(mtl.tasks))
                if (e.is_regular_file() && e.path().extension() == ".csv")
                    files.push_back(e.path().string());
            std::sort(files.begin(), files.end());
            if (files.empty())
                throw ValidationError("mtl: no task CSVs in '" + mtl.tasks + "'");
            std::vector<MatX> X;
            std::vector<VecX> y;
            for (const auto& f : files) {
                const FeatureTable t = load_features(f);
                X.push_back(t.features);
                VecX labels(t.size());
                for (Eigen::Index i = 0; i < t.size(); ++i)
                    labels[i] = t.rows[static_cast<size_t>(i)].label;
                y.push_back(std::move(labels));
            }
            const MatX R = X.size() == 4
                               ? quadrant_incidence()
                               : incidence_from_edges(static_cast<int>(X.size()), [&] {
                                     // chain graph for non-quadrant task counts
                                     std::vector<std::pair<int, int>> e;
                                     for (int t = 0; t + 1 < static_cast<int>(X.size()); ++t)
                                         e.emplace_back(t, t + 1);
                                     return e;
                                 }());
            const MtlModel model =
                train_mtl(X, y, R, mtl.alpha, mtl.beta, mtl.gamma, mtl.max_iter, mtl.tol);
            json doc = mtl_to_json(model);
            doc["task_files"] = files;
            write_artifact(mtl.out, doc);
            write_manifest("mtl",
                           json{{"tasks", mtl.tasks}, {"alpha", mtl.alpha}, {"beta", mtl.beta},
                                {"gamma", mtl.gamma}, {"max_iter", mtl.max_iter},
                                {"tol", mtl.tol}, {"out", mtl.out}},
                           files, parent_dir(mtl.out));
        } else if (app.got_subcommand("schedule")) {
            SchedulingProblem prob;
            prob.scenes = load_affect_items(sched.scenes, "scene_id");
            prob.ads = load_affect_items(sched.ads, "ad_id");
            prob.insertions = sched.k;
            SolverOptions opts;
            opts.weights.valence = sched.wv;
            opts.weights.arousal = sched.wa;
            opts.weights.contrast = sched.contrast;
            opts.spacing_min_s = sched.spacing;
            opts.method = sched.method == "greedy" ? SolveMethod::Greedy : SolveMethod::Exact;
            const InsertionSchedule schedule = solve_schedule(prob, opts);
            if (const auto bad = validate_schedule(prob, schedule, opts.spacing_min_s))
                throw ValidationError("solver produced an invalid schedule: " + *bad);
            write_artifact(sched.out, schedule_to_json(schedule));
            write_manifest("schedule",
                           json{{"scenes", sched.scenes}, {"ads", sched.ads}, {"k", sched.k},
                                {"method", sched.method}, {"spacing", sched.spacing},
                                {"wv", sched.wv}, {"wa", sched.wa},
                                {"contrast", sched.contrast}, {"out", sched.out}},
                           {sched.scenes, sched.ads}, parent_dir(sched.out));
        } else if (app.got_subcommand("report")) {
            SchedulingProblem prob;
            prob.scenes = load_affect_items(rept.scenes, "scene_id");
            prob.ads = load_affect_items(rept.ads, "ad_id");
            std::ifstream in(rept.schedule);
            if (!in) throw ParseError("cannot open '" + rept.schedule + "'");
            const json sj = json::parse(in);
            InsertionSchedule schedule;
            schedule.objective_value = sj.value("objective_value", 0.0);
            for (const auto& a : sj.at("assignments"))
                schedule.assignments.push_back(
                    {a.at("breakpoint").get<int>(), a.at("ad_id").get<std::string>()});
            prob.insertions = static_cast<int>(schedule.assignments.size());
            RelevanceWeights w;
            w.valence = rept.wv;
            w.arousal = rept.wa;
            w.contrast = rept.contrast;
            const ScheduleReport rep = schedule_report(schedule, prob, w);
            write_artifact(rept.out, schedule_report_to_json(rep));
            write_manifest("report",
                           json{{"schedule", rept.schedule}, {"scenes", rept.scenes},
                                {"ads", rept.ads}, {"wv", rept.wv}, {"wa", rept.wa},
                                {"contrast", rept.contrast}, {"out", rept.out}},
                           {rept.schedule, rept.scenes, rept.ads}, parent_dir(rept.out));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
