#include "adaffect/json_io.hpp"

namespace adaffect {

using nlohmann::json;

namespace {

json vec_to_json(const VecX& v)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

json opt_to_json(const std::optional<double>& v)
{
    if (v) return *v;
    return nullptr;
}

} // namespace

json agreement_to_json(const AgreementReport& rep)
{
    json j;
    j["krippendorff_alpha"] = rep.krippendorff_alpha;
    j["cohen_kappa_per_rater"] = rep.cohen_kappa_per_rater;
    j["mean_rater_kappa"] = opt_to_json(rep.mean_rater_kappa);
    j["population_kappa"] = opt_to_json(rep.population_kappa);
    j["method_notes"] = rep.method_notes;
    return j;
}

json correlation_to_json(const CorrelationReport& rep)
{
    json j;
    j["fdr_q"] = rep.fdr_q;
    j["pairs"] = json::array();
    for (const auto& p : rep.pairs) {
        j["pairs"].push_back({{"dim_i", dimension_name(p.dim_i)},
                              {"dim_j", dimension_name(p.dim_j)},
                              {"mean_r", opt_to_json(p.mean_r)},
                              {"max_p", opt_to_json(p.max_p)},
                              {"significant_after_fdr", p.significant_after_fdr}});
    }
    j["tests"] = json::array();
    for (const auto& t : rep.tests) {
        j["tests"].push_back({{"rater", t.rater},
                              {"dim_i", dimension_name(t.dim_i)},
                              {"dim_j", dimension_name(t.dim_j)},
                              {"r", opt_to_json(t.r)},
                              {"p", opt_to_json(t.p)},
                              {"rejected", t.rejected}});
    }
    return j;
}

json cv_report_to_json(const CvReport& rep)
{
    json j;
    j["classifier"] = rep.classifier;
    j["window"] = curve_window_name(rep.window);
    j["seed"] = rep.seed;
    j["runs"] = json::array();
    for (const auto& r : rep.runs) {
        j["runs"].push_back({{"repetition", r.repetition},
                             {"fold", r.fold},
                             {"accuracy", r.accuracy},
                             {"f1", r.f1},
                             {"chosen_c", r.chosen_c},
                             {"chosen_gamma", r.chosen_gamma}});
    }
    j["summary"] = {{"accuracy_mean", rep.accuracy_mean},
                    {"accuracy_std", rep.accuracy_std},
                    {"f1_mean", rep.f1_mean},
                    {"f1_std", rep.f1_std}};
    return j;
}

json curve_to_json(const AffectCurve& curve)
{
    json j;
    j["dimension"] = curve.dimension == Dimension::Arousal ? "arousal" : "valence";
    j["values"] = vec_to_json(curve.values);
    j["components"] = json::object();
    for (const auto& [name, comp] : curve.components) j["components"][name] = vec_to_json(comp);
    j["weights"] = curve.weights;
    return j;
}

json curves_to_json(const HanjalicCurves& curves)
{
    json j;
    j["arousal"] = curve_to_json(curves.arousal);
    j["valence"] = curve_to_json(curves.valence);
    return j;
}

json fusion_to_json(const FusionResult& res)
{
    json j;
    j["alpha"] = {res.weights.alpha[0], res.weights.alpha[1]};
    j["t"] = {res.weights.t[0], res.weights.t[1]};
    j["training_f1"] = {res.weights.training_f1[0], res.weights.training_f1[1]};
    j["threshold"] = res.threshold;
    j["f1"] = res.f1;
    j["labels"] = res.labels;
    return j;
}

json mtl_to_json(const MtlModel& model)
{
    json j;
    j["alpha"] = model.alpha;
    j["beta"] = model.beta;
    j["gamma"] = model.gamma;
    j["iterations"] = model.iterations;
    j["converged"] = model.converged;
    j["objective"] = model.objective_trace.empty() ? 0.0 : model.objective_trace.back();
    json w = json::array();
    for (Eigen::Index t = 0; t < model.W.cols(); ++t) w.push_back(vec_to_json(model.W.col(t)));
    j["W"] = w; // one array per task
    return j;
}

json schedule_to_json(const InsertionSchedule& schedule)
{
    json j;
    j["objective_value"] = schedule.objective_value;
    j["assignments"] = json::array();
    for (const auto& a : schedule.assignments)
        j["assignments"].push_back({{"breakpoint", a.breakpoint}, {"ad_id", a.ad_id}});
    return j;
}

json schedule_report_to_json(const ScheduleReport& rep)
{
    json j;
    j["objective_value"] = rep.objective_value;
    j["insertions"] = json::array();
    for (const auto& i : rep.insertions) {
        j["insertions"].push_back({{"breakpoint", i.breakpoint},
                                   {"ad_id", i.ad_id},
                                   {"scene_id", i.scene_id},
                                   {"relevance", i.relevance}});
    }
    j["timeline"] = json::array();
    for (const auto& t : rep.timeline) {
        j["timeline"].push_back(
            {{"kind", t.kind}, {"id", t.id}, {"start_s", t.start_s}, {"length_s", t.length_s}});
    }
    return j;
}

} // namespace adaffect
