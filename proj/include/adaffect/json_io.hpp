#pragma once

#include "adaffect/agreement.hpp"
#include "adaffect/crossval.hpp"
#include "adaffect/curves.hpp"
#include "adaffect/dataset.hpp"
#include "adaffect/fusion.hpp"
#include "adaffect/mtl.hpp"
#include "adaffect/scheduler.hpp"

#include <json.hpp>

namespace adaffect {

/// JSON projections of the report types (artifact payloads; schema_version
/// is added at write time).
nlohmann::json agreement_to_json(const AgreementReport& rep);
nlohmann::json correlation_to_json(const CorrelationReport& rep);
nlohmann::json cv_report_to_json(const CvReport& rep);
nlohmann::json curve_to_json(const AffectCurve& curve);
nlohmann::json curves_to_json(const HanjalicCurves& curves);
nlohmann::json fusion_to_json(const FusionResult& res);
nlohmann::json mtl_to_json(const MtlModel& model);
nlohmann::json schedule_to_json(const InsertionSchedule& schedule);
nlohmann::json schedule_report_to_json(const ScheduleReport& rep);

} // namespace adaffect
