#pragma once

// JSON forms of the value types. Non-finite reals are written as null and
// read back as NaN, except where a field documents +inf.

#include <json.hpp>

#include "otlimits/core.hpp"
#include "otlimits/lagrangian.hpp"
#include "otlimits/limits.hpp"
#include "otlimits/solver.hpp"
#include "otlimits/wasserstein.hpp"

namespace otl {

using Json = nlohmann::json;

Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Vector vector_from_json(const Json& j);
Matrix matrix_from_json(const Json& j);

/// {"points": [[x, ...], ...], "dist": [[...], ...]}
Json to_json(const GroundSpace& space);
GroundSpace space_from_json(const Json& j);

/// {"weights": [...]}
Json to_json(const AtomicMeasure& mu);
AtomicMeasure measure_from_json(const Json& j);

/// {"pos": {...}, "neg": {...}}
Json to_json(const SignedMeasure& lambda);
SignedMeasure signed_from_json(const Json& j);

/// {"value": v, "plan": [[...]]}
Json to_json(const TransportPlan& plan);
/// {"value": v, "plan": [[...]], "mu": [...]}
Json to_json(const JointSolution& s);
Json to_json(const CirculationSolution& s);

Json to_json(const DualPotential& d);
DualPotential dual_from_json(const Json& j);

Json to_json(const ActionTable& t);
ActionTable action_table_from_json(const Json& j);

Json to_json(const GroundEnergy& g);

Json to_json(const SweepReport& r);
SweepReport sweep_from_json(const Json& j);

/// "value" is null when the solution is unbounded.
Json to_json(const ConditionalSolution& s);
ConditionalSolution conditional_from_json(const Json& j);

Json to_json(const LiminfRow& row);
Json to_json(const TransportMeasure& t);
Json to_json(const Th5Result& r);
Json to_json(const EnergyResult& r);

Json real(double x);
double real_from_json(const Json& j);

}  // namespace otl
