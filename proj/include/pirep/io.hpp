#pragma once

#include "pirep/covrep.hpp"
#include "pirep/powers.hpp"
#include "pirep/products.hpp"
#include "pirep/shifts.hpp"
#include "pirep/wold.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace pirep {

/// Key order is insertion order so that serialized reports are stable.
using Json = nlohmann::ordered_json;

/// Compact or indented JSON with every floating-point number printed as
/// %.17g, which round-trips doubles exactly. Non-finite values become null.
std::string dump(const Json& j, int indent = -1);
/// Parse error on malformed text.
Json parse_json(std::string_view text);

/// {"rows": r, "cols": c, "data": [[re, im], ...]}, row-major.
Json to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

/// A subspace is its frame.
Json to_json(const Subspace& s);

Json to_json(const Tolerance& tol);
/// Missing fields keep the values of `base`.
Tolerance tolerance_from_json(const Json& j, const Tolerance& base = {});

/// Structure data: block_sizes, module_dim, gram (N² algebra elements, entry
/// a * N + b), left_action and right_action (one matrix per matrix unit).
/// The scalar module C^n is written {"scalar": n}. On input a bimodule may
/// also be given as {"bimodule": {"block_sizes": [...], "mu": [[...]]}}.
Json to_json(const FdCorrespondence& e);
FdCorrespondence correspondence_from_json(const Json& j);

/// {"correspondence": ..., "sigma": {"multiplicities": [...]},
///  "v_on_basis": [matrix, ...]}. The algebra of σ is the coefficient algebra
/// of the correspondence.
Json to_json(const CovariantRep& rep);
CovariantRep rep_from_json(const Json& j, const Tolerance& tol = {}, Index tensor_cap = kDefaultTensorCap);

/// {"n", "M", "B": [...], "weights": [{"i", "m", "w"}, ...]}; M is omitted
/// when the default truncation is selected.
Json to_json(const WeightedShiftSpec& spec);
WeightedShiftSpec shift_spec_from_json(const Json& j);
/// Weight overrides as a list of {"i", "m", "w"} objects.
std::map<std::pair<Index, Index>, double> shift_weights_from_json(const Json& j);

Json to_json(const PartialIsometryConditions& c);
Json to_json(const ClassificationReport& r);
Json to_json(const IntertwiningReport& r);
Json to_json(const CommutingProjectionReport& r);
Json to_json(const ChainReport& r);
Json to_json(const PinvChainReport& r);
/// The dilation matrix itself is omitted; its shape is recorded.
Json to_json(const DefectDilationReport& r);
Json to_json(const PowerReport& r);
Json to_json(const RegularityCheck& r);
Json to_json(const GeneralizedInverseReport& r);
Json to_json(const RegularPowerReport& r);
Json to_json(const RootReport& r);
Json to_json(const GuptaReport& r);
Json to_json(const ShiftPiReport& r);
Json to_json(const ChainInclusionReport& r);
Json to_json(const BiRegularityReport& r);
Json to_json(const WoldResult& r);
Json to_json(const WoldReport& r);

} // namespace pirep
