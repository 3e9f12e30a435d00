#include "pirep/io.hpp"

#include "pirep/errors.hpp"

#include <cmath>
#include <cstdio>

namespace pirep {

namespace {

void write(std::string& out, const Json& j, int indent, int depth)
{
    const auto newline = [&](int d) {
        if (indent < 0)
            return;
        out += '\n';
        out.append(static_cast<size_t>(indent * d), ' ');
    };
    switch (j.type()) {
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        bool first = true;
        for (const Json& item : j) {
            if (!first)
                out += ',';
            first = false;
            newline(depth + 1);
            write(out, item, indent, depth + 1);
        }
        newline(depth);
        out += ']';
        return;
    }
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (const auto& [key, value] : j.items()) {
            if (!first)
                out += ',';
            first = false;
            newline(depth + 1);
            out += Json(key).dump();
            out += indent < 0 ? ":" : ": ";
            write(out, value, indent, depth + 1);
        }
        newline(depth);
        out += '}';
        return;
    }
    case Json::value_t::number_float: {
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            out += "null";
            return;
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
        return;
    }
    default:
        out += j.dump();
    }
}

// nlohmann reports missing keys and wrong types through its own exceptions;
// the library surface only knows parse errors.
template <class F>
auto guarded(const char* what, F&& f)
{
    try {
        return f();
    } catch (const Json::exception& e) {
        fail(ErrorKind::parse, std::string(what) + ": " + e.what());
    }
}

Json matrices(const std::vector<CMatrix>& ms)
{
    Json out = Json::array();
    for (const CMatrix& m : ms)
        out.push_back(to_json(m));
    return out;
}

std::vector<CMatrix> matrices_from_json(const Json& j)
{
    std::vector<CMatrix> out;
    for (const Json& m : j)
        out.push_back(matrix_from_json(m));
    return out;
}

Json flags(const std::vector<bool>& v)
{
    Json out = Json::array();
    for (bool b : v)
        out.push_back(b);
    return out;
}

bool is_standard_scalar(const FdCorrespondence& e)
{
    if (!e.algebra().is_scalar())
        return false;
    const Index n = e.module_dim();
    const CMatrix id = CMatrix::Identity(n, n);
    if (e.left_action(0) != id || e.right_action(0) != id)
        return false;
    for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b)
            if (e.gram(a, b)(0, 0) != cplx(a == b ? 1.0 : 0.0))
                return false;
    return true;
}

} // namespace

std::string dump(const Json& j, int indent)
{
    std::string out;
    write(out, j, indent, 0);
    return out;
}

Json parse_json(std::string_view text)
{
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::exception& e) {
        fail(ErrorKind::parse, std::string("malformed JSON: ") + e.what());
    }
}

Json to_json(const CMatrix& m)
{
    Json data = Json::array();
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            data.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

CMatrix matrix_from_json(const Json& j)
{
    return guarded("matrix", [&] {
        const Index rows = j.at("rows").get<Index>();
        const Index cols = j.at("cols").get<Index>();
        if (rows < 0 || cols < 0)
            fail(ErrorKind::parse, "matrix dimensions must be nonnegative");
        const Json& data = j.at("data");
        if (!data.is_array() || static_cast<Index>(data.size()) != rows * cols)
            fail(ErrorKind::parse, "matrix data must hold rows * cols entries");
        CMatrix m(rows, cols);
        size_t k = 0;
        for (Index r = 0; r < rows; ++r)
            for (Index c = 0; c < cols; ++c, ++k) {
                const Json& entry = data[k];
                if (entry.is_number())
                    m(r, c) = entry.get<double>();
                else if (entry.is_array() && entry.size() == 2)
                    m(r, c) = cplx(entry[0].get<double>(), entry[1].get<double>());
                else
                    fail(ErrorKind::parse, "matrix entries are [re, im] pairs");
            }
        return m;
    });
}

Json to_json(const Subspace& s)
{
    return Json{{"dim", s.dim()}, {"frame", to_json(s.frame())}};
}

Json to_json(const Tolerance& tol)
{
    return Json{{"rank_rel", tol.rank_rel}, {"eq_rel", tol.eq_rel}, {"incl_abs", tol.incl_abs}};
}

Tolerance tolerance_from_json(const Json& j, const Tolerance& base)
{
    return guarded("tolerance", [&] {
        Tolerance tol = base;
        tol.rank_rel = j.value("rank_rel", tol.rank_rel);
        tol.eq_rel = j.value("eq_rel", tol.eq_rel);
        tol.incl_abs = j.value("incl_abs", tol.incl_abs);
        tol.validate();
        return tol;
    });
}

Json to_json(const FdCorrespondence& e)
{
    if (is_standard_scalar(e))
        return Json{{"scalar", e.module_dim()}};
    return Json{{"block_sizes", e.algebra().block_sizes()},
                {"module_dim", e.module_dim()},
                {"gram", matrices(e.gram_entries())},
                {"left_action", matrices(e.left_actions())},
                {"right_action", matrices(e.right_actions())}};
}

FdCorrespondence correspondence_from_json(const Json& j)
{
    return guarded("correspondence", [&] {
        if (j.contains("scalar")) {
            const Index n = j.at("scalar").get<Index>();
            if (n < 0)
                fail(ErrorKind::parse, "scalar module dimension must be nonnegative");
            return scalar_correspondence(n);
        }
        if (j.contains("bimodule")) {
            const Json& b = j.at("bimodule");
            return bimodule_correspondence(FdCStarAlgebra(b.at("block_sizes").get<std::vector<Index>>()),
                                           b.at("mu").get<MultiplicityMatrix>());
        }
        FdCorrespondence e(FdCStarAlgebra(j.at("block_sizes").get<std::vector<Index>>()),
                           j.at("module_dim").get<Index>(), matrices_from_json(j.at("gram")),
                           matrices_from_json(j.at("left_action")), matrices_from_json(j.at("right_action")));
        return e;
    });
}

Json to_json(const CovariantRep& rep)
{
    return Json{{"correspondence", to_json(rep.correspondence())},
                {"sigma", Json{{"multiplicities", rep.sigma().multiplicities()}}},
                {"v_on_basis", matrices(rep.v_on_basis())}};
}

CovariantRep rep_from_json(const Json& j, const Tolerance& tol, Index tensor_cap)
{
    return guarded("representation", [&] {
        auto e = std::make_shared<const FdCorrespondence>(correspondence_from_json(j.at("correspondence")));
        e->validate(tol);
        StarRepresentation sigma(e->algebra(), j.at("sigma").at("multiplicities").get<std::vector<Index>>());
        return CovariantRep(std::move(e), std::move(sigma), matrices_from_json(j.at("v_on_basis")), tol, tensor_cap);
    });
}

Json to_json(const WeightedShiftSpec& spec)
{
    Json weights = Json::array();
    for (const auto& [key, w] : spec.weights)
        weights.push_back(Json{{"i", key.first}, {"m", key.second}, {"w", w}});
    Json out{{"n", spec.n}};
    if (spec.trunc >= 0)
        out["M"] = spec.trunc;
    out["B"] = spec.zero_set;
    out["weights"] = std::move(weights);
    return out;
}

std::map<std::pair<Index, Index>, double> shift_weights_from_json(const Json& j)
{
    return guarded("weights", [&] {
        if (!j.is_array())
            fail(ErrorKind::parse, "weights must be a list of {i, m, w} objects");
        std::map<std::pair<Index, Index>, double> out;
        for (const Json& item : j)
            out[{item.at("i").get<Index>(), item.at("m").get<Index>()}] = item.at("w").get<double>();
        return out;
    });
}

WeightedShiftSpec shift_spec_from_json(const Json& j)
{
    return guarded("weighted shift", [&] {
        WeightedShiftSpec spec;
        spec.n = j.value("n", spec.n);
        spec.trunc = j.value("M", spec.trunc);
        if (j.contains("B"))
            spec.zero_set = j.at("B").get<std::set<Index>>();
        if (j.contains("weights"))
            spec.weights = shift_weights_from_json(j.at("weights"));
        spec.validate();
        return spec;
    });
}

Json to_json(const PartialIsometryConditions& c)
{
    const char* names[PartialIsometryConditions::count] = {
        "isometric_on_kernel_complement", "adjoint_partial_isometry", "m_mstar_m_equals_m",
        "mstar_m_is_initial_projection",  "m_mstar_is_final_projection", "pseudoinverse_equals_adjoint"};
    Json out = Json::array();
    for (int k = 0; k < PartialIsometryConditions::count; ++k)
        out.push_back(Json{{"condition", names[k]},
                           {"holds", c.holds[static_cast<size_t>(k)]},
                           {"residual", c.residuals[static_cast<size_t>(k)]}});
    return out;
}

Json to_json(const ClassificationReport& r)
{
    return Json{{"is_contractive", r.is_contractive},
                {"is_isometric", r.is_isometric},
                {"is_coisometric", r.is_coisometric},
                {"is_partial_isometric", r.is_partial_isometric},
                {"norm", r.norm},
                {"isometry_residual", r.isometry_residual},
                {"consistent", r.consistent},
                {"conditions", to_json(r.conditions)}};
}

Json to_json(const IntertwiningReport& r)
{
    return Json{{"condition", to_string(r.condition)},
                {"residual", r.residual},
                {"product_is_pi", r.product_is_pi},
                {"product_residual", r.product_residual},
                {"conclusion_consistent", r.conclusion_consistent}};
}

Json to_json(const CommutingProjectionReport& r)
{
    return Json{{"product_is_pi", r.product_is_pi},
                {"projections_commute", r.projections_commute},
                {"product_residual", r.product_residual},
                {"commutator_norm", r.commutator_norm},
                {"ef_norm", r.ef_norm}};
}

Json to_json(const ChainReport& r)
{
    Json conditions = Json::array();
    for (size_t k = 0; k < 4; ++k)
        conditions.push_back(Json{{"condition", k + 1},
                                  {"residuals", r.residuals[k]},
                                  {"stagewise", flags(r.stagewise[k])},
                                  {"cumulative", flags(r.cumulative[k])}});
    return Json{{"stages", r.stages},
                {"verdicts_agree", r.verdicts_agree()},
                {"max_residual", r.max_residual()},
                {"conditions", std::move(conditions)}};
}

Json to_json(const PinvChainReport& r)
{
    return Json{{"factors_pi", r.factors_pi},
                {"is_pi", r.is_pi},
                {"pinv_factors_match", r.pinv_factors_match},
                {"product_residual", r.product_residual},
                {"chain_residual", r.chain_residual}};
}

Json to_json(const DefectDilationReport& r)
{
    return Json{{"m_rows", r.m.rows()},
                {"m_cols", r.m.cols()},
                {"m_is_pi", r.m_is_pi},
                {"rep1_is_pi", r.rep1_is_pi},
                {"m_residual", r.m_residual},
                {"rep1_residual", r.rep1_residual},
                {"single_dilation_is_pi", r.single_dilation_is_pi},
                {"single_dilation_residual", r.single_dilation_residual}};
}

Json to_json(const PowerReport& r)
{
    return Json{{"n_max", r.n_max},
                {"applicable", to_string(r.applicable)},
                {"consistent", r.applicable == Outcome::holds && r.consistent()},
                {"pi_flags", flags(r.pi_flags)},
                {"chain_flags", flags(r.chain_flags)},
                {"range_flags", flags(r.range_flags)},
                {"pi_residuals", r.pi_residuals},
                {"chain_residuals", r.chain_residuals},
                {"range_residuals", r.range_residuals}};
}

Json to_json(const RegularityCheck& r)
{
    return Json{{"regular", r.regular},
                {"residual", r.residual},
                {"generalized_range_dim", r.generalized_range.dim()},
                {"generalized_range", to_json(r.generalized_range)}};
}

Json to_json(const GeneralizedInverseReport& r)
{
    return Json{{"is_gen_inverse", r.is_gen_inverse},
                {"svs_residual", r.svs_residual},
                {"vsv_residual", r.vsv_residual},
                {"regular", r.regular},
                {"lemma_holds_up_to", r.lemma_holds_up_to},
                {"lemma_bound", r.lemma_bound},
                {"lemma_residuals", r.lemma_residuals}};
}

Json to_json(const RegularPowerReport& r)
{
    return Json{{"applicable", to_string(r.applicable)},
                {"is_pi", r.is_pi},
                {"bound", r.bound},
                {"power_pi_up_to", r.power_pi_up_to},
                {"consistent", r.consistent}};
}

Json to_json(const RootReport& r)
{
    return Json{{"applicable", to_string(r.applicable)},
                {"reason", r.reason},
                {"k", r.k},
                {"cond_a", r.cond_a},
                {"cond_b", r.cond_b},
                {"rep_is_pi", r.rep_is_pi},
                {"equivalence_holds", r.equivalence_holds()},
                {"residual_a", r.residual_a},
                {"residual_b", r.residual_b},
                {"rep_residual", r.rep_residual},
                {"kernel_inclusion_residual", r.kernel_inclusion_residual},
                {"chain_holds", r.chain_holds}};
}

Json to_json(const GuptaReport& r)
{
    return Json{{"applicable", to_string(r.applicable)},
                {"reason", r.reason},
                {"kernels_equal", r.kernels_equal},
                {"kernel_residual", r.kernel_residual},
                {"rep_is_pi", r.rep_is_pi},
                {"consistent", r.consistent}};
}

Json to_json(const ShiftPiReport& r)
{
    return Json{{"is_pi", r.is_pi},
                {"pi_residual", r.pi_residual},
                {"weights_unit_off_B", r.weights_unit_off_B},
                {"weights_positive_off_B", r.weights_positive_off_B},
                {"equivalence_holds", r.equivalence_holds},
                {"power_bound", r.power_bound},
                {"power_pi_up_to", r.power_pi_up_to}};
}

Json to_json(const ChainInclusionReport& r)
{
    return Json{{"holds", r.holds}, {"residual", r.residual}};
}

Json to_json(const BiRegularityReport& r)
{
    return Json{{"applicable", to_string(r.applicable)},
                {"n_max", r.n_max},
                {"bi_regular", r.bi_regular},
                {"residuals", r.residuals},
                {"adjoint_regular", r.adjoint_regular},
                {"adjoint_residuals", r.adjoint_residuals}};
}

Json to_json(const WoldResult& r)
{
    return Json{{"wandering", to_json(r.wandering)},
                {"generated", to_json(r.generated)},
                {"residual", to_json(r.residual)},
                {"direct_sum_residual", r.direct_sum_residual},
                {"orthogonality_residual", r.orthogonality_residual}};
}

Json to_json(const WoldReport& r)
{
    return Json{{"applicable", to_string(r.applicable)},
                {"reason", r.reason},
                {"regular", r.regular},
                {"bi_regular", r.bi_regular},
                {"is_pi", r.is_pi},
                {"form_gap", r.form_gap},
                {"primal", to_json(r.primal)},
                {"dual", to_json(r.dual)}};
}

} // namespace pirep
