#include "pirep/pirep.h"

#include "pirep/errors.hpp"
#include "pirep/harness.hpp"
#include "pirep/io.hpp"
#include "pirep/powers.hpp"
#include "pirep/products.hpp"
#include "pirep/shifts.hpp"
#include "pirep/wold.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>
#include <thread>

struct pirep_rep {
    pirep::CovariantRep rep;
};

using namespace pirep;

namespace {

thread_local std::string last_error;

pirep_status status_of(ErrorKind kind)
{
    // ErrorKind and pirep_status share their order; the offset is PIREP_OK.
    return static_cast<pirep_status>(static_cast<int>(kind) + 1);
}

template <class F>
pirep_status guarded(F&& body)
{
    last_error.clear();
    try {
        body();
        return PIREP_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return PIREP_E_RESOURCE;
    } catch (const std::exception& e) {
        last_error = e.what();
        return PIREP_E_INTERNAL;
    } catch (...) {
        last_error = "unknown exception";
        return PIREP_E_INTERNAL;
    }
}

pirep_status null_argument(const char* what)
{
    last_error = std::string(what) + " must not be null";
    return PIREP_E_NULL_ARGUMENT;
}

Tolerance tolerance_of(const pirep_options* o)
{
    Tolerance tol;
    if (o != nullptr) {
        tol.rank_rel = o->rank_rel;
        tol.eq_rel = o->eq_rel;
        tol.incl_abs = o->incl_abs;
    }
    if (!(tol.rank_rel > 0.0) || !(tol.eq_rel > 0.0) || !(tol.incl_abs > 0.0))
        fail(ErrorKind::usage, "tolerances must be positive");
    return tol;
}

Index cap_of(const pirep_options* o)
{
    if (o == nullptr)
        return kDefaultTensorCap;
    if (o->tensor_cap < 1)
        fail(ErrorKind::usage, "tensor cap must be positive");
    return static_cast<Index>(o->tensor_cap);
}

int jobs_of(const pirep_options* o)
{
    const int jobs = o == nullptr ? 1 : o->jobs;
    if (jobs < 0)
        fail(ErrorKind::usage, "jobs must be non-negative");
    if (jobs == 0)
        return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return jobs;
}

char* copy_out(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr)
        throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

void emit(const Json& j, char** out)
{
    *out = copy_out(dump(j, 2));
}

// Runs a sub-report, recording precondition-type failures in place of it.
template <class F>
Json section(F&& body)
{
    try {
        return body();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::precondition || e.kind() == ErrorKind::resource || e.kind() == ErrorKind::window ||
            e.kind() == ErrorKind::intertwiner)
            return Json{{"not_applicable", e.what()}, {"error", to_string(e.kind())}};
        throw;
    }
}

} // namespace

extern "C" {

void pirep_options_init(pirep_options* options)
{
    if (options == nullptr)
        return;
    const Tolerance tol;
    options->rank_rel = tol.rank_rel;
    options->eq_rel = tol.eq_rel;
    options->incl_abs = tol.incl_abs;
    options->tensor_cap = static_cast<int64_t>(kDefaultTensorCap);
    options->jobs = 1;
}

const char* pirep_version(void) { return "1.0.0"; }

const char* pirep_status_string(pirep_status status)
{
    switch (status) {
    case PIREP_OK: return "ok";
    case PIREP_E_NULL_ARGUMENT: return "null_argument";
    case PIREP_E_INTERNAL: return "internal";
    default: break;
    }
    const int k = static_cast<int>(status) - 1;
    if (k >= 0 && k <= static_cast<int>(ErrorKind::parse))
        return to_string(static_cast<ErrorKind>(k));
    return "unknown";
}

const char* pirep_last_error(void) { return last_error.c_str(); }

void pirep_string_free(char* s) { std::free(s); }

pirep_status pirep_rep_from_json(const char* json, const pirep_options* options, pirep_rep** out)
{
    if (json == nullptr)
        return null_argument("json");
    if (out == nullptr)
        return null_argument("out");
    *out = nullptr;
    return guarded([&] {
        CovariantRep rep = rep_from_json(parse_json(json), tolerance_of(options), cap_of(options));
        *out = new pirep_rep{std::move(rep)};
    });
}

pirep_status pirep_rep_fixture(const char* kind, int64_t dim, uint64_t seed, const pirep_options* options,
                               pirep_rep** out)
{
    if (kind == nullptr)
        return null_argument("kind");
    if (out == nullptr)
        return null_argument("out");
    *out = nullptr;
    return guarded([&] {
        if (dim < 1)
            fail(ErrorKind::usage, "fixture dimension must be positive");
        FixtureOptions fo;
        fo.dim = static_cast<Index>(dim);
        fo.tol = tolerance_of(options);
        fo.tensor_cap = cap_of(options);
        Rng rng(seed);
        CovariantRep rep = random_structured_fixture(kind, rng, fo);
        *out = new pirep_rep{std::move(rep)};
    });
}

void pirep_rep_free(pirep_rep* rep) { delete rep; }

pirep_status pirep_rep_to_json(const pirep_rep* rep, char** out)
{
    if (rep == nullptr)
        return null_argument("rep");
    if (out == nullptr)
        return null_argument("out");
    return guarded([&] { emit(to_json(rep->rep), out); });
}

pirep_status pirep_rep_hilbert_dim(const pirep_rep* rep, int64_t* out)
{
    if (rep == nullptr)
        return null_argument("rep");
    if (out == nullptr)
        return null_argument("out");
    *out = static_cast<int64_t>(rep->rep.hilbert_dim());
    return PIREP_OK;
}

pirep_status pirep_classify_json(const pirep_rep* rep, char** out)
{
    if (rep == nullptr)
        return null_argument("rep");
    if (out == nullptr)
        return null_argument("out");
    return guarded([&] { emit(to_json(classify(rep->rep)), out); });
}

pirep_status pirep_product_json(const pirep_rep* const* reps, size_t count, int all_conditions, char** out)
{
    if (reps == nullptr)
        return null_argument("reps");
    if (out == nullptr)
        return null_argument("out");
    for (size_t i = 0; i < count; ++i)
        if (reps[i] == nullptr)
            return null_argument("reps[i]");
    return guarded([&] {
        if (count < 2)
            fail(ErrorKind::usage, "a product needs at least two factors");
        std::vector<CovariantRep> factors;
        for (size_t i = 0; i < count; ++i)
            factors.push_back(reps[i]->rep);
        const ProductRep product(factors);
        const int n = product.size();

        Json stages = Json::array();
        for (int i = 1; i <= n; ++i) {
            Json s = to_json(classify(product.stage(i), product.tolerance()));
            s["stage"] = i;
            stages.push_back(std::move(s));
        }

        // The two-factor statements apply to (stage n-1, last factor), which
        // is the pair itself when n = 2.
        const CovariantRep first = n == 2 ? product.factor(1) : product.as_rep(n - 1);
        const CovariantRep& last = product.factor(n);
        Json pair;
        pair["commuting_projections"] = section([&] { return to_json(commuting_projection_test(first, last)); });
        pair["sufficient_intertwining"] = section([&] { return to_json(sufficient_intertwining_check(first, last)); });
        pair["defect_dilation"] = section([&] { return to_json(defect_dilation_test(first, last)); });

        Json j;
        j["factors"] = n;
        j["stages"] = std::move(stages);
        j["pinv_chain"] = to_json(product_pinv_test(product));
        j["pair"] = std::move(pair);
        if (all_conditions != 0)
            j["chain"] = section([&] { return to_json(erdelyi_chain_test(product)); });
        emit(j, out);
    });
}

pirep_status pirep_powers_json(const pirep_rep* rep, int n_max, char** out)
{
    if (rep == nullptr)
        return null_argument("rep");
    if (out == nullptr)
        return null_argument("out");
    return guarded([&] {
        if (n_max < 1)
            fail(ErrorKind::usage, "nmax must be at least 1");
        const CovariantRep& r = rep->rep;
        Json j;
        j["powers"] = to_json(power_report(r, n_max));
        j["regularity"] = to_json(regularity(r));
        j["regular_power"] = to_json(regular_pi_iff_power_pi(r, n_max));
        j["bi_regularity"] = section([&] { return to_json(bi_regularity(r, std::max(1, n_max - 1))); });
        emit(j, out);
    });
}

pirep_status pirep_root_json(const pirep_rep* rep, int k, char** out)
{
    if (rep == nullptr)
        return null_argument("rep");
    if (out == nullptr)
        return null_argument("out");
    return guarded([&] {
        if (k < 2)
            fail(ErrorKind::usage, "root power k must be at least 2");
        Json j;
        j["root"] = to_json(root_criterion(rep->rep, k));
        j["kernel_remark"] = to_json(gupta_criterion(rep->rep, k));
        emit(j, out);
    });
}

pirep_status pirep_wold_json(const pirep_rep* rep, char** out)
{
    if (rep == nullptr)
        return null_argument("rep");
    if (out == nullptr)
        return null_argument("out");
    return guarded([&] { emit(to_json(wold_decompose(rep->rep)), out); });
}

pirep_status pirep_shift_json(const char* spec_json, int power, int include_rep, const pirep_options* options,
                              char** out)
{
    if (spec_json == nullptr)
        return null_argument("spec_json");
    if (out == nullptr)
        return null_argument("out");
    return guarded([&] {
        if (power < 1)
            fail(ErrorKind::usage, "power must be at least 1");
        const Tolerance tol = tolerance_of(options);
        const WeightedShiftSpec spec = shift_spec_from_json(parse_json(spec_json));
        spec.validate();
        const ShiftRealization real = build_shift(spec, tol);

        Json kernels = Json::array();
        for (Index i = 1; i <= spec.n; ++i) {
            kernels.push_back(section([&] {
                const std::vector<Index> formula = kernel_formula(spec, i, power);
                const std::vector<Index> brute = brute_force_kernel(spec, i, power, tol);
                return Json{{"i", i},
                            {"window", faithful_window(spec, i, power)},
                            {"formula", formula},
                            {"brute_force", brute},
                            {"agree", formula == brute}};
            }));
        }
        Json dropped = Json::array();
        for (const auto& [i, m] : real.out_of_window)
            dropped.push_back(Json::array({i, m}));

        Json j;
        j["spec"] = to_json(spec);
        j["M"] = spec.resolved_trunc();
        j["power"] = power;
        j["out_of_window"] = std::move(dropped);
        j["kernels"] = std::move(kernels);
        j["criterion"] = to_json(shift_pi_criterion(spec, power, tol));
        j["chain_inclusion"] = section([&] { return to_json(chain_inclusion_check(spec, power, tol)); });
        j["classification"] = to_json(classify(real.rep));
        if (include_rep != 0)
            j["rep"] = to_json(real.rep);
        emit(j, out);
    });
}

pirep_status pirep_verify_json(const char* theorem, uint64_t seed, int trials, int falsify,
                               const pirep_options* options, char** out, int* passed)
{
    if (theorem == nullptr)
        return null_argument("theorem");
    if (out == nullptr)
        return null_argument("out");
    return guarded([&] {
        const TheoremId id = theorem_from_string(theorem);
        TrialConfig c = default_config(id);
        c.master_seed = seed;
        c.trials = trials;
        c.falsify = falsify != 0;
        c.tol = tolerance_of(options);
        c.tensor_cap = cap_of(options);
        c.jobs = jobs_of(options);
        const VerificationReport r = verify(id, c);
        emit(to_json(r), out);
        if (passed != nullptr)
            *passed = r.passed() ? 1 : 0;
    });
}

pirep_status pirep_theorems(char** out)
{
    if (out == nullptr)
        return null_argument("out");
    return guarded([&] {
        std::ostringstream s;
        for (TheoremId id : all_theorems())
            s << to_string(id) << '\t' << statement(id) << '\n';
        *out = copy_out(s.str());
    });
}

} // extern "C"
