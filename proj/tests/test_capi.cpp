// Exercises the shared library through its C header only.
#include "pirep/pirep.h"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <thread>

using nlohmann::json;

namespace {

// Takes ownership of a library string and parses it.
json take(char* s)
{
    EXPECT_NE(s, nullptr);
    json j = json::parse(s);
    pirep_string_free(s);
    return j;
}

std::string scalar_rep_json(int dim, const std::string& data)
{
    return R"({"correspondence":{"scalar":1},"sigma":{"multiplicities":[)" + std::to_string(dim) +
           R"(]},"v_on_basis":[{"rows":)" + std::to_string(dim) + R"(,"cols":)" + std::to_string(dim) +
           R"(,"data":)" + data + "}]}";
}

struct Rep {
    pirep_rep* p = nullptr;
    ~Rep() { pirep_rep_free(p); }
};

const double r2 = 1.0 / std::sqrt(2.0);

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

TEST(CApi, OptionsAndStatusNames)
{
    pirep_options o;
    pirep_options_init(&o);
    EXPECT_EQ(o.rank_rel, 1e-10);
    EXPECT_EQ(o.eq_rel, 1e-8);
    EXPECT_EQ(o.incl_abs, 1e-8);
    EXPECT_EQ(o.jobs, 1);
    EXPECT_GT(o.tensor_cap, 0);
    EXPECT_STREQ(pirep_status_string(PIREP_OK), "ok");
    EXPECT_STREQ(pirep_status_string(PIREP_E_PARSE), "parse");
    EXPECT_STREQ(pirep_status_string(PIREP_E_PRECONDITION), "precondition");
    EXPECT_STREQ(pirep_status_string(PIREP_E_DIMENSION), "dimension");
    EXPECT_STREQ(pirep_status_string(PIREP_E_INTERNAL), "internal");
    EXPECT_NE(std::string(pirep_version()), "");
}

TEST(CApi, ErrorsBecomeStatusCodes)
{
    pirep_rep* rep = nullptr;
    EXPECT_EQ(pirep_rep_from_json(nullptr, nullptr, &rep), PIREP_E_NULL_ARGUMENT);
    EXPECT_EQ(pirep_rep_from_json("{", nullptr, &rep), PIREP_E_PARSE);
    EXPECT_NE(std::string(pirep_last_error()), "");
    EXPECT_EQ(rep, nullptr);

    const std::string bad_shape = scalar_rep_json(2, "[1,0,0]");
    EXPECT_EQ(pirep_rep_from_json(bad_shape.c_str(), nullptr, &rep), PIREP_E_PARSE);

    pirep_options o;
    pirep_options_init(&o);
    o.eq_rel = -1.0;
    EXPECT_EQ(pirep_rep_from_json(scalar_rep_json(1, "[1]").c_str(), &o, &rep), PIREP_E_USAGE);

    EXPECT_EQ(pirep_rep_fixture("banana", 3, 1, nullptr, &rep), PIREP_E_USAGE);
    EXPECT_EQ(pirep_classify_json(nullptr, nullptr), PIREP_E_NULL_ARGUMENT);

    // A success clears the message.
    Rep ok;
    ASSERT_EQ(pirep_rep_from_json(scalar_rep_json(1, "[1]").c_str(), nullptr, &ok.p), PIREP_OK);
    EXPECT_STREQ(pirep_last_error(), "");
}

TEST(CApi, LastErrorIsPerThread)
{
    pirep_rep* rep = nullptr;
    ASSERT_EQ(pirep_rep_from_json("[", nullptr, &rep), PIREP_E_PARSE);
    const std::string mine = pirep_last_error();
    std::string theirs = "unset";
    std::thread t([&] { theirs = pirep_last_error(); });
    t.join();
    EXPECT_EQ(theirs, "");
    EXPECT_EQ(pirep_last_error(), mine);
}

TEST(CApi, RepRoundTripAndClassify)
{
    Rep rep;
    ASSERT_EQ(pirep_rep_fixture("unitary", 3, 5, nullptr, &rep.p), PIREP_OK);
    int64_t dim = 0;
    ASSERT_EQ(pirep_rep_hilbert_dim(rep.p, &dim), PIREP_OK);
    EXPECT_EQ(dim, 3);

    char* text = nullptr;
    ASSERT_EQ(pirep_rep_to_json(rep.p, &text), PIREP_OK);
    const std::string first = text;
    Rep back;
    ASSERT_EQ(pirep_rep_from_json(text, nullptr, &back.p), PIREP_OK);
    pirep_string_free(text);
    ASSERT_EQ(pirep_rep_to_json(back.p, &text), PIREP_OK);
    EXPECT_EQ(std::string(text), first);
    pirep_string_free(text);

    char* report = nullptr;
    ASSERT_EQ(pirep_classify_json(back.p, &report), PIREP_OK);
    const json j = take(report);
    EXPECT_TRUE(j.at("is_isometric").get<bool>());
    EXPECT_TRUE(j.at("is_coisometric").get<bool>());
    EXPECT_EQ(j.at("conditions").size(), 6u);
}

TEST(CApi, HandProductCounterexample)
{
    // V¹ = diag(1, 0) and V² e_0 = (e_0 + e_1)/√2.
    Rep a, b;
    ASSERT_EQ(pirep_rep_from_json(scalar_rep_json(2, "[1,0,0,0]").c_str(), nullptr, &a.p), PIREP_OK);
    const std::string v2 = "[" + num(r2) + ",0," + num(r2) + ",0]";
    ASSERT_EQ(pirep_rep_from_json(scalar_rep_json(2, v2).c_str(), nullptr, &b.p), PIREP_OK);
    const pirep_rep* reps[] = {a.p, b.p};

    char* out = nullptr;
    ASSERT_EQ(pirep_product_json(reps, 2, 1, &out), PIREP_OK);
    const json j = take(out);
    EXPECT_EQ(j.at("factors").get<int>(), 2);
    EXPECT_FALSE(j.at("stages").at(1).at("is_partial_isometric").get<bool>());
    const json& cp = j.at("pair").at("commuting_projections");
    EXPECT_FALSE(cp.at("product_is_pi").get<bool>());
    EXPECT_FALSE(cp.at("projections_commute").get<bool>());
    EXPECT_NEAR(cp.at("commutator_norm").get<double>(), 0.5, 1e-6);
    EXPECT_FALSE(j.at("pinv_chain").at("is_pi").get<bool>());
    EXPECT_TRUE(j.at("chain").at("verdicts_agree").get<bool>());

    EXPECT_EQ(pirep_product_json(reps, 1, 0, &out), PIREP_E_USAGE);
}

TEST(CApi, ProductOfMismatchedFactorsIsCompositionError)
{
    Rep a, b;
    ASSERT_EQ(pirep_rep_from_json(scalar_rep_json(1, "[1]").c_str(), nullptr, &a.p), PIREP_OK);
    ASSERT_EQ(pirep_rep_from_json(scalar_rep_json(2, "[1,0,0,1]").c_str(), nullptr, &b.p), PIREP_OK);
    const pirep_rep* reps[] = {a.p, b.p};
    char* out = nullptr;
    EXPECT_EQ(pirep_product_json(reps, 2, 0, &out), PIREP_E_COMPOSITION);
}

TEST(CApi, NonPartialIsometricFactorsMarkSectionsNotApplicable)
{
    Rep a;
    ASSERT_EQ(pirep_rep_from_json(scalar_rep_json(1, "[0.5]").c_str(), nullptr, &a.p), PIREP_OK);
    const pirep_rep* reps[] = {a.p, a.p};
    char* out = nullptr;
    ASSERT_EQ(pirep_product_json(reps, 2, 1, &out), PIREP_OK);
    const json j = take(out);
    EXPECT_TRUE(j.at("pair").at("commuting_projections").contains("not_applicable"));
    EXPECT_TRUE(j.at("chain").contains("not_applicable"));
    // The dilation only needs contractions.
    EXPECT_FALSE(j.at("pair").at("defect_dilation").at("m_is_pi").get<bool>());
}

TEST(CApi, RootRejectsHalfShift)
{
    // V = [[0, 1/√2], [0, 0]]: V² = 0 is PI but V is not, and condition a fails.
    Rep rep;
    const std::string data = "[0," + num(r2) + ",0,0]";
    ASSERT_EQ(pirep_rep_from_json(scalar_rep_json(2, data).c_str(), nullptr, &rep.p), PIREP_OK);
    char* out = nullptr;
    ASSERT_EQ(pirep_root_json(rep.p, 2, &out), PIREP_OK);
    const json j = take(out);
    EXPECT_EQ(j.at("root").at("applicable").get<std::string>(), "holds");
    EXPECT_FALSE(j.at("root").at("cond_a").get<bool>());
    EXPECT_FALSE(j.at("root").at("rep_is_pi").get<bool>());
    EXPECT_TRUE(j.at("root").at("equivalence_holds").get<bool>());
    EXPECT_EQ(pirep_root_json(rep.p, 1, &out), PIREP_E_USAGE);
}

TEST(CApi, PowersAndWold)
{
    Rep rep;
    ASSERT_EQ(pirep_rep_fixture("direct_sum(unitary, unitary)", 2, 3, nullptr, &rep.p), PIREP_OK);
    char* out = nullptr;
    ASSERT_EQ(pirep_powers_json(rep.p, 3, &out), PIREP_OK);
    const json p = take(out);
    EXPECT_EQ(p.at("powers").at("pi_flags"), json::array({true, true, true}));
    EXPECT_TRUE(p.at("regularity").at("regular").get<bool>());

    ASSERT_EQ(pirep_wold_json(rep.p, &out), PIREP_OK);
    const json w = take(out);
    EXPECT_EQ(w.at("applicable").get<std::string>(), "holds");
    EXPECT_LE(w.at("primal").at("direct_sum_residual").get<double>(), 1e-8);
}

TEST(CApi, Shift)
{
    char* out = nullptr;
    const char* spec = R"({"n":2,"M":64,"B":[0,3],"weights":[{"i":1,"m":2,"w":0.5}]})";
    ASSERT_EQ(pirep_shift_json(spec, 3, 0, nullptr, &out), PIREP_OK);
    const json j = take(out);
    EXPECT_FALSE(j.contains("rep"));
    ASSERT_EQ(j.at("kernels").size(), 2u);
    for (const json& k : j.at("kernels"))
        EXPECT_TRUE(k.at("agree").get<bool>());
    EXPECT_FALSE(j.at("criterion").at("is_pi").get<bool>());
    EXPECT_TRUE(j.at("criterion").at("equivalence_holds").get<bool>());

    ASSERT_EQ(pirep_shift_json(R"({"n":1,"M":4})", 1, 1, nullptr, &out), PIREP_OK);
    const json small = take(out);
    EXPECT_EQ(small.at("rep").at("v_on_basis").at(0).at("rows").get<int>(), 5);
    EXPECT_EQ(pirep_shift_json(R"({"n":0})", 1, 0, nullptr, &out), PIREP_E_DOMAIN);
}

TEST(CApi, VerifyAndFalsify)
{
    char* out = nullptr;
    int passed = -1;
    ASSERT_EQ(pirep_verify_json("product-pi", 42, 100, 1, nullptr, &out, &passed), PIREP_OK);
    const json j = take(out);
    EXPECT_EQ(passed, 1);
    EXPECT_GE(j.at("equivalence_violations").get<int>(), 1);

    ASSERT_EQ(pirep_verify_json("commuting-projections", 1, 10, 0, nullptr, &out, &passed), PIREP_OK);
    pirep_string_free(out);
    EXPECT_EQ(passed, 1);

    EXPECT_EQ(pirep_verify_json("no-such", 1, 10, 0, nullptr, &out, &passed), PIREP_E_USAGE);
    EXPECT_EQ(pirep_verify_json("root", 1, 0, 0, nullptr, &out, &passed), PIREP_E_USAGE);

    ASSERT_EQ(pirep_theorems(&out), PIREP_OK);
    const std::string list = out;
    pirep_string_free(out);
    EXPECT_NE(list.find("commuting-projections\t"), std::string::npos);
    EXPECT_NE(list.find("product-pi\t"), std::string::npos);
}
