#include "pirep/generators.hpp"
#include "pirep/io.hpp"
#include "test_support.hpp"

#include <cstring>

using namespace pirep;
using pirep::testing::scalar_rep;
using pirep::testing::throws_kind;

namespace {

const Tolerance tol;

bool same_bits(const CMatrix& a, const CMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        return false;
    return std::memcmp(a.data(), b.data(), sizeof(cplx) * static_cast<size_t>(a.size())) == 0;
}

} // namespace

TEST(Dump, SeventeenSignificantDigits)
{
    EXPECT_EQ(dump(Json(0.1)), "0.10000000000000001");
    EXPECT_EQ(dump(Json(1.0)), "1");
    EXPECT_EQ(dump(Json(1.0 / 3.0)), "0.33333333333333331");
    EXPECT_EQ(dump(Json(-2.5e-300)), "-2.5e-300");
    EXPECT_EQ(dump(Json(std::nan(""))), "null");
    EXPECT_EQ(dump(Json{{"a", 1}, {"b", Json::array({true, "x"})}}), "{\"a\":1,\"b\":[true,\"x\"]}");
    EXPECT_EQ(dump(Json{{"a", Json::array({1})}}, 1), "{\n \"a\": [\n  1\n ]\n}");
}

TEST(Dump, MalformedTextIsParseError)
{
    EXPECT_TRUE(throws_kind(ErrorKind::parse, [] { parse_json("{\"rows\": "); }));
}

TEST(Matrix, RoundTripIsBitExact)
{
    Rng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix m = rng.gaussian(rng.integer(0, 4), rng.integer(0, 4));
        const CMatrix back = matrix_from_json(parse_json(dump(to_json(m))));
        EXPECT_TRUE(same_bits(m, back));
    }
}

TEST(Matrix, Layout)
{
    CMatrix m(1, 2);
    m << cplx(1.0, 2.0), cplx(3.0, -4.0);
    EXPECT_EQ(dump(to_json(m)), "{\"rows\":1,\"cols\":2,\"data\":[[1,2],[3,-4]]}");
    // Real entries may be given as plain numbers.
    const CMatrix r = matrix_from_json(parse_json("{\"rows\":1,\"cols\":2,\"data\":[0.5,[0,1]]}"));
    EXPECT_EQ(r(0, 0), cplx(0.5, 0.0));
    EXPECT_EQ(r(0, 1), cplx(0.0, 1.0));
}

TEST(Matrix, BadInputIsParseError)
{
    EXPECT_TRUE(throws_kind(ErrorKind::parse, [] { matrix_from_json(parse_json("{\"rows\":1,\"cols\":2,\"data\":[1]}")); }));
    EXPECT_TRUE(throws_kind(ErrorKind::parse, [] { matrix_from_json(parse_json("{\"rows\":1,\"data\":[1]}")); }));
    EXPECT_TRUE(throws_kind(ErrorKind::parse,
                            [] { matrix_from_json(parse_json("{\"rows\":1,\"cols\":1,\"data\":[[1,2,3]]}")); }));
    EXPECT_TRUE(throws_kind(ErrorKind::parse, [] { matrix_from_json(parse_json("{\"rows\":\"x\",\"cols\":1}")); }));
}

TEST(Correspondence, ScalarIsCompact)
{
    EXPECT_EQ(dump(to_json(scalar_correspondence(3))), "{\"scalar\":3}");
    const FdCorrespondence back = correspondence_from_json(parse_json("{\"scalar\":3}"));
    EXPECT_EQ(back.module_dim(), 3);
    EXPECT_TRUE(back.algebra().is_scalar());
}

TEST(Correspondence, GeneralRoundTrip)
{
    const FdCStarAlgebra alg({1, 2});
    const MultiplicityMatrix mu{{1, 1}, {0, 1}};
    const FdCorrespondence e = bimodule_correspondence(alg, mu);
    const Json j = to_json(e);
    ASSERT_TRUE(j.contains("gram"));
    const FdCorrespondence back = correspondence_from_json(parse_json(dump(j)));
    EXPECT_EQ(dump(to_json(back)), dump(j));
    EXPECT_NO_THROW(back.validate(tol));

    const FdCorrespondence short_form =
        correspondence_from_json(parse_json("{\"bimodule\":{\"block_sizes\":[1,2],\"mu\":[[1,1],[0,1]]}}"));
    EXPECT_EQ(dump(to_json(short_form)), dump(j));
}

TEST(Rep, RoundTrip)
{
    Rng rng(2);
    ShapeLimits limits;
    for (int trial = 0; trial < 20; ++trial) {
        const CovariantRep rep = random_contractive_rep(rng, random_block_shape(rng, limits), tol);
        const std::string text = dump(to_json(rep));
        const CovariantRep back = rep_from_json(parse_json(text), tol);
        EXPECT_EQ(dump(to_json(back)), text);
        EXPECT_TRUE(same_bits(back.tilde(), rep.tilde()));
    }
}

TEST(Rep, InvalidInput)
{
    // V must be covariant: over C ⊕ C the single module unit maps block 1 to block 0.
    const std::string bad = R"({"correspondence":{"bimodule":{"block_sizes":[1,1],"mu":[[0,1],[0,0]]}},
        "sigma":{"multiplicities":[1,1]},
        "v_on_basis":[{"rows":2,"cols":2,"data":[[0,0],[0,0],[1,0],[0,0]]}]})";
    EXPECT_TRUE(throws_kind(ErrorKind::invalid_representation, [&] { rep_from_json(parse_json(bad), tol); }));
    EXPECT_TRUE(throws_kind(ErrorKind::parse, [] { rep_from_json(parse_json("{\"sigma\":{}}"), tol); }));
    const std::string good = R"({"correspondence":{"scalar":1},"sigma":{"multiplicities":[2]},
        "v_on_basis":[{"rows":2,"cols":2,"data":[0,1,0,0]}]})";
    const CovariantRep rep = rep_from_json(parse_json(good), tol);
    EXPECT_EQ(rep.hilbert_dim(), 2);
}

TEST(ShiftSpec, RoundTrip)
{
    WeightedShiftSpec spec;
    spec.n = 2;
    spec.trunc = 20;
    spec.zero_set = {0, 3};
    spec.weights[{1, 2}] = 0.5;
    const std::string text = dump(to_json(spec));
    EXPECT_EQ(text, "{\"n\":2,\"M\":20,\"B\":[0,3],\"weights\":[{\"i\":1,\"m\":2,\"w\":0.5}]}");
    const WeightedShiftSpec back = shift_spec_from_json(parse_json(text));
    EXPECT_EQ(dump(to_json(back)), text);

    WeightedShiftSpec defaulted;
    EXPECT_FALSE(to_json(defaulted).contains("M"));
    EXPECT_TRUE(throws_kind(ErrorKind::domain, [] { shift_spec_from_json(parse_json("{\"n\":0}")); }));
    EXPECT_TRUE(throws_kind(ErrorKind::parse, [] { shift_weights_from_json(parse_json("{\"i\":1}")); }));
}

TEST(Reports, ClassificationCarriesEveryCondition)
{
    Rng rng(3);
    const Json j = to_json(classify(scalar_rep({rng.unitary(3)})));
    EXPECT_TRUE(j.at("is_partial_isometric").get<bool>());
    ASSERT_EQ(j.at("conditions").size(), 6u);
    for (const Json& c : j.at("conditions"))
        EXPECT_TRUE(c.at("holds").get<bool>());
}
