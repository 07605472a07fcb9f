#include "ergopt/io.hpp"

#include <gtest/gtest.h>

using namespace ergopt;

namespace {

std::string where_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.where();
  }
  return "<no error>";
}

}  // namespace

TEST(Json, FunctionRoundTrip) {
  const CylinderFunction f(Alphabet(3), 2, {Rational(1, 3), Rational(-2), Rational(0), Rational(5, 7), Rational(1),
                                            Rational(0), Rational(-1, 9), Rational(2), Rational(3)});
  for (const ASequence& a : {ASequence::dyadic(), ASequence::triangular_dyadic(),
                             ASequence::geometric(Rational(2), Rational(1, 3)),
                             ASequence::custom_table({Rational(1), Rational(1, 4)}, Rational(1, 3))}) {
    const Json j = to_json(FunctionFile{f, a});
    const FunctionFile back = function_file_from_json(io::parse_text(j.dump(), "mem"));
    EXPECT_TRUE(same_function(back.f, f));
    EXPECT_EQ(to_json(back.a), to_json(a));
    for (Index n = 0; n < 6; ++n) EXPECT_EQ(back.a(n), a(n));
  }
}

TEST(Json, PayloadUnwrapsManifest) {
  Json inner = to_json(FunctionFile{CylinderFunction::zero(Alphabet(2), 1), ASequence::dyadic()});
  Json doc;
  doc["manifest"] = {{"command", "norm"}};
  doc["result"] = inner;
  EXPECT_TRUE(function_file_from_json(doc).f.is_zero());
  EXPECT_EQ(&io::payload(inner), &inner);
}

TEST(Json, DefaultsToDyadic) {
  const Json j = io::parse_text(R"({"alphabet": 2, "depth": 1, "table": ["0", "1"]})", "mem");
  EXPECT_EQ(function_file_from_json(j).a.kind(), ASequence::Kind::Dyadic);
}

TEST(Json, RationalForms) {
  EXPECT_EQ(io::parse_rational_json(Json("3/6"), "x"), Rational(1, 2));
  EXPECT_EQ(io::parse_rational_json(Json(-4), "x"), Rational(-4));
  EXPECT_THROW(io::parse_rational_json(Json("1/0"), "x"), ValidationError);
  EXPECT_THROW(io::parse_rational_json(Json("abc"), "x"), ValidationError);
  EXPECT_THROW(io::parse_rational_json(Json(0.5), "x"), ValidationError);
}

TEST(Validation, NamesTheField) {
  EXPECT_EQ(where_of([] { io::parse_text("{\n  \"a\": }", "bad.json"); }).substr(0, 9), "bad.json:");
  EXPECT_EQ(where_of([] {
              function_from_json(io::parse_text(R"({"alphabet": 2, "depth": 1, "table": ["0", "x"]})", "m"));
            }),
            "function.table[1]");
  EXPECT_EQ(where_of([] { function_from_json(io::parse_text(R"({"alphabet": 2, "depth": 2, "table": ["0"]})", "m")); }),
            "function.table");
  EXPECT_EQ(where_of([] { function_from_json(io::parse_text(R"({"alphabet": 1, "depth": 1, "table": ["0"]})", "m")); }),
            "function.alphabet");
  // A missing key is reported against its parent object.
  EXPECT_EQ(where_of([] { function_from_json(io::parse_text(R"({"depth": 1, "table": []})", "m")); }), "function");
  try {
    function_from_json(io::parse_text(R"({"depth": 1, "table": []})", "m"));
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("alphabet"), std::string::npos);
  }
  EXPECT_EQ(where_of([] { a_sequence_from_json(io::parse_text(R"({"kind": "lacunary"})", "m")); }), "a_sequence.kind");
  EXPECT_EQ(where_of([] { a_sequence_from_json(io::parse_text(R"({"kind": "geometric", "ratio": "1"})", "m")); }),
            "a_sequence");
}

TEST(Json, PlanRoundTrip) {
  const CylinderFunction f(Alphabet(2), 2, {Rational(0), Rational(0), Rational(2), Rational(0)});
  PlanOptions po;
  po.k = 2;
  const PerturbationPlan p = build_perturbation(f, ASequence::triangular_dyadic(), Rational(1, 2), po);
  const Json j = to_json(p);
  ASSERT_TRUE(j["f_tilde"].contains("table"));
  const PerturbationPlan back = plan_from_json(io::parse_text(j.dump(), "plan"));
  EXPECT_EQ(back.k, p.k);
  EXPECT_EQ(back.K, p.K);
  EXPECT_TRUE(back.y == p.y);
  EXPECT_TRUE(same_function(back.f_tilde, p.f_tilde));

  Json tampered = j;
  tampered["orbit"] = Json::array({0});
  EXPECT_EQ(where_of([&] { plan_from_json(tampered); }), "plan.orbit");
  tampered = j;
  tampered["f_tilde"]["table"][0] = "7";
  EXPECT_EQ(where_of([&] { plan_from_json(tampered); }), "plan.f_tilde.table");
}

TEST(Json, ReportsUseExactStrings) {
  const CylinderFunction f(Alphabet(2), 2, {Rational(0), Rational(0), Rational(2), Rational(0)});
  const Json n = to_json(a_norm(f, ASequence::triangular_dyadic()));
  EXPECT_EQ(n["a_norm"], "6");
  const Json m = to_json(max_mean_cycle(f));
  EXPECT_EQ(m["beta"], "1");
}
