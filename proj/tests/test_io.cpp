#include <gtest/gtest.h>

#include "arveson/io.hpp"
#include "fixtures.hpp"

using namespace arveson;
using io::Json;

namespace {

template <class T, class Decode>
void expect_byte_stable(const T& value, Decode decode) {
  const std::string first = io::dump(io::to_json(value));
  const std::string second = io::dump(io::to_json(decode(io::parse(first, "mem"))));
  EXPECT_EQ(first, second);
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const io::InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Io, ColligationRoundTripIsByteIdentical) {
  Rng rng(1);
  expect_byte_stable(fixtures::quadratic_inner(), [](const Json& j) { return io::colligation_from_json(j); });
  expect_byte_stable(fixtures::twisted_u0(), [](const Json& j) { return io::colligation_from_json(j); });
  const Colligation col = fixtures::random_contractive(rng, 3, 2, 2, 1, 0.9);
  expect_byte_stable(col, [](const Json& j) { return io::colligation_from_json(j); });
  const Colligation back = io::colligation_from_json(io::parse(io::dump(io::to_json(col)), "mem"));
  EXPECT_EQ((back.matrix() - col.matrix()).norm(), 0.0);
}

TEST(Io, EmptyStateAndInputSurvive) {
  const Colligation col = Colligation::from_matrix(2, 0, Mat::Constant(1, 1, 0.5));
  const Colligation back = io::colligation_from_json(io::parse(io::dump(io::to_json(col)), "mem"));
  EXPECT_EQ(back.p(), 0);
  EXPECT_EQ(back.q(), 1);
  expect_byte_stable(col, [](const Json& j) { return io::colligation_from_json(j); });
}

TEST(Io, PairRowContractionSeriesSpecRoundTrips) {
  Rng rng(2);
  expect_byte_stable(fixtures::twisted_pair(0.1), [](const Json& j) { return io::pair_from_json(j); });
  expect_byte_stable(random_commuting_row_contraction(rng, 2, 3, 0.9),
                     [](const Json& j) { return io::row_contraction_from_json(j); });
  expect_byte_stable(fixtures::split_series(), [](const Json& j) { return io::series_from_json(j); });

  InterpolationSpec pts;
  pts.variant = InterpolationSpec::Variant::points;
  pts.d = 2;
  pts.conditions.push_back({fixtures::pt(0.5, Scalar(0, 0.1)), Mat::Constant(1, 2, Scalar(1, -1)), MultiIndex()});
  expect_byte_stable(pts, [](const Json& j) { return io::spec_from_json(j); });

  InterpolationSpec low;
  low.variant = InterpolationSpec::Variant::lower_inclusive;
  low.d = 2;
  low.omega = Point::Zero(2);
  low.conditions.push_back({Point(), Mat::Ones(1, 1), MultiIndex{0, 0}});
  low.conditions.push_back({Point(), Mat::Ones(1, 1), MultiIndex{1, 0}});
  expect_byte_stable(low, [](const Json& j) { return io::spec_from_json(j); });
}

TEST(Io, DocumentedSpecShapeParses) {
  const InterpolationSpec s = io::spec_from_json(
      io::parse(R"({"variant":"points","d":2,"conditions":[{"omega":[[0.5,0],[0,0]],"x":[[1,0]]}]})", "mem"));
  ASSERT_EQ(s.conditions.size(), 1u);
  EXPECT_EQ(s.conditions[0].omega(0), Scalar(0.5));
  EXPECT_EQ(s.conditions[0].x.cols(), 1);
}

TEST(Io, RealNumbersAcceptedAsScalars) {
  const Json j = io::parse(R"({"d":1,"dim_state":1,"dim_input":1,"dim_output":1,
      "A":[[[0.5]]],"B":[[[1]]],"C":[[1]],"D":[[0]]})", "mem");
  const Colligation col = io::colligation_from_json(j);
  EXPECT_EQ(col.A[0](0, 0), Scalar(0.5));
}

TEST(Io, ErrorsCarryPaths) {
  EXPECT_NE(error_of([] { io::parse("{\"d\": 2,", "input.json"); }).find("input.json"), std::string::npos);
  Json j = io::to_json(fixtures::quadratic_inner());
  j["B"][1][2] = Json::array({0.0});
  const std::string e1 = error_of([&] { io::colligation_from_json(j); });
  EXPECT_NE(e1.find("$.B[1][2]"), std::string::npos) << e1;
  j = io::to_json(fixtures::quadratic_inner());
  j["dim_state"] = 4;
  EXPECT_NE(error_of([&] { io::colligation_from_json(j); }).find("$.A[0]"), std::string::npos);
  j = io::to_json(fixtures::quadratic_inner());
  j.erase("D");
  EXPECT_NE(error_of([&] { io::colligation_from_json(j); }).find("D"), std::string::npos);
}

TEST(Io, SeriesValidation) {
  Json j = io::to_json(fixtures::split_series());
  j["coefficients"].push_back(j["coefficients"][0]);
  EXPECT_NE(error_of([&] { io::series_from_json(j); }).find("repeated"), std::string::npos);
  j = io::to_json(fixtures::split_series());
  j["coefficients"][0]["index"] = Json::array({-1, 3});
  EXPECT_FALSE(error_of([&] { io::series_from_json(j); }).empty());
  j = io::to_json(fixtures::split_series());
  j.erase("cap");
  EXPECT_EQ(io::series_from_json(j).cap(), 2);
}

TEST(Io, UnknownVariantRejected) {
  const Json j = io::parse(R"({"variant":"spiral","d":2,"conditions":[]})", "mem");
  EXPECT_NE(error_of([&] { io::spec_from_json(j); }).find("spiral"), std::string::npos);
}
