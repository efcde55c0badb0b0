#include <gtest/gtest.h>

#include <filesystem>

#include "lfpp/io.hpp"
#include "oracles.hpp"

using namespace lfpp;

namespace {

std::string tmp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("lfpp_test_" + name)).string();
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Json, Shapes) {
  EXPECT_EQ(json(GridBox(1, 2, 3, 4)).dump(), R"({"x0":1,"y0":2,"w":3,"h":4})");
  EXPECT_EQ(box_from_json(json(GridBox(-1, 2, 3, 4))), GridBox(-1, 2, 3, 4));
  const LatticePath p({{0, 0}, {1, 0}, {1, 1}});
  EXPECT_EQ(json(p).dump(), "[[0,0],[1,0],[1,1]]");
  EXPECT_EQ(path_from_json(json(p)), p);
}

TEST(Json, RealsRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) EXPECT_EQ(std::stod(format_real(v)), v);
}

TEST(Csv, HeaderAndBody) {
  Table t;
  t.columns = {"a", "b", "c"};
  t.add(1, 0.5, std::string("x"));
  const std::string text = render_csv(t, json{{"seed", 3}});
  EXPECT_EQ(text.rfind("# format: lfpp/1\n", 0), 0u);
  EXPECT_NE(text.find("# provenance: {\"seed\":3}"), std::string::npos);
  EXPECT_EQ(csv_body(text), "a,b,c\n1,0.5,x\n");
}

TEST(Files, FieldRoundTrip) {
  const GaussianField f = sample_dgff(GridBox(0, 0, 5, 3), 17);
  const std::string path = tmp("field.csv");
  write_field(path, f, json{{"note", "t"}});
  const GaussianField g = read_field(path);
  EXPECT_EQ(g.base_box(), f.base_box());
  EXPECT_EQ(g.seed(), 17u);
  for (std::size_t i = 0; i < f.values().size(); ++i) EXPECT_EQ(g.values()[i], f.values()[i]);
  EXPECT_NE(read_text(path).find("cov=G"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Files, MetricRoundTrip) {
  const auto d = sample_normalized_metric(8, 0.3, 4, 3.5, 5);
  const std::string path = tmp("metric.csv");
  write_metric(path, d);
  const auto e = read_metric(path);
  EXPECT_EQ(e.m(), 4);
  EXPECT_EQ(e.kappa(), 3.5);
  EXPECT_EQ(e.matrix(), d.matrix());
  std::filesystem::remove(path);
}

TEST(Files, Errors) {
  EXPECT_KIND(read_field(tmp("does_not_exist.csv")), Io);
  const std::string path = tmp("bad.csv");
  write_text(path, "# {\"format\":\"lfpp/1\",\"kind\":\"metric\"}\n");
  EXPECT_THROW(read_field(path), Error);
  std::filesystem::remove(path);
}

TEST(Svg, Structure) {
  const GridBox b = GridBox::square(5);
  const WeightField wf = WeightField::unit(b);
  const auto g = crossing_weight(b, CrossingSpec::lr(), wf);
  const std::string svg = render_svg(oracle::random_y(b, 1), g.path, 4);
  EXPECT_EQ(count(svg, "<rect"), 25u);
  EXPECT_EQ(count(svg, "<polyline"), 1u);
  EXPECT_NE(svg.find("width=\"20\""), std::string::npos);
  EXPECT_EQ(count(render_svg(oracle::random_y(b, 1)), "<polyline"), 0u);
}
