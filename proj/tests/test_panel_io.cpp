#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "largevar/errors.hpp"
#include "largevar/panel_io.hpp"

using namespace largevar;

namespace {

std::string parse_error_of(const std::string& text) {
  std::istringstream in(text);
  try {
    read_panel_csv(in);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(PanelCsv, ReadsHeaderAndInitialCondition) {
  std::istringstream in("a,b\n0,1\n2,3\n4,5\n6,7\n");
  const NamedPanel p = read_panel_csv(in);
  EXPECT_EQ(p.names, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(p.panel.x0, Eigen::Vector2d(0, 1));
  ASSERT_EQ(p.panel.t(), 3);
  EXPECT_EQ(p.panel.data(0, 0), 2);
  EXPECT_EQ(p.panel.data(1, 2), 7);
}

TEST(PanelCsv, BomCrlfAndBlankLines) {
  std::istringstream in("\xEF\xBB\xBFx,y\r\n1,2\r\n\r\n3,4\r\n5,6\r\n7,8");
  const NamedPanel p = read_panel_csv(in);
  EXPECT_EQ(p.names[0], "x");
  EXPECT_EQ(p.panel.t(), 3);
  EXPECT_EQ(p.panel.data(1, 2), 8);
}

TEST(PanelCsv, RoundTrip) {
  Panel panel;
  panel.x0 = Eigen::Vector3d(0.1, -2.5, 1e-17);
  panel.data = Eigen::MatrixXd::Random(3, 6);
  std::stringstream buf;
  write_panel_csv(buf, panel);
  const NamedPanel back = read_panel_csv(buf);
  EXPECT_EQ(back.names, (std::vector<std::string>{"x1", "x2", "x3"}));
  EXPECT_EQ(back.panel.x0, panel.x0);
  EXPECT_EQ(back.panel.data, panel.data);

  const auto path = std::filesystem::temp_directory_path() / "largevar_panel_roundtrip.csv";
  write_panel_csv(path, panel, {"u", "v", "w"});
  const NamedPanel from_file = read_panel_csv(path);
  EXPECT_EQ(from_file.names[2], "w");
  EXPECT_EQ(from_file.panel.data, panel.data);
  std::filesystem::remove(path);
}

TEST(PanelCsv, ErrorsNameRowAndColumn) {
  std::string msg = parse_error_of("a,b\n1,2\n3,oops\n5,6\n");
  EXPECT_NE(msg.find("row 3, column 2"), std::string::npos) << msg;
  msg = parse_error_of("a,b\n1,2\n3\n5,6\n");
  EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
  msg = parse_error_of("a,b\n1,2\n3,4,5\n5,6\n");
  EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
  msg = parse_error_of("a,b\n1,2\n3,nan\n5,6\n");
  EXPECT_NE(msg.find("column 2"), std::string::npos) << msg;
}

TEST(PanelCsv, TooFewRowsAndEmpty) {
  EXPECT_FALSE(parse_error_of("a\n1\n2\n").empty());
  EXPECT_FALSE(parse_error_of("").empty());
  EXPECT_THROW(read_panel_csv(std::filesystem::path("/nonexistent/panel.csv")), Error);
}

TEST(ValuesFile, CommentsAndSeparators) {
  const auto path = std::filesystem::temp_directory_path() / "largevar_values.txt";
  {
    std::ofstream out(path);
    out << "# spectrum\n0.5, 0.25\n0.125 # trailing\n\n1e-3\n";
  }
  EXPECT_EQ(read_values_file(path), (std::vector<double>{0.5, 0.25, 0.125, 1e-3}));
  {
    std::ofstream out(path);
    out << "0.5 abc\n";
  }
  EXPECT_THROW(read_values_file(path), ParseError);
  std::filesystem::remove(path);
}
