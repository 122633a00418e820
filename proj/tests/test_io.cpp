#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlr/io.hpp"

using namespace dlr;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) {
    path = (std::filesystem::temp_directory_path() / name).string();
  }
  ~TempFile() { std::remove(path.c_str()); }
  void write(const std::string& content) {
    std::ofstream out(path);
    out << content;
  }
};

}  // namespace

TEST_CASE("load_csv reads named columns in order") {
  TempFile f("dlr_io_basic.csv");
  f.write("t,y,x1,x2\n1,10.5,0.1,7\n2,11.5,0.2,8\n3,12.5,0.3,9\n");
  Dataset ds = load_csv(f.path, "y", {"x2", "x1"});
  REQUIRE(ds.T() == 3);
  REQUIRE(ds.m() == 2);
  CHECK(ds.y_name == "y");
  CHECK(ds.x_names[0] == "x2");
  CHECK(ds.x_names[1] == "x1");
  CHECK(ds.y[0] == 10.5);
  CHECK(ds.y[2] == 12.5);
  CHECK(ds.X[0][1] == 8.0);
  CHECK(ds.X[1][1] == 0.2);
}

TEST_CASE("per-regressor lags shift and align all columns") {
  TempFile f("dlr_io_lag.csv");
  f.write("y,a,b\n10,1,100\n20,2,200\n30,3,300\n40,4,400\n");
  Dataset ds = load_csv(f.path, "y", {"a", "b"}, {0, 1});
  // max lag 1 drops one leading row; column b is used at lag 1.
  REQUIRE(ds.T() == 3);
  CHECK(ds.y == std::vector<double>{20, 30, 40});
  CHECK(ds.X[0] == std::vector<double>{2, 3, 4});      // a at lag 0
  CHECK(ds.X[1] == std::vector<double>{100, 200, 300});  // b at lag 1
  CHECK(ds.time_index == std::vector<long long>{2, 3, 4});
  CHECK(ds.transform_log.find("lag") != std::string::npos);
}

TEST_CASE("load_csv reports offending data rows for bad cells") {
  TempFile f("dlr_io_bad.csv");
  std::string body = "y,x\n";
  for (int i = 1; i <= 20; ++i) {
    if (i == 17)
      body += "5.0,\n";  // blank cell in data row 17
    else
      body += "5.0,1.0\n";
  }
  f.write(body);
  try {
    (void)load_csv(f.path, "y", {"x"});
    FAIL("expected an exception");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("17") != std::string::npos);
  }
}

TEST_CASE("load_csv rejects non-numeric cells, NaN values and ragged rows") {
  TempFile f1("dlr_io_nonnum.csv");
  f1.write("y,x\n1.0,2.0\nhello,3.0\n");
  CHECK_THROWS_AS((void)load_csv(f1.path, "y", {"x"}), std::runtime_error);

  TempFile f2("dlr_io_nan.csv");
  f2.write("y,x\n1.0,2.0\nnan,3.0\n");
  CHECK_THROWS_AS((void)load_csv(f2.path, "y", {"x"}), std::runtime_error);

  TempFile f3("dlr_io_ragged.csv");
  f3.write("y,x\n1.0,2.0\n3.0\n");
  CHECK_THROWS_AS((void)load_csv(f3.path, "y", {"x"}), std::runtime_error);
}

TEST_CASE("load_csv validates the requested columns and lags") {
  TempFile f("dlr_io_cols.csv");
  f.write("y,x\n1.0,2.0\n3.0,4.0\n");
  CHECK_THROWS((void)load_csv(f.path, "z", {"x"}));
  CHECK_THROWS((void)load_csv(f.path, "y", {"w"}));
  CHECK_THROWS((void)load_csv(f.path, "y", {"x"}, {0, 1}));  // lag count mismatch
  CHECK_THROWS((void)load_csv(f.path, "y", {"x"}, {-1}));    // negative lag
  CHECK_THROWS((void)load_csv("/nonexistent/definitely_missing.csv", "y", {"x"}));
}

TEST_CASE("format_double survives a text round trip for awkward values") {
  for (double v : {0.1, 1.0 / 3.0, 2.5e-308, 1.7e308, -0.0, 3.141592653589793, 123456789.123456}) {
    std::string s = format_double(v);
    double back = std::stod(s);
    CHECK(back == v);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("write_csv then load_csv is lossless") {
  TempFile f("dlr_io_roundtrip.csv");
  std::mt19937_64 rng(12);
  std::normal_distribution<double> norm(0.0, 1.0);
  std::vector<double> y(50), x(50);
  for (int i = 0; i < 50; ++i) {
    y[i] = std::exp(7.0 * norm(rng));
    x[i] = norm(rng) * 1e-7;
  }
  write_csv(f.path, {"y", "x"}, {y, x});
  Dataset ds = load_csv(f.path, "y", {"x"});
  REQUIRE(ds.T() == 50);
  for (int i = 0; i < 50; ++i) {
    CHECK(ds.y[i] == y[i]);
    CHECK(ds.X[0][i] == x[i]);
  }

  // A second write of the loaded data is byte-identical.
  TempFile g("dlr_io_roundtrip2.csv");
  write_csv(g.path, {"y", "x"}, {ds.y, ds.X[0]});
  std::ifstream a(f.path), b(g.path);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
}

TEST_CASE("write_csv rejects mismatched column lengths") {
  TempFile f("dlr_io_mismatch.csv");
  CHECK_THROWS((void)write_csv(f.path, {"a", "b"}, {{1.0, 2.0}, {3.0}}));
}
