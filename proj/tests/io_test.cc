//
// Copyright 2026 The dpadapt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dpadapt/io.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dpadapt/errors.h"
#include "dpadapt/rng.h"

namespace dpadapt {
namespace {

namespace fs = std::filesystem;

std::string ErrorOf(std::string_view text) {
  try {
    ParseCsv(text);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dpadapt_io_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(ParseCsvTest, WellFormed) {
  const auto t = ParseCsv("id,p,x1,x2\na,0.1,1,2\nb,0.5,3,4\nc,1,5,6\n");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t.ids[2], "c");
  EXPECT_EQ(t.covariate_names, (std::vector<std::string>{"x1", "x2"}));
  EXPECT_EQ(t.data.p[1], 0.5);
  EXPECT_EQ(t.data.x.dim(), 2u);
  EXPECT_EQ(t.data.x.row(1)[1], 4.0);
  const auto plain = ParseCsv("id,p\nq,0.2\r\n");
  EXPECT_EQ(plain.data.x.dim(), 0u);
  EXPECT_EQ(plain.data.x.rows(), 1u);
}

TEST(ParseCsvTest, SkipsProvenanceLines) {
  const auto t = ParseCsv("# dpadapt {\"seed\":1}\nid,p\na,0.3\n");
  EXPECT_EQ(t.size(), 1u);
  EXPECT_NE(ErrorOf("# note\nid,p\na,2\n").find("line 3"), std::string::npos);
}

TEST(ParseCsvTest, Errors) {
  EXPECT_NE(ErrorOf("").find("empty input"), std::string::npos);
  EXPECT_NE(ErrorOf("id,x1\na,1\n").find("p"), std::string::npos);
  EXPECT_NE(ErrorOf("x1,x2\n1,2\n").find("id, p"), std::string::npos);
  EXPECT_NE(ErrorOf("id,p\n").find("no data rows"), std::string::npos);
  const std::string bad = ErrorOf("id,p\na,0.2\nb,1.5\nc,-1\n");
  EXPECT_NE(bad.find("row 2"), std::string::npos);
  EXPECT_NE(bad.find("id=b"), std::string::npos);
  EXPECT_NE(bad.find("id=c"), std::string::npos);
  EXPECT_NE(ErrorOf("id,p\na,abc\n").find("id=a"), std::string::npos);
  EXPECT_NE(ErrorOf("id,p\na,0.2,3\n").find("expected 2 fields"), std::string::npos);
  EXPECT_NE(ErrorOf("id,p\na,0.2\na,0.3\n").find("duplicate id"), std::string::npos);
  EXPECT_NE(ErrorOf("id,p,p\na,0.2,0.1\n").find("duplicate column"), std::string::npos);
  EXPECT_NE(ErrorOf("id,p,x1\na,0.2,inf\n").find("covariate x1"), std::string::npos);
  EXPECT_THROW(IngestCsv("/nonexistent/file.csv"), DataError);
}

TEST(EmitCsvTest, CanonicalRoundTripIsByteIdentical) {
  Rng rng(61);
  std::string text = "id,p,x1\n";
  char buf[64];
  for (int i = 0; i < 200; ++i) {
    std::snprintf(buf, sizeof(buf), "h%04d,%.17g,%.17g\n", i, rng.Uniform(),
                  rng.Normal());
    text += buf;
  }
  EXPECT_EQ(EmitCsv(ParseCsv(text)), text);
}

TEST(FormatTest, ShortestRoundTrips) {
  Rng rng(62);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(rng.Uniform(), static_cast<int>(rng.Uniform() * 40) - 20);
    EXPECT_EQ(std::stod(FormatShortest(v)), v);
    EXPECT_EQ(std::stod(FormatCanonical(v)), v);
  }
  EXPECT_EQ(FormatShortest(0.1), "0.1");
  EXPECT_EQ(FormatCanonical(0.5), "0.5");
}

TEST(AtomicWriteTest, WritesAndReplaces) {
  const fs::path dir = TempDir("atomic");
  const fs::path file = dir / "nested" / "out.txt";
  AtomicWriteFile(file, "first");
  AtomicWriteFile(file, "second");
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "second");
  for (const auto& entry : fs::directory_iterator(file.parent_path())) {
    EXPECT_EQ(entry.path().filename(), "out.txt");
  }
  fs::remove_all(dir);
}

TEST(AtomicWriteTest, FailureIsDataError) {
  const fs::path dir = TempDir("blocked");
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  EXPECT_THROW(AtomicWriteFile(dir / "file" / "child.txt", "y"), DataError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace dpadapt
