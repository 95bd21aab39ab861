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

#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "dpadapt/errors.h"

namespace dpadapt {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(Trim(line.substr(start)));
      return fields;
    }
    fields.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool ParseDouble(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string JoinNames(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += ", ";
    out += names[i];
  }
  return out;
}

}  // namespace

std::string FormatShortest(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw InvariantViolation("float formatting failed");
  return std::string(buf, ptr);
}

std::string FormatCanonical(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void AtomicWriteFile(const std::filesystem::path& path,
                     std::string_view contents) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) {
    throw DataError("cannot create directory " + path.parent_path().string() +
                    ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw DataError("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DataError("cannot rename into " + path.string());
  }
}

PValueTable ParseCsv(std::string_view text) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      lines.push_back(text.substr(start, end - start));
      start = end + 1;
    }
  }
  while (!lines.empty() && Trim(lines.back()).empty()) lines.pop_back();
  // Leading '#' lines carry provenance, as in the files this tool writes.
  std::size_t first = 0;
  while (first < lines.size() && !Trim(lines[first]).empty() &&
         Trim(lines[first]).front() == '#') {
    ++first;
  }
  lines.erase(lines.begin(), lines.begin() + first);
  if (lines.empty()) throw DataError("empty input: no header row");

  const auto header = SplitFields(lines[0]);
  std::size_t id_col = header.size();
  std::size_t p_col = header.size();
  std::vector<std::size_t> covariate_cols;
  PValueTable table;
  std::set<std::string_view> seen_names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].empty()) {
      throw DataError("empty column name at position " + std::to_string(c + 1));
    }
    if (!seen_names.insert(header[c]).second) {
      throw DataError("duplicate column " + std::string(header[c]));
    }
    if (header[c] == "id") {
      id_col = c;
    } else if (header[c] == "p") {
      p_col = c;
    } else {
      covariate_cols.push_back(c);
      table.covariate_names.emplace_back(header[c]);
    }
  }
  std::vector<std::string> missing;
  if (id_col == header.size()) missing.emplace_back("id");
  if (p_col == header.size()) missing.emplace_back("p");
  if (!missing.empty()) {
    throw DataError("missing required column(s): " + JoinNames(missing));
  }
  if (lines.size() == 1) throw DataError("no data rows after the header");

  const std::size_t dim = covariate_cols.size();
  std::vector<double> covariates;
  std::vector<std::string> bad_p;
  std::set<std::string> ids;
  for (std::size_t line = 1; line < lines.size(); ++line) {
    const std::size_t row = line;  // 1-based data row
    const std::string where =
        "row " + std::to_string(row) + " (line " +
        std::to_string(line + 1 + first) + ")";
    const auto fields = SplitFields(lines[line]);
    if (fields.size() != header.size()) {
      throw DataError(where + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    std::string id(fields[id_col]);
    if (id.empty()) throw DataError(where + ": empty id");
    if (!ids.insert(id).second) throw DataError(where + ": duplicate id " + id);
    double p = 0.0;
    if (!ParseDouble(fields[p_col], p) || !(p >= 0.0 && p <= 1.0)) {
      bad_p.push_back(where + " id=" + id + " p=" + std::string(fields[p_col]));
    }
    for (std::size_t c : covariate_cols) {
      double v = 0.0;
      if (!ParseDouble(fields[c], v) || !std::isfinite(v)) {
        throw DataError(where + ": covariate " + std::string(header[c]) +
                        " is not a finite number");
      }
      covariates.push_back(v);
    }
    table.ids.push_back(std::move(id));
    table.data.p.push_back(p);
  }
  if (!bad_p.empty()) {
    throw DataError("p outside [0, 1] or not a number at " + JoinNames(bad_p));
  }
  table.data.x = dim == 0 ? CovariateMatrix(table.ids.size(), 0)
                          : CovariateMatrix(dim, std::move(covariates));
  return table;
}

PValueTable IngestCsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseCsv(buffer.str());
}

std::string EmitCsv(const PValueTable& table) {
  std::string out = "id,p";
  for (const auto& name : table.covariate_names) out += "," + name;
  out += "\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    out += table.ids[i];
    out += ",";
    out += FormatCanonical(table.data.p[i]);
    if (table.data.x.dim() > 0) {
      for (double v : table.data.x.row(i)) {
        out += ",";
        out += FormatCanonical(v);
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace dpadapt
