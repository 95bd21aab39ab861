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

// CSV ingestion and emission, float formatting, and atomic file writes.
//
// Input schema: a header naming the columns `id` and `p`; every other column
// is a covariate, in header order. Fields are comma separated and unquoted.
// Leading lines starting with '#' are ignored.

#ifndef DPADAPT_IO_H_
#define DPADAPT_IO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dpadapt/data.h"

namespace dpadapt {

// Shortest decimal that parses back to the same double.
std::string FormatShortest(double value);

// printf("%.17g"), the fixed canonical form used for data files.
std::string FormatCanonical(double value);

// Writes to a sibling temporary file and renames it over `path`, so readers
// see either the old file or the complete new one. Creates parent
// directories. Throws DataError on I/O failure.
void AtomicWriteFile(const std::filesystem::path& path,
                     std::string_view contents);

struct PValueTable {
  std::vector<std::string> ids;
  std::vector<std::string> covariate_names;
  Dataset data;

  std::size_t size() const { return ids.size(); }
};

// Throws DataError naming the missing columns, the offending rows, or the
// empty input.
PValueTable ParseCsv(std::string_view text);
PValueTable IngestCsv(const std::filesystem::path& path);

// id, p, covariates in the ingested order with %.17g numbers. For a
// canonical file this reproduces the input bytes.
std::string EmitCsv(const PValueTable& table);

}  // namespace dpadapt

#endif  // DPADAPT_IO_H_
