// Copyright 2026 The robust-recourse Authors.
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


// Writes the bundled synthetic fixtures as CSV files so they can be fed back
// through the CSV loader or inspected with other tools.
//
//   robrec_fixtures <out_dir>

#include <iostream>
#include <string>

#include "robrec/error.h"
#include "robrec/pipeline.h"
#include "robrec/serialization.h"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: robrec_fixtures <out_dir>\n";
    return 2;
  }
  const std::string dir = argv[1];
  try {
    robrec::WriteTextFile(dir + "/moons.csv",
                          robrec::FormatCsv(robrec::LoadSource(
                              robrec::kMoonsFixture, "label")));
    robrec::WriteTextFile(dir + "/blobs.csv",
                          robrec::FormatCsv(robrec::LoadSource(
                              robrec::kBlobsFixture, "label")));
  } catch (const robrec::Error& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
  return 0;
}
