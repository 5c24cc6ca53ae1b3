// Copyright (c) 2026 The heat Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HEAT_APP_MANIFEST_H_
#define HEAT_APP_MANIFEST_H_

#include <filesystem>
#include <string>

#include "heat/app/config.h"

namespace heat::app {

// SHA-1 of "blob <size>\0<contents>", i.e. what `git hash-object` prints.
std::string git_blob_sha1(const std::filesystem::path& path);
std::string git_blob_sha1_of(const std::string& contents);

// JSON manifest with the resolved config, the seed and input hashes; enough
// to replay the run in single-thread mode.
std::string make_manifest(const std::string& command, const KeyValues& resolved, const RunConfig& rc);

}  // namespace heat::app

#endif  // HEAT_APP_MANIFEST_H_
