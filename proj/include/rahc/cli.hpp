/* Copyright 2026 The RAHC Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rahc {

/// Runs the command line `args` (program name first). Returns 0 on success,
/// 1 after printing `error: {"kind": ..., "message": ...}` to `err`, and 2
/// with usage text for unknown subcommands or flags.
int cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rahc
