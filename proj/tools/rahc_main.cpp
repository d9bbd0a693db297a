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

#include <torch/torch.h>

#include <iostream>

#include "rahc/cli.hpp"

int main(int argc, char** argv) {
  torch::set_num_threads(1);
  return rahc::cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
