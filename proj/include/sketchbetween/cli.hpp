/* Copyright 2026 The sketchbetween Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SKETCHBETWEEN_CLI_HPP_
#define SKETCHBETWEEN_CLI_HPP_

#include <ostream>

namespace sketchbetween {

// Entry point behind the `sketchbetween` binary. Subcommands: sketch,
// prepare, train, eval, infer. Returns 0 on success, 1 on runtime errors and
// 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace sketchbetween

#endif  // SKETCHBETWEEN_CLI_HPP_
