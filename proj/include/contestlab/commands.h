// Copyright 2026 The ContestLab Authors
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

#ifndef CONTESTLAB_COMMANDS_H_
#define CONTESTLAB_COMMANDS_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "contestlab/simulator.h"

namespace contestlab {

// The `contestlab` command line; `args` excludes the program name. Returns
// the process exit code: 0 on success, 1 when verification fails, and the
// error's exit code (2 for usage and parse errors) otherwise.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// css[:p[:selector]] | sunk:<lambda>[:p[:selector]] | noise
// selector: zero | highest | uniform | fixed=<bid>. Throws ParseError.
AgentSpec ParseAgentSpec(const std::string& text);

struct ExperimentSetup {
  ExperimentConfig config;
  std::vector<AgentMixEntry> agents;
  bool seed_given = false;
};

// Experiment JSON: the ExperimentConfig fields plus an optional "agents"
// array. Throws SchemaError on unknown keys or wrong types.
ExperimentSetup ParseExperimentConfig(const std::string& json_text);

}  // namespace contestlab

#endif  // CONTESTLAB_COMMANDS_H_
