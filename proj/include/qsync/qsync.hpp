// Copyright 2026 The qsync Authors
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

#pragma once

#include "qsync/analysis.hpp"
#include "qsync/config.hpp"
#include "qsync/consensus.hpp"
#include "qsync/csv.hpp"
#include "qsync/errors.hpp"
#include "qsync/graph.hpp"
#include "qsync/hilbert.hpp"
#include "qsync/integrator.hpp"
#include "qsync/lindblad.hpp"
#include "qsync/orbits.hpp"
#include "qsync/runner.hpp"
