// Copyright 2026 The qaeval Authors.
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

#include "qaeval/answer_type.hpp"
#include "qaeval/commands.hpp"
#include "qaeval/errors.hpp"
#include "qaeval/external_grader.hpp"
#include "qaeval/metrics.hpp"
#include "qaeval/mog.hpp"
#include "qaeval/qa_data.hpp"
#include "qaeval/report.hpp"
#include "qaeval/score.hpp"
#include "qaeval/stats.hpp"
#include "qaeval/text_norm.hpp"
