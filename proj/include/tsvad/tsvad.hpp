// include/tsvad/tsvad.hpp

// Copyright 2026 The tsvad-kit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "tsvad/assignment.hpp"
#include "tsvad/common.hpp"
#include "tsvad/fusion.hpp"
#include "tsvad/harness.hpp"
#include "tsvad/metrics.hpp"
#include "tsvad/profile.hpp"
#include "tsvad/report.hpp"
#include "tsvad/rttm.hpp"
#include "tsvad/simulator.hpp"
#include "tsvad/timeline.hpp"
