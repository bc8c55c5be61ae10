// SPDX-License-Identifier: Apache-2.0
//
// hetmob: mobility-aware uplink interference toolkit
// Copyright (C) 2026 The hetmob Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "config.hpp"
#include "crossing.hpp"
#include "interference.hpp"
#include "mobility.hpp"
#include "montecarlo.hpp"
#include "occupancy.hpp"
#include "performance.hpp"
#include "quadrature.hpp"
#include "random.hpp"
#include "scenarios.hpp"
