// SPDX-License-Identifier: Apache-2.0
//
// beamalign: iterative beam alignment for reciprocal TDD MIMO links
// Copyright (C) 2026 The beamalign authors
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


#ifndef BEAMALIGN_HPP
#define BEAMALIGN_HPP

#include "errors.hpp"
#include "numerics.hpp"
#include "channel.hpp"
#include "pingpong.hpp"
#include "aligners.hpp"
#include "metrics.hpp"
#include "harness.hpp"
#include "cli.hpp"

#endif
