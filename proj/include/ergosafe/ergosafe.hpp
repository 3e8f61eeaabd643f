/*
 * Copyright 2026 The ergosafe authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ERGOSAFE_ERGOSAFE_HPP
#define ERGOSAFE_ERGOSAFE_HPP

#include "ergosafe/barrier.hpp"
#include "ergosafe/basis.hpp"
#include "ergosafe/dynamics.hpp"
#include "ergosafe/ergodic.hpp"
#include "ergosafe/fleet.hpp"
#include "ergosafe/harness.hpp"
#include "ergosafe/problem.hpp"
#include "ergosafe/rng.hpp"
#include "ergosafe/solver.hpp"
#include "ergosafe/tracker.hpp"
#include "ergosafe/trajectory.hpp"
#include "ergosafe/types.hpp"
#include "ergosafe/workspace.hpp"

#endif  // ERGOSAFE_ERGOSAFE_HPP
