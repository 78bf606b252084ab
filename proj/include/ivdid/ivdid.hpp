// Copyright 2026 The ivdid Authors
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

#ifndef IVDID_IVDID_HPP
#define IVDID_IVDID_HPP

#include "error.hpp"
#include "estimators.hpp"
#include "inference.hpp"
#include "interval.hpp"
#include "kv_config.hpp"
#include "loader.hpp"
#include "normal.hpp"
#include "panel.hpp"
#include "recoding.hpp"
#include "report.hpp"
#include "selftest.hpp"
#include "simulation.hpp"

#endif // IVDID_IVDID_HPP
