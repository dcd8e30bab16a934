// SPDX-License-Identifier: Apache-2.0
//
// quantid - optimal output quantizers for least-squares FIR identification
// Copyright (C) 2026 The quantid Authors
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

#include "quantid/bounds.hpp"
#include "quantid/coarse.hpp"
#include "quantid/density.hpp"
#include "quantid/error.hpp"
#include "quantid/highres.hpp"
#include "quantid/io.hpp"
#include "quantid/minimize.hpp"
#include "quantid/model.hpp"
#include "quantid/quadrature.hpp"
#include "quantid/quantizer.hpp"
#include "quantid/random.hpp"
#include "quantid/sysid.hpp"
