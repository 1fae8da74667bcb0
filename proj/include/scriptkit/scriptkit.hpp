// include/scriptkit/scriptkit.hpp

// Copyright 2026  Scriptkit Authors

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

#ifndef SCRIPTKIT_SCRIPTKIT_HPP_
#define SCRIPTKIT_SCRIPTKIT_HPP_

#include "scriptkit/backends.hpp"
#include "scriptkit/common.hpp"
#include "scriptkit/corpus.hpp"
#include "scriptkit/dataset.hpp"
#include "scriptkit/decoding.hpp"
#include "scriptkit/distribution.hpp"
#include "scriptkit/frames.hpp"
#include "scriptkit/generator.hpp"
#include "scriptkit/knowledge.hpp"
#include "scriptkit/metrics.hpp"
#include "scriptkit/png_io.hpp"
#include "scriptkit/predictor.hpp"
#include "scriptkit/video.hpp"

#endif  // SCRIPTKIT_SCRIPTKIT_HPP_
