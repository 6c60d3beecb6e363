// include/stm/stm.hpp

// Copyright 2026 The stmaudio Authors

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

#include "stm/audio.hpp"
#include "stm/cache.hpp"
#include "stm/classify.hpp"
#include "stm/common.hpp"
#include "stm/envelope.hpp"
#include "stm/erb.hpp"
#include "stm/experiment.hpp"
#include "stm/extra_trees.hpp"
#include "stm/fft.hpp"
#include "stm/filterbank.hpp"
#include "stm/knn.hpp"
#include "stm/manifest.hpp"
#include "stm/model_io.hpp"
#include "stm/modulation.hpp"
#include "stm/pipeline.hpp"
#include "stm/resample.hpp"
#include "stm/svm.hpp"
#include "stm/synth.hpp"
