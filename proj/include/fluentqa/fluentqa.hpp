// fluentqa.hpp
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
//
// \file
// Convenience header pulling in the whole library.

#ifndef FLUENTQA_FLUENTQA_HPP_
#define FLUENTQA_FLUENTQA_HPP_

#include "fluentqa/augment.hpp"
#include "fluentqa/datasets.hpp"
#include "fluentqa/error.hpp"
#include "fluentqa/evalkit.hpp"
#include "fluentqa/features.hpp"
#include "fluentqa/io.hpp"
#include "fluentqa/morphology.hpp"
#include "fluentqa/ngram.hpp"
#include "fluentqa/ranker.hpp"
#include "fluentqa/stgen.hpp"
#include "fluentqa/treebank.hpp"
#include "fluentqa/treeops.hpp"

namespace fluentqa {

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace fluentqa

#endif  // FLUENTQA_FLUENTQA_HPP_
