// Copyright 2026 The dopplive Authors. All Rights Reserved.
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

// JSON object codecs shared by the serializers. Internal to the library.

#ifndef DOPPLIVE_SRC_JSON_CODEC_HPP_
#define DOPPLIVE_SRC_JSON_CODEC_HPP_

#include "json.hpp"

#include "dopplive/features.hpp"

namespace dopplive::detail {

using Json = nlohmann::ordered_json;

inline constexpr int kContourSetVersion = 1;

Json contour_set_to_object(const ContourSet& contours);
ContourSet contour_set_from_object(const Json& object);

}  // namespace dopplive::detail

#endif  // DOPPLIVE_SRC_JSON_CODEC_HPP_
