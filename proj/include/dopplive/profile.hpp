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

#ifndef DOPPLIVE_PROFILE_HPP_
#define DOPPLIVE_PROFILE_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dopplive/matching.hpp"

namespace dopplive {

inline constexpr int kProfileVersion = 1;

enum class ProfileMode { kTextDependent, kTextIndependent };
const char* profile_mode_name(ProfileMode mode);
ProfileMode parse_profile_mode(const std::string& text);

struct UserProfile {
  int version = kProfileVersion;
  std::string user_id;
  ProfileMode mode = ProfileMode::kTextDependent;
  double threshold = 0.0;
  // Keyed by the space-joined phoneme labels.
  std::map<std::string, PassphraseTemplate> passphrase_templates;
  std::map<std::string, PhonemeTemplate> phoneme_templates;
  std::string created_at;

  // Throws kInvalidArgument on an empty id, a threshold outside [-1, 1] or a
  // mode without templates.
  void validate() const;
};

std::string passphrase_key(const std::vector<std::string>& labels);

std::string profile_to_json(const UserProfile& profile);
UserProfile profile_from_json(const std::string& text);

// SOURCE_DATE_EPOCH if set, the wall clock otherwise; ISO-8601 UTC.
std::string current_timestamp();

// One JSON file per user under a directory. Writes take an exclusive lock on
// <root>/.lock and replace the file atomically.
class ProfileStore {
 public:
  explicit ProfileStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path path_for(const std::string& user_id) const;
  bool exists(const std::string& user_id) const;
  // Throws kIo when the profile is missing, kParse when it is malformed.
  UserProfile load(const std::string& user_id) const;
  void save(const UserProfile& profile) const;
  std::vector<std::string> users() const;

 private:
  std::filesystem::path root_;
};

}  // namespace dopplive

#endif  // DOPPLIVE_PROFILE_HPP_
