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

#include "dopplive/profile.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "dopplive/error.hpp"
#include "json_codec.hpp"

namespace dopplive {

using detail::Json;

namespace {

void check_user_id(const std::string& id) {
  const bool ok = !id.empty() && id.front() != '.' &&
                  std::all_of(id.begin(), id.end(), [](unsigned char c) {
                    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
                  });
  if (!ok) throw Error(ErrorKind::kInvalidArgument, "invalid user id '" + id + "'");
}

class FileLock {
 public:
  explicit FileLock(const std::filesystem::path& path)
      : fd_(::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644)) {
    if (fd_ < 0 || ::flock(fd_, LOCK_EX) != 0) {
      if (fd_ >= 0) ::close(fd_);
      throw Error(ErrorKind::kIo, "cannot lock " + path.string());
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_;
};

Json labels_to_json(const std::vector<std::string>& labels) { return Json(labels); }

}  // namespace

const char* profile_mode_name(ProfileMode mode) {
  return mode == ProfileMode::kTextDependent ? "TextDependent" : "TextIndependent";
}

ProfileMode parse_profile_mode(const std::string& text) {
  if (text == "TextDependent" || text == "text-dependent" || text == "td") {
    return ProfileMode::kTextDependent;
  }
  if (text == "TextIndependent" || text == "text-independent" || text == "ti") {
    return ProfileMode::kTextIndependent;
  }
  throw Error(ErrorKind::kParse, "unknown profile mode '" + text + "'");
}

void UserProfile::validate() const {
  if (user_id.empty()) throw Error(ErrorKind::kInvalidArgument, "profile has no user id");
  if (!(threshold >= -1.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "threshold must lie in [-1, 1]");
  }
  if (mode == ProfileMode::kTextDependent && passphrase_templates.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "text-dependent profile has no passphrase template");
  }
  if (mode == ProfileMode::kTextIndependent && phoneme_templates.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "text-independent profile has no phoneme template");
  }
}

std::string passphrase_key(const std::vector<std::string>& labels) {
  std::string key;
  for (const auto& l : labels) {
    if (!key.empty()) key += ' ';
    key += l;
  }
  return key;
}

std::string profile_to_json(const UserProfile& profile) {
  Json j;
  j["version"] = profile.version;
  j["user_id"] = profile.user_id;
  j["mode"] = profile_mode_name(profile.mode);
  j["threshold"] = profile.threshold;
  Json pass = Json::object();
  for (const auto& [key, t] : profile.passphrase_templates) {
    Json jt;
    jt["phoneme_labels"] = labels_to_json(t.phoneme_labels);
    jt["trial_count"] = t.trial_count;
    jt["weight"] = 1.0;
    jt["contours"] = detail::contour_set_to_object(t.contours);
    pass[key] = std::move(jt);
  }
  j["passphrase_templates"] = std::move(pass);
  Json phon = Json::object();
  for (const auto& [label, t] : profile.phoneme_templates) {
    Json jt;
    jt["trial_count"] = t.trial_count;
    jt["weight"] = t.weight;
    jt["contours"] = detail::contour_set_to_object(t.contours);
    phon[label] = std::move(jt);
  }
  j["phoneme_templates"] = std::move(phon);
  j["created_at"] = profile.created_at;
  return j.dump(2) + "\n";
}

UserProfile profile_from_json(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    UserProfile p;
    p.version = j.at("version").get<int>();
    if (p.version != kProfileVersion) {
      throw Error(ErrorKind::kParse, "unsupported profile version " + std::to_string(p.version));
    }
    p.user_id = j.at("user_id").get<std::string>();
    p.mode = parse_profile_mode(j.at("mode").get<std::string>());
    p.threshold = j.at("threshold").get<double>();
    for (const auto& [key, jt] : j.at("passphrase_templates").items()) {
      PassphraseTemplate t;
      t.phoneme_labels = jt.at("phoneme_labels").get<std::vector<std::string>>();
      t.trial_count = jt.at("trial_count").get<std::size_t>();
      t.contours = detail::contour_set_from_object(jt.at("contours"));
      p.passphrase_templates.emplace(key, std::move(t));
    }
    for (const auto& [label, jt] : j.at("phoneme_templates").items()) {
      PhonemeTemplate t;
      t.label = label;
      t.trial_count = jt.at("trial_count").get<std::size_t>();
      t.weight = jt.at("weight").get<double>();
      if (!std::isfinite(t.weight) || t.weight < 0.0) {
        throw Error(ErrorKind::kParse, "phoneme '" + label + "' has an invalid weight");
      }
      t.contours = detail::contour_set_from_object(jt.at("contours"));
      p.phoneme_templates.emplace(label, std::move(t));
    }
    p.created_at = j.at("created_at").get<std::string>();
    p.validate();
    return p;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("profile: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kParse) throw;
    throw Error(ErrorKind::kParse, std::string("profile: ") + e.what());
  }
}

std::string current_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (end != epoch && *end == '\0') now = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ProfileStore::ProfileStore(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path ProfileStore::path_for(const std::string& user_id) const {
  check_user_id(user_id);
  return root_ / (user_id + ".json");
}

bool ProfileStore::exists(const std::string& user_id) const {
  return std::filesystem::is_regular_file(path_for(user_id));
}

UserProfile ProfileStore::load(const std::string& user_id) const {
  const auto path = path_for(user_id);
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "no profile for user '" + user_id + "' in " + root_.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  UserProfile p = profile_from_json(ss.str());
  if (p.user_id != user_id) {
    throw Error(ErrorKind::kParse, "profile " + path.string() + " belongs to '" + p.user_id + "'");
  }
  return p;
}

void ProfileStore::save(const UserProfile& profile) const {
  profile.validate();
  const auto path = path_for(profile.user_id);
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + root_.string() + ": " + ec.message());
  const FileLock lock(root_ / ".lock");
  const auto tmp = root_ / (profile.user_id + ".json.tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
    out << profile_to_json(profile);
    out.flush();
    if (!out) throw Error(ErrorKind::kIo, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::kIo, "cannot replace " + path.string() + ": " + ec.message());
  }
}

std::vector<std::string> ProfileStore::users() const {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(root_, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      out.push_back(entry.path().stem().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dopplive
