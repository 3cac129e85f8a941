// Copyright 2026 The cvdistill Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvdistill::cli {

/// Bad command-line or config input. Maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Locale-independent float parsing; the whole string must be consumed.
double parse_double(const std::string& text);
int parse_int(const std::string& text);

/// "start:stop:count" gives count evenly spaced points (endpoints included).
/// "start:stop" without a count steps by 1 and requires integer endpoints.
/// A bare number is a one-point grid.
std::vector<double> parse_range(const std::string& text);

/// Comma separated numbers.
std::vector<double> parse_list(const std::string& text);

/// key = value lines; '#' starts a comment; blank lines ignored.
std::map<std::string, std::string> parse_config(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Worker count from CVDISTILL_THREADS, else hardware concurrency; at least 1.
int thread_count();

/// Layered lookup: explicit flag, then config file, then the fallback.
class Settings {
 public:
  Settings() = default;
  explicit Settings(std::map<std::string, std::string> file) : file_(std::move(file)) {}

  void set_flag(const std::string& key, const std::string& value) { flags_[key] = value; }

  std::optional<std::string> raw(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  double get(const std::string& key, double fallback) const;
  int get(const std::string& key, int fallback) const;
  bool has(const std::string& key) const { return raw(key).has_value(); }

  /// Keys from the config file that no command consumed, for warnings.
  std::vector<std::string> unknown_keys(const std::vector<std::string>& known) const;

 private:
  std::map<std::string, std::string> file_;
  std::map<std::string, std::string> flags_;
};

}  // namespace cvdistill::cli
