#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace entvec {

// $ENTVEC_FIXTURES if set, else the data/fixtures directory of the source tree.
std::filesystem::path default_fixture_dir();

// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct VerifyOptions {
  std::filesystem::path dir = default_fixture_dir();
  // Item ids ("1/c-score") or group numbers ("1".."4", "manifest"); empty
  // runs everything.
  std::vector<std::string> only;
  bool check_hashes = true;
};

struct VerifyItem {
  std::string id;
  std::string description;
  bool passed = false;
  std::string observed;
  std::string expected;
  double seconds = 0.0;
};

struct VerifyReport {
  std::vector<VerifyItem> items;
  bool all_passed() const;
};

// Recomputes the bundled reference values. Missing or corrupt files turn
// into failed items rather than exceptions.
VerifyReport verify_fixtures(const VerifyOptions& options = {});

// Ids of every item, in run order.
std::vector<std::string> verify_item_ids();

}  // namespace entvec
