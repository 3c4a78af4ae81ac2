#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace sleppulse {

// 17 significant digits, round-trip exact.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> comments;  // written as '# ' lines
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<std::string>> text;  // optional trailing text columns per row
  std::vector<std::string> text_columns;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
void write_text(const std::filesystem::path& path, const std::string& content);

std::string sha256_hex(const std::filesystem::path& file);

struct ManifestEntry {
  std::string name;
  std::string sha256;
  std::uintmax_t bytes;
};

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::string version;
  double wall_seconds = 0;
  std::vector<ManifestEntry> files;
};

// Hashes the listed files (relative to dir) and writes manifest.json.
void write_manifest(const std::filesystem::path& dir, RunManifest m, const std::vector<std::string>& files);

// Empty when every listed file exists with the recorded digest.
std::vector<std::string> verify_manifest(const std::filesystem::path& dir);

std::string tool_version();

}  // namespace sleppulse
