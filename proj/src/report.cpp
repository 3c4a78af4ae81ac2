#include "sleppulse/report.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"
#include "sleppulse/error.hpp"

namespace sleppulse {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(const std::filesystem::path& path, const CsvTable& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::config, "cannot write " + path.string());
  for (const auto& c : t.comments) out << "# " << c << '\n';
  bool first = true;
  for (const auto& c : t.columns) {
    out << (first ? "" : ",") << c;
    first = false;
  }
  for (const auto& c : t.text_columns) {
    out << (first ? "" : ",") << c;
    first = false;
  }
  out << '\n';
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    first = true;
    for (double v : t.rows[r]) {
      out << (first ? "" : ",") << format_double(v);
      first = false;
    }
    if (r < t.text.size()) {
      for (const auto& s : t.text[r]) {
        out << (first ? "" : ",") << s;
        first = false;
      }
    }
    out << '\n';
  }
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::config, "cannot write " + path.string());
  out << content;
}

std::string sha256_hex(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(Errc::config, "cannot read " + file.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

std::string tool_version() { return SLEPPULSE_VERSION; }

void write_manifest(const std::filesystem::path& dir, RunManifest m, const std::vector<std::string>& files) {
  m.files.clear();
  for (const auto& f : files) {
    const auto p = dir / f;
    m.files.push_back({f, sha256_hex(p), std::filesystem::file_size(p)});
  }
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["config"] = m.config;
  j["version"] = m.version;
  j["wall_seconds"] = m.wall_seconds;
  j["files"] = nlohmann::ordered_json::array();
  for (const auto& e : m.files) j["files"].push_back({{"name", e.name}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  write_text(dir / "manifest.json", j.dump(2) + "\n");
}

std::vector<std::string> verify_manifest(const std::filesystem::path& dir) {
  std::vector<std::string> problems;
  std::ifstream in(dir / "manifest.json");
  if (!in) return {"manifest.json missing"};
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    return {std::string("manifest.json unreadable: ") + e.what()};
  }
  for (const auto& e : j.at("files")) {
    const std::string name = e.at("name");
    const auto p = dir / name;
    if (!std::filesystem::exists(p)) {
      problems.push_back(name + ": missing");
      continue;
    }
    if (sha256_hex(p) != e.at("sha256").get<std::string>()) problems.push_back(name + ": digest mismatch");
  }
  return problems;
}

}  // namespace sleppulse
