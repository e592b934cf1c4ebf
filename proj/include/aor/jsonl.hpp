#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aor/error.hpp"

namespace aor {

using json = nlohmann::json;

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "short write to " + path.string());
}

inline json parse_json(const std::string& text, const std::string& what) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorKind::Parse, what + ": invalid JSON");
  return doc;
}

inline json read_json_file(const std::filesystem::path& path) {
  return parse_json(read_text_file(path), path.string());
}

// One JSON record per line; blank lines are skipped.
inline std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::vector<json> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded()) {
      throw Error(ErrorKind::Parse,
                  path.string() + ":" + std::to_string(lineno) + ": invalid JSON record");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

// Canonical single-line form used for every emitted record, so reruns and
// parallel runs compare byte-for-byte.
inline std::string dump_line(const json& record) { return record.dump(); }

inline void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  for (const auto& rec : records) out << dump_line(rec) << '\n';
  if (!out) throw Error(ErrorKind::Io, "short write to " + path.string());
}

inline void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  for (const auto& line : lines) out << line << '\n';
  if (!out) throw Error(ErrorKind::Io, "short write to " + path.string());
}

}  // namespace aor
