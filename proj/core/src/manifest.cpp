#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "tfr/audio_io.hpp"
#include "tfr/error.hpp"

namespace tfr {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

// Comma-separated fields; a field may be double-quoted with "" escapes.
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.emplace_back(trim(cur));
  return fields;
}

int parse_int(std::string_view text, const char* column, std::size_t line_no) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error("manifest line " + std::to_string(line_no) + ": non-integer " + column + " '" +
                std::string(text) + "'");
  }
  return value;
}

}  // namespace

int DatasetManifest::num_folds() const {
  int k = 0;
  for (const auto& e : entries) k = std::max(k, e.fold);
  return k;
}

int DatasetManifest::num_classes() const {
  int c = 0;
  for (const auto& e : entries) c = std::max(c, e.label + 1);
  return c;
}

std::vector<std::size_t> DatasetManifest::fold_counts(int num_folds) const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(num_folds, 0)), 0);
  for (const auto& e : entries) {
    if (e.fold >= 1 && e.fold <= num_folds) ++counts[static_cast<std::size_t>(e.fold - 1)];
  }
  return counts;
}

DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir,
                               ManifestLimits limits) {
  std::string line;
  std::size_t line_no = 0;
  int path_col = -1, label_col = -1, fold_col = -1;

  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (line_no == 0 || trim(line).empty()) throw Error("manifest: missing header");
  {
    std::string header(trim(line));
    if (header.rfind("\xEF\xBB\xBF", 0) == 0) header.erase(0, 3);
    const auto cols = split_csv(header);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (cols[i] == "path") path_col = static_cast<int>(i);
      if (cols[i] == "label") label_col = static_cast<int>(i);
      if (cols[i] == "fold") fold_col = static_cast<int>(i);
    }
    if (path_col < 0 || label_col < 0 || fold_col < 0)
      throw Error("manifest: header must contain path,label,fold");
  }
  const auto needed = static_cast<std::size_t>(std::max({path_col, label_col, fold_col})) + 1;

  DatasetManifest manifest;
  std::set<std::filesystem::path> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() < needed)
      throw Error("manifest line " + std::to_string(line_no) + ": missing columns");

    ManifestEntry entry;
    const std::filesystem::path raw(fields[static_cast<std::size_t>(path_col)]);
    if (raw.empty()) throw Error("manifest line " + std::to_string(line_no) + ": empty path");
    entry.audio_path = raw.is_absolute() ? raw : (base_dir / raw).lexically_normal();
    entry.label = parse_int(fields[static_cast<std::size_t>(label_col)], "label", line_no);
    entry.fold = parse_int(fields[static_cast<std::size_t>(fold_col)], "fold", line_no);

    if (entry.label < 0 || (limits.num_classes && entry.label >= *limits.num_classes))
      throw Error("manifest line " + std::to_string(line_no) + ": label out of range");
    if (entry.fold < 1 || (limits.num_folds && entry.fold > *limits.num_folds))
      throw Error("manifest line " + std::to_string(line_no) + ": fold out of range");
    if (!seen.insert(entry.audio_path).second)
      throw Error("manifest line " + std::to_string(line_no) + ": duplicate path " +
                  entry.audio_path.string());
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

DatasetManifest load_manifest(const std::filesystem::path& path, ManifestLimits limits) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());
  return parse_manifest(in, path.parent_path(), limits);
}

}  // namespace tfr
